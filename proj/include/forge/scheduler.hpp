#pragma once

// Study pipeline: sign-up with paper proposals, DE session booking, slot
// splitting, P slot booking, phase deadlines and the notification outbox.

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forge/domain.hpp"

namespace forge {

using Minutes = std::chrono::minutes;

enum class StudyPhase { SignUp, BookingDE, BookingP, Dialogues, Closed };

std::string_view phase_name(StudyPhase p) noexcept;
std::optional<StudyPhase> parse_phase(std::string_view s) noexcept;

struct Participant {
  std::string participant_id;
  std::string full_name;
  std::string email;
  std::string auth_code;
  std::vector<std::string> proposed_paper_ids;

  bool operator==(const Participant&) const = default;
};

struct DeSession {
  std::string session_id;
  std::string paper_id;
  std::string de_participant_id;
  Timestamp start_time{};
  Minutes duration{60};

  Timestamp end_time() const { return start_time + duration; }
  bool operator==(const DeSession&) const = default;
};

struct SessionSlot {
  std::string slot_id;
  std::string session_id;
  std::size_t slot_index = 0;
  Timestamp start_time{};
  Minutes duration{20};
  std::optional<std::string> booked_p_participant_id;

  Timestamp end_time() const { return start_time + duration; }
  bool operator==(const SessionSlot&) const = default;
};

enum class NotificationKind { PhaseAdvance, SlotReminder };

struct Notification {
  std::string notification_id;
  std::string recipient_participant_id;
  std::optional<std::string> slot_id;
  Timestamp fire_at{};
  NotificationKind kind = NotificationKind::SlotReminder;
  bool delivered = false;
  /// Phase entered, for PhaseAdvance notifications.
  std::optional<StudyPhase> phase;

  bool operator==(const Notification&) const = default;
};

/// Current phase plus one deadline per non-terminal phase
/// (SignUp, BookingDE, BookingP, Dialogues), strictly increasing.
struct StudyCalendar {
  StudyPhase phase = StudyPhase::SignUp;
  std::array<Timestamp, 4> deadlines{};

  bool operator==(const StudyCalendar&) const = default;
};

struct SchedulerConfig {
  Minutes session_minutes{60};
  Minutes slot_minutes{20};
  Minutes reminder_lead{10};
  std::size_t p_booking_quota = 4;
  std::size_t max_selected_papers = 2;
  std::size_t max_submitted_papers = 5;
};

/// Everything the scheduler owns; persisted verbatim by the store.
struct SchedulerState {
  StudyCalendar calendar;
  std::map<std::string, Participant> participants;
  std::map<std::string, Paper> papers;
  std::map<std::string, DeSession> sessions;
  std::map<std::string, SessionSlot> slots;
  std::map<std::string, Notification> notifications;
  std::uint64_t next_id = 1;

  bool operator==(const SchedulerState&) const = default;
};

/// A paper offered on the sign-up form. Only selected papers enter the study.
struct PaperSubmission {
  std::string title;
  std::vector<std::string> abstract;
  std::vector<std::string> introduction;
  bool selected = false;
};

/// Source of candidate papers for a participant. The built-in source is
/// manual submission; profile scrapers can implement the same interface.
class PaperSource {
 public:
  virtual ~PaperSource() = default;
  virtual std::vector<PaperSubmission> candidates(const std::string& profile) = 0;
};

/// Manual submission: title plus free-text abstract and introduction, split
/// into sentences with the message segmenter.
class ManualPaperSource : public PaperSource {
 public:
  void add(std::string title, std::string_view abstract_text, std::string_view introduction_text);
  std::vector<PaperSubmission> candidates(const std::string& profile) override;

 private:
  std::vector<PaperSubmission> pending_;
};

/// Cuts a session into contiguous slots that exactly tile it.
/// Throws Error{NonDivisibleDuration} if slot_minutes does not divide the
/// session, Error{InvalidArgument} for non-positive lengths.
std::vector<SessionSlot> split_session_slots(const DeSession& session, Minutes slot_minutes = Minutes{20});

/// 128 random bits rendered as 26 base32 characters (RFC 4648 alphabet).
std::string generate_auth_code();

struct BookingConfirmation {
  std::string slot_id;
  std::string session_id;
  std::string paper_id;
  Timestamp start_time{};
  Minutes duration{};
  std::vector<std::string> notification_ids;
};

/// Not thread-safe; callers serialize commands (see Platform).
class Scheduler {
 public:
  using CodeGenerator = std::function<std::string()>;

  explicit Scheduler(SchedulerConfig config = {}, SchedulerState state = {},
                     CodeGenerator codes = generate_auth_code);

  const SchedulerConfig& config() const noexcept { return config_; }
  const SchedulerState& state() const noexcept { return state_; }
  StudyPhase phase() const noexcept { return state_.calendar.phase; }

  /// Deadlines for SignUp, BookingDE, BookingP, Dialogues; must increase strictly.
  void set_deadlines(const std::array<Timestamp, 4>& deadlines);

  Participant register_participant(const std::string& full_name, const std::string& email,
                                   const std::vector<PaperSubmission>& submissions);

  /// Creates a session of config().session_minutes and its slots.
  DeSession create_de_session(const std::string& participant_id, const std::string& paper_id,
                              Timestamp start_time);

  BookingConfirmation book_slot_as_p(const std::string& participant_id, const std::string& slot_id);

  /// Undelivered notifications with fire_at <= now, marked delivered. When
  /// `recipient` is set only that participant's outbox is drained.
  std::vector<Notification> due_notifications(Timestamp now,
                                              const std::optional<std::string>& recipient = {});

  /// Moves forward past every elapsed deadline, queueing a PhaseAdvance
  /// notification to every participant per transition.
  StudyPhase advance_phase(Timestamp now);

  std::optional<std::string> participant_for_code(std::string_view auth_code) const;
  const Participant* participant(const std::string& id) const;
  const Paper* paper(const std::string& id) const;
  const DeSession* session(const std::string& id) const;
  const SessionSlot* slot(const std::string& id) const;

  std::vector<const SessionSlot*> slots_for_participant(const std::string& participant_id) const;

 private:
  std::string next_id(std::string_view prefix);
  void require_phase(StudyPhase phase) const;
  std::string queue_notification(const std::string& recipient, std::optional<std::string> slot_id,
                                 Timestamp fire_at, NotificationKind kind,
                                 std::optional<StudyPhase> phase = {});
  bool busy_between(const std::string& participant_id, Timestamp begin, Timestamp end) const;

  SchedulerConfig config_;
  SchedulerState state_;
  CodeGenerator codes_;
};

/// Constant-time equality for equal-length secrets; length mismatch returns false.
bool constant_time_equal(std::string_view a, std::string_view b) noexcept;

}  // namespace forge
