#pragma once

// Live dialogue state machine for one session slot.
//
//   WaitingForBoth -> Active | Abandoned
//   Active         -> Finalized | Abandoned | Expired
//   Expired        -> Finalized | Abandoned
//
// All operations are pure transformations of a LiveSession value that
// return the events the transport must deliver. Serialization per session
// is the caller's job (see SessionActor).

#include <array>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "forge/domain.hpp"
#include "forge/scheduler.hpp"

namespace forge {

enum class SessionState { WaitingForBoth, Active, Expired, Finalized, Abandoned };

std::string_view state_name(SessionState s) noexcept;
std::optional<SessionState> parse_session_state(std::string_view s) noexcept;
bool is_allowed_transition(SessionState from, SessionState to) noexcept;

struct SessionTiming {
  Minutes join_grace{2};
  Minutes reply_timeout{5};
  std::size_t hint_window_turns = 3;
};

struct LiveSession {
  std::string slot_id;
  std::string paper_id;
  std::string de_participant_id;
  std::optional<std::string> p_participant_id;
  Timestamp slot_start{};
  Timestamp deadline{};

  SessionState state = SessionState::WaitingForBoth;
  std::array<bool, 2> present{};  // indexed by Role
  std::vector<Message> transcript;
  std::optional<Timestamp> started_at;
  std::array<bool, 2> end_signaled{};
  std::array<std::optional<Timestamp>, 2> disconnected_at{};
  bool abrupt_end = false;
  std::size_t hinted_at_turns = 0;
  std::vector<SessionState> history{SessionState::WaitingForBoth};
  std::string close_reason;

  bool is_present(Role r) const noexcept { return present[static_cast<std::size_t>(r)]; }
  bool is_closed() const noexcept {
    return state == SessionState::Finalized || state == SessionState::Abandoned;
  }
  bool operator==(const LiveSession&) const = default;
};

LiveSession open_live_session(const SessionSlot& slot, const DeSession& session);

struct PresenceChanged {
  Role who;
  bool present;
};
struct MessagePosted {
  Message message;
};
struct NoFactWarning {};
struct HintEvent {
  Role target_role;
  std::string text;
  Timestamp issued_at{};
};
struct SessionClosed {
  SessionState final_state;
  std::string reason;
};

using SessionEvent = std::variant<PresenceChanged, MessagePosted, NoFactWarning, HintEvent, SessionClosed>;

/// Recipient of an event: a single role, or both when nullopt.
std::optional<Role> event_audience(const SessionEvent& e);

/// Role for a participant in this slot, if any.
std::optional<Role> role_of(const LiveSession& s, const std::string& participant_id);

struct JoinResult {
  Role role;
  std::vector<SessionEvent> events;
};

/// Errors: NotYourSlot, SlotWindowClosed, AlreadyJoined.
JoinResult join_slot(LiveSession& s, const std::string& participant_id, Timestamp now,
                     const SessionTiming& timing = {});

std::vector<SessionEvent> leave_slot(LiveSession& s, Role role, Timestamp now);

/// DomainExpert sees title, abstract and introduction; Proponent sees the title only.
Paper visible_paper(Role role, const Paper& paper);

struct PostResult {
  Message message;
  std::vector<SessionEvent> events;
};

/// Segments raw_text, validates against the paper and appends with a server
/// timestamp strictly after the previous message.
/// Errors: SessionNotActive, PastDeadline, EmptyMessage, TooManyFacts,
/// ProponentWithFacts, DanglingAnchor.
PostResult post_message(LiveSession& s, Role role, std::string_view raw_text,
                        const std::vector<FactAnchor>& facts, const Paper& paper, Timestamp now);

/// Same as post_message with pre-segmented sentences (intents preserved).
PostResult post_sentences(LiveSession& s, Role role, std::vector<SentenceUnit> sentences,
                          const std::vector<FactAnchor>& facts, const Paper& paper, Timestamp now);

/// Records a role's wish to end; both signals make the session finalizable.
void signal_end(LiveSession& s, Role role);

/// Hint to the quieter role when none of the last `hint_window_turns` turns
/// carried an argumentative sentence. At most one hint per window.
std::optional<HintEvent> issue_hint(LiveSession& s, Timestamp now, const SessionTiming& timing = {});

/// Applies time-driven transitions (Active -> Expired at the deadline) and
/// flags abrupt ends (reply timeout, disconnection past the timeout).
void tick(LiveSession& s, Timestamp now, const SessionTiming& timing = {});

/// True when the deadline passed, both parties signaled the end, or the
/// session ended abruptly.
bool is_finalizable(const LiveSession& s, Timestamp now, const SessionTiming& timing = {});

struct FinalizeOutcome {
  SessionState final_state;
  std::string reason;
  std::optional<Dialogue> dialogue;  // set iff final_state == Finalized
  std::vector<SessionEvent> events;
};

/// Sessions with >= 8 messages and no abrupt end become finalized dialogues;
/// everything else is Abandoned. Throws Error{SessionStillOpen} when not
/// finalizable and Error{SessionNotActive} if already closed.
FinalizeOutcome finalize(LiveSession& s, Timestamp now, const SessionTiming& timing = {});

/// One logical actor per live session: all events for a session run under
/// its lock, distinct sessions proceed concurrently.
class SessionActor {
 public:
  explicit SessionActor(LiveSession session) : session_(std::move(session)) {}

  template <class F>
  auto with(F&& f) {
    std::lock_guard lock(mutex_);
    return std::forward<F>(f)(session_);
  }

  LiveSession snapshot() const {
    std::lock_guard lock(mutex_);
    return session_;
  }

 private:
  mutable std::mutex mutex_;
  LiveSession session_;
};

}  // namespace forge
