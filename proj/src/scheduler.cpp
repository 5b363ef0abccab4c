#include "forge/scheduler.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include "forge/error.hpp"
#include "forge/segment.hpp"

namespace forge {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::array<Timestamp, 4> open_ended_deadlines() {
  auto far = Timestamp::max();
  using std::chrono::milliseconds;
  return {far - milliseconds{3}, far - milliseconds{2}, far - milliseconds{1}, far};
}

bool overlaps(Timestamp a0, Timestamp a1, Timestamp b0, Timestamp b1) {
  return a0 < b1 && b0 < a1;
}

}  // namespace

std::string_view phase_name(StudyPhase p) noexcept {
  switch (p) {
    case StudyPhase::SignUp: return "SignUp";
    case StudyPhase::BookingDE: return "BookingDE";
    case StudyPhase::BookingP: return "BookingP";
    case StudyPhase::Dialogues: return "Dialogues";
    case StudyPhase::Closed: return "Closed";
  }
  return "Closed";
}

std::optional<StudyPhase> parse_phase(std::string_view s) noexcept {
  for (auto p : {StudyPhase::SignUp, StudyPhase::BookingDE, StudyPhase::BookingP,
                 StudyPhase::Dialogues, StudyPhase::Closed})
    if (phase_name(p) == s) return p;
  return std::nullopt;
}

bool constant_time_equal(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  unsigned char diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    diff |= static_cast<unsigned char>(a[i]) ^ static_cast<unsigned char>(b[i]);
  return diff == 0;
}

std::string generate_auth_code() {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567";
  std::random_device rd;
  std::array<std::uint8_t, 16> bytes{};
  for (std::size_t i = 0; i < bytes.size(); i += 4) {
    std::uint32_t word = rd();
    for (std::size_t k = 0; k < 4; ++k) bytes[i + k] = static_cast<std::uint8_t>(word >> (8 * k));
  }
  std::string out;
  std::uint32_t buffer = 0;
  int bits = 0;
  for (std::uint8_t b : bytes) {
    buffer = (buffer << 8) | b;
    bits += 8;
    while (bits >= 5) {
      out += kAlphabet[(buffer >> (bits - 5)) & 0x1F];
      bits -= 5;
    }
  }
  if (bits > 0) out += kAlphabet[(buffer << (5 - bits)) & 0x1F];
  return out;
}

void ManualPaperSource::add(std::string title, std::string_view abstract_text,
                            std::string_view introduction_text) {
  pending_.push_back({std::move(title), segment_sentences(abstract_text),
                      segment_sentences(introduction_text), false});
}

std::vector<PaperSubmission> ManualPaperSource::candidates(const std::string&) {
  return pending_;
}

std::vector<SessionSlot> split_session_slots(const DeSession& session, Minutes slot_minutes) {
  if (slot_minutes.count() <= 0 || session.duration.count() <= 0)
    throw Error(ErrorCode::InvalidArgument, "slot and session durations must be positive");
  if (session.duration.count() % slot_minutes.count() != 0)
    throw Error(ErrorCode::NonDivisibleDuration,
                std::to_string(slot_minutes.count()) + "-minute slots do not tile a " +
                    std::to_string(session.duration.count()) + "-minute session");
  std::vector<SessionSlot> slots;
  const auto n = static_cast<std::size_t>(session.duration / slot_minutes);
  for (std::size_t i = 0; i < n; ++i) {
    SessionSlot s;
    s.slot_id = session.session_id + "." + std::to_string(i);
    s.session_id = session.session_id;
    s.slot_index = i;
    s.start_time = session.start_time + slot_minutes * static_cast<int>(i);
    s.duration = slot_minutes;
    slots.push_back(std::move(s));
  }
  return slots;
}

Scheduler::Scheduler(SchedulerConfig config, SchedulerState state, CodeGenerator codes)
    : config_(config), state_(std::move(state)), codes_(std::move(codes)) {
  if (state_.calendar.deadlines == std::array<Timestamp, 4>{})
    state_.calendar.deadlines = open_ended_deadlines();
}

void Scheduler::set_deadlines(const std::array<Timestamp, 4>& deadlines) {
  for (std::size_t i = 1; i < deadlines.size(); ++i)
    if (deadlines[i] <= deadlines[i - 1])
      throw Error(ErrorCode::InvalidArgument, "phase deadlines must be strictly increasing");
  state_.calendar.deadlines = deadlines;
}

std::string Scheduler::next_id(std::string_view prefix) {
  return std::string(prefix) + std::to_string(state_.next_id++);
}

void Scheduler::require_phase(StudyPhase phase) const {
  if (state_.calendar.phase != phase)
    throw Error(ErrorCode::PhaseClosed, "operation requires phase " + std::string(phase_name(phase)) +
                                            ", study is in " +
                                            std::string(phase_name(state_.calendar.phase)));
}

Participant Scheduler::register_participant(const std::string& full_name, const std::string& email,
                                            const std::vector<PaperSubmission>& submissions) {
  require_phase(StudyPhase::SignUp);
  const std::string normalized_email = lowercase(trim(email));
  if (trim(full_name).empty() || normalized_email.find('@') == std::string::npos)
    throw Error(ErrorCode::InvalidSubmission, "full name and a valid email are required");
  for (const auto& [id, p] : state_.participants)
    if (p.email == normalized_email)
      throw Error(ErrorCode::DuplicateEmail, "email already registered");
  if (submissions.empty() || submissions.size() > config_.max_submitted_papers)
    throw Error(ErrorCode::InvalidSubmission, "submit between 1 and " +
                                                  std::to_string(config_.max_submitted_papers) +
                                                  " papers");
  const auto selected = static_cast<std::size_t>(
      std::count_if(submissions.begin(), submissions.end(), [](const auto& s) { return s.selected; }));
  if (selected == 0) throw Error(ErrorCode::NoPaperSelected, "select at least one paper");
  if (selected > config_.max_selected_papers)
    throw Error(ErrorCode::InvalidSubmission,
                "select at most " + std::to_string(config_.max_selected_papers) + " papers");

  auto clean = [](const std::vector<std::string>& in) {
    std::vector<std::string> out;
    for (const auto& s : in)
      if (auto t = trim(s); !t.empty()) out.push_back(std::move(t));
    return out;
  };
  for (const auto& s : submissions)
    if (s.selected && trim(s.title).empty())
      throw Error(ErrorCode::InvalidSubmission, "selected papers need a title");

  Participant p;
  p.participant_id = next_id("u");
  p.full_name = trim(full_name);
  p.email = normalized_email;
  do {
    p.auth_code = codes_();
  } while (participant_for_code(p.auth_code).has_value());

  for (const auto& s : submissions) {
    if (!s.selected) continue;
    Paper paper = make_paper(next_id("paper"), trim(s.title), clean(s.abstract),
                             clean(s.introduction), p.participant_id);
    p.proposed_paper_ids.push_back(paper.paper_id);
    state_.papers.emplace(paper.paper_id, std::move(paper));
  }
  state_.participants.emplace(p.participant_id, p);
  return p;
}

bool Scheduler::busy_between(const std::string& participant_id, Timestamp begin, Timestamp end) const {
  for (const auto& [id, s] : state_.sessions)
    if (s.de_participant_id == participant_id && overlaps(begin, end, s.start_time, s.end_time()))
      return true;
  for (const auto& [id, slot] : state_.slots)
    if (slot.booked_p_participant_id == participant_id &&
        overlaps(begin, end, slot.start_time, slot.end_time()))
      return true;
  return false;
}

DeSession Scheduler::create_de_session(const std::string& participant_id, const std::string& paper_id,
                                       Timestamp start_time) {
  require_phase(StudyPhase::BookingDE);
  if (!state_.participants.contains(participant_id))
    throw Error(ErrorCode::NotFound, "unknown participant " + participant_id);
  const Paper* p = paper(paper_id);
  if (!p) throw Error(ErrorCode::NotFound, "unknown paper " + paper_id);
  if (p->owner_participant_id != participant_id)
    throw Error(ErrorCode::NotOwner, "only the proposer of " + paper_id + " can host its session");
  if (config_.session_minutes < config_.slot_minutes)
    throw Error(ErrorCode::InvalidArgument, "session shorter than one slot");

  DeSession session;
  session.paper_id = paper_id;
  session.de_participant_id = participant_id;
  session.start_time = start_time;
  session.duration = config_.session_minutes;
  for (const auto& [id, s] : state_.sessions)
    if (s.de_participant_id == participant_id &&
        overlaps(session.start_time, session.end_time(), s.start_time, s.end_time()))
      throw Error(ErrorCode::OverlapWithOwnSession, "overlaps your session " + id);

  // validate tiling before consuming an id
  split_session_slots(DeSession{"probe", paper_id, participant_id, start_time, session.duration},
                      config_.slot_minutes);
  session.session_id = next_id("s");
  for (auto& slot : split_session_slots(session, config_.slot_minutes))
    state_.slots.emplace(slot.slot_id, std::move(slot));
  state_.sessions.emplace(session.session_id, session);
  return session;
}

BookingConfirmation Scheduler::book_slot_as_p(const std::string& participant_id,
                                              const std::string& slot_id) {
  require_phase(StudyPhase::BookingP);
  if (!state_.participants.contains(participant_id))
    throw Error(ErrorCode::NotFound, "unknown participant " + participant_id);
  auto it = state_.slots.find(slot_id);
  if (it == state_.slots.end()) throw Error(ErrorCode::NotFound, "unknown slot " + slot_id);
  SessionSlot& slot = it->second;
  if (slot.booked_p_participant_id) throw Error(ErrorCode::SlotTaken, "slot " + slot_id + " is taken");
  const DeSession& session = state_.sessions.at(slot.session_id);
  const Paper& paper = state_.papers.at(session.paper_id);
  if (session.de_participant_id == participant_id || paper.owner_participant_id == participant_id)
    throw Error(ErrorCode::OwnPaper, "you cannot act as P on your own paper");

  std::size_t booked = 0;
  for (const auto& [id, s] : state_.slots) {
    if (s.booked_p_participant_id != participant_id) continue;
    ++booked;
  }
  if (booked >= config_.p_booking_quota)
    throw Error(ErrorCode::QuotaExceeded,
                "at most " + std::to_string(config_.p_booking_quota) + " P bookings per participant");
  for (const auto& [id, s] : state_.slots)
    if (s.booked_p_participant_id == participant_id &&
        state_.sessions.at(s.session_id).paper_id == session.paper_id)
      throw Error(ErrorCode::DuplicatePaper, "already booked a slot on " + session.paper_id);
  if (busy_between(participant_id, slot.start_time, slot.end_time()))
    throw Error(ErrorCode::TimeConflict, "slot overlaps one of your bookings");

  slot.booked_p_participant_id = participant_id;
  BookingConfirmation c{slot.slot_id, session.session_id, session.paper_id, slot.start_time,
                        slot.duration, {}};
  const Timestamp fire_at = slot.start_time - config_.reminder_lead;
  c.notification_ids.push_back(
      queue_notification(participant_id, slot.slot_id, fire_at, NotificationKind::SlotReminder));
  c.notification_ids.push_back(queue_notification(session.de_participant_id, slot.slot_id, fire_at,
                                                  NotificationKind::SlotReminder));
  return c;
}

std::string Scheduler::queue_notification(const std::string& recipient,
                                          std::optional<std::string> slot_id, Timestamp fire_at,
                                          NotificationKind kind, std::optional<StudyPhase> phase) {
  Notification n;
  n.notification_id = next_id("n");
  n.recipient_participant_id = recipient;
  n.slot_id = std::move(slot_id);
  n.fire_at = fire_at;
  n.kind = kind;
  n.phase = phase;
  std::string id = n.notification_id;
  state_.notifications.emplace(id, std::move(n));
  return id;
}

std::vector<Notification> Scheduler::due_notifications(Timestamp now,
                                                       const std::optional<std::string>& recipient) {
  std::vector<Notification> due;
  for (auto& [id, n] : state_.notifications) {
    if (n.delivered || n.fire_at > now) continue;
    if (recipient && n.recipient_participant_id != *recipient) continue;
    n.delivered = true;
    due.push_back(n);
  }
  std::stable_sort(due.begin(), due.end(),
                   [](const Notification& a, const Notification& b) { return a.fire_at < b.fire_at; });
  return due;
}

StudyPhase Scheduler::advance_phase(Timestamp now) {
  auto& cal = state_.calendar;
  while (cal.phase != StudyPhase::Closed && now >= cal.deadlines[static_cast<std::size_t>(cal.phase)]) {
    cal.phase = static_cast<StudyPhase>(static_cast<int>(cal.phase) + 1);
    for (const auto& [id, p] : state_.participants)
      queue_notification(id, std::nullopt, now, NotificationKind::PhaseAdvance, cal.phase);
  }
  return cal.phase;
}

std::optional<std::string> Scheduler::participant_for_code(std::string_view auth_code) const {
  std::optional<std::string> found;
  for (const auto& [id, p] : state_.participants)
    if (constant_time_equal(p.auth_code, auth_code) && !found) found = id;
  return found;
}

const Participant* Scheduler::participant(const std::string& id) const {
  auto it = state_.participants.find(id);
  return it == state_.participants.end() ? nullptr : &it->second;
}

const Paper* Scheduler::paper(const std::string& id) const {
  auto it = state_.papers.find(id);
  return it == state_.papers.end() ? nullptr : &it->second;
}

const DeSession* Scheduler::session(const std::string& id) const {
  auto it = state_.sessions.find(id);
  return it == state_.sessions.end() ? nullptr : &it->second;
}

const SessionSlot* Scheduler::slot(const std::string& id) const {
  auto it = state_.slots.find(id);
  return it == state_.slots.end() ? nullptr : &it->second;
}

std::vector<const SessionSlot*> Scheduler::slots_for_participant(const std::string& participant_id) const {
  std::vector<const SessionSlot*> out;
  for (const auto& [id, s] : state_.slots)
    if (s.booked_p_participant_id == participant_id ||
        state_.sessions.at(s.session_id).de_participant_id == participant_id)
      out.push_back(&s);
  return out;
}

}  // namespace forge
