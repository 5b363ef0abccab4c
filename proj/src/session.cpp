#include "forge/session.hpp"

#include <algorithm>
#include <stdexcept>

#include "forge/error.hpp"
#include "forge/segment.hpp"

namespace forge {

namespace {

constexpr std::size_t idx(Role r) { return static_cast<std::size_t>(r); }

void set_state(LiveSession& s, SessionState to) {
  if (s.state == to) return;
  if (!is_allowed_transition(s.state, to))
    throw std::logic_error("illegal session transition " + std::string(state_name(s.state)) + " -> " +
                           std::string(state_name(to)));
  s.state = to;
  s.history.push_back(to);
}

// A turn is open while the latest message is P's; DE silence past the
// timeout then ends the dialogue abruptly.
bool reply_timed_out(const LiveSession& s, Timestamp now, const SessionTiming& timing) {
  if (s.transcript.empty() || s.transcript.back().role != Role::Proponent) return false;
  return now - s.transcript.back().sent_at >= timing.reply_timeout;
}

bool disconnect_timed_out(const LiveSession& s, Timestamp now, const SessionTiming& timing) {
  for (Role r : {Role::Proponent, Role::DomainExpert})
    if (!s.is_present(r) && s.disconnected_at[idx(r)] && now - *s.disconnected_at[idx(r)] >= timing.reply_timeout)
      return true;
  return false;
}

constexpr std::string_view kHintForProponent =
    "Looking back at what you discussed so far, what is your opinion on it? Ask your partner what they think.";
constexpr std::string_view kHintForExpert =
    "Pick a point from an earlier turn and share your opinion on it, then ask for your partner's view.";

}  // namespace

std::string_view state_name(SessionState s) noexcept {
  switch (s) {
    case SessionState::WaitingForBoth: return "WaitingForBoth";
    case SessionState::Active: return "Active";
    case SessionState::Expired: return "Expired";
    case SessionState::Finalized: return "Finalized";
    case SessionState::Abandoned: return "Abandoned";
  }
  return "Abandoned";
}

std::optional<SessionState> parse_session_state(std::string_view s) noexcept {
  for (auto st : {SessionState::WaitingForBoth, SessionState::Active, SessionState::Expired,
                  SessionState::Finalized, SessionState::Abandoned})
    if (state_name(st) == s) return st;
  return std::nullopt;
}

bool is_allowed_transition(SessionState from, SessionState to) noexcept {
  using S = SessionState;
  switch (from) {
    case S::WaitingForBoth: return to == S::Active || to == S::Abandoned;
    case S::Active: return to == S::Finalized || to == S::Abandoned || to == S::Expired;
    case S::Expired: return to == S::Finalized || to == S::Abandoned;
    case S::Finalized:
    case S::Abandoned: return false;
  }
  return false;
}

LiveSession open_live_session(const SessionSlot& slot, const DeSession& session) {
  LiveSession s;
  s.slot_id = slot.slot_id;
  s.paper_id = session.paper_id;
  s.de_participant_id = session.de_participant_id;
  s.p_participant_id = slot.booked_p_participant_id;
  s.slot_start = slot.start_time;
  s.deadline = slot.start_time + slot.duration;
  return s;
}

std::optional<Role> event_audience(const SessionEvent& e) {
  return std::visit(
      [](const auto& ev) -> std::optional<Role> {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, PresenceChanged>) return other(ev.who);
        else if constexpr (std::is_same_v<T, NoFactWarning>) return Role::DomainExpert;
        else if constexpr (std::is_same_v<T, HintEvent>) return ev.target_role;
        else return std::nullopt;
      },
      e);
}

std::optional<Role> role_of(const LiveSession& s, const std::string& participant_id) {
  if (participant_id == s.de_participant_id) return Role::DomainExpert;
  if (s.p_participant_id && participant_id == *s.p_participant_id) return Role::Proponent;
  return std::nullopt;
}

JoinResult join_slot(LiveSession& s, const std::string& participant_id, Timestamp now,
                     const SessionTiming& timing) {
  auto role = role_of(s, participant_id);
  if (!role) throw Error(ErrorCode::NotYourSlot, "you are not scheduled in slot " + s.slot_id);
  if (s.is_closed() || now < s.slot_start - timing.join_grace || now >= s.deadline)
    throw Error(ErrorCode::SlotWindowClosed, "slot " + s.slot_id + " is not open for joining");
  if (s.is_present(*role)) throw Error(ErrorCode::AlreadyJoined, "already connected to this slot");

  s.present[idx(*role)] = true;
  s.disconnected_at[idx(*role)].reset();
  if (s.state == SessionState::WaitingForBoth && s.is_present(Role::Proponent) &&
      s.is_present(Role::DomainExpert)) {
    set_state(s, SessionState::Active);
    s.started_at = now;
  }
  return {*role, {PresenceChanged{*role, true}}};
}

std::vector<SessionEvent> leave_slot(LiveSession& s, Role role, Timestamp now) {
  if (!s.is_present(role)) return {};
  s.present[idx(role)] = false;
  s.disconnected_at[idx(role)] = now;
  return {PresenceChanged{role, false}};
}

Paper visible_paper(Role role, const Paper& paper) {
  if (role == Role::DomainExpert) return paper;
  Paper view;
  view.paper_id = paper.paper_id;
  view.title = paper.title;
  view.sections.push_back({SectionKind::Title, {paper.title}});
  return view;
}

PostResult post_sentences(LiveSession& s, Role role, std::vector<SentenceUnit> sentences,
                          const std::vector<FactAnchor>& facts, const Paper& paper, Timestamp now) {
  if (s.state != SessionState::Active)
    throw Error(ErrorCode::SessionNotActive, "session is " + std::string(state_name(s.state)));
  if (now >= s.deadline) throw Error(ErrorCode::PastDeadline, "the slot has ended");

  Message m;
  m.message_id = s.slot_id + ".m" + std::to_string(s.transcript.size());
  m.role = role;
  m.sentences = std::move(sentences);
  m.facts = facts;
  m.sent_at = now;
  if (!s.transcript.empty() && m.sent_at <= s.transcript.back().sent_at)
    m.sent_at = s.transcript.back().sent_at + std::chrono::milliseconds{1};
  m.no_fact_warning = validate_message(m, paper).no_fact_warning;

  s.transcript.push_back(m);
  PostResult result{m, {MessagePosted{m}}};
  if (m.no_fact_warning) result.events.emplace_back(NoFactWarning{});
  return result;
}

PostResult post_message(LiveSession& s, Role role, std::string_view raw_text,
                        const std::vector<FactAnchor>& facts, const Paper& paper, Timestamp now) {
  std::vector<SentenceUnit> sentences;
  for (auto& text : segment_sentences(raw_text)) sentences.push_back({std::move(text), std::nullopt});
  return post_sentences(s, role, std::move(sentences), facts, paper, now);
}

void signal_end(LiveSession& s, Role role) {
  if (s.state != SessionState::Active)
    throw Error(ErrorCode::SessionNotActive, "session is " + std::string(state_name(s.state)));
  s.end_signaled[idx(role)] = true;
}

std::optional<HintEvent> issue_hint(LiveSession& s, Timestamp now, const SessionTiming& timing) {
  if (s.state != SessionState::Active || timing.hint_window_turns == 0) return std::nullopt;
  const auto turns = derive_turns(s.transcript);
  const std::size_t k = timing.hint_window_turns;
  if (turns.size() < k || turns.size() < s.hinted_at_turns + k) return std::nullopt;

  std::array<std::size_t, 2> sentences{};
  for (std::size_t i = turns.size() - k; i < turns.size(); ++i) {
    for (const Message* m : {&turns[i].p_message, &turns[i].de_message}) {
      for (const auto& sent : m->sentences)
        if (sent.intent && intent_group(*sent.intent) == IntentGroup::Argumentative) return std::nullopt;
      sentences[idx(m->role)] += m->sentences.size();
    }
  }
  const Role quieter = sentences[idx(Role::Proponent)] < sentences[idx(Role::DomainExpert)]
                           ? Role::Proponent
                           : Role::DomainExpert;
  s.hinted_at_turns = turns.size();
  return HintEvent{quieter,
                   std::string(quieter == Role::Proponent ? kHintForProponent : kHintForExpert), now};
}

void tick(LiveSession& s, Timestamp now, const SessionTiming& timing) {
  if (s.state != SessionState::Active) return;
  // timeouts only count while the slot is still running
  const Timestamp t = std::min(now, s.deadline);
  if (reply_timed_out(s, t, timing) || disconnect_timed_out(s, t, timing)) s.abrupt_end = true;
  if (now >= s.deadline) set_state(s, SessionState::Expired);
}

bool is_finalizable(const LiveSession& s, Timestamp now, const SessionTiming& timing) {
  switch (s.state) {
    case SessionState::WaitingForBoth:
      return now >= s.deadline;
    case SessionState::Active: {
      const Timestamp t = std::min(now, s.deadline);
      return now >= s.deadline || s.abrupt_end || (s.end_signaled[0] && s.end_signaled[1]) ||
             reply_timed_out(s, t, timing) || disconnect_timed_out(s, t, timing);
    }
    case SessionState::Expired:
      return true;
    case SessionState::Finalized:
    case SessionState::Abandoned:
      return false;
  }
  return false;
}

FinalizeOutcome finalize(LiveSession& s, Timestamp now, const SessionTiming& timing) {
  if (s.is_closed()) throw Error(ErrorCode::SessionNotActive, "session already closed");
  tick(s, now, timing);
  if (!is_finalizable(s, now, timing))
    throw Error(ErrorCode::SessionStillOpen, "session " + s.slot_id + " is still running");

  FinalizeOutcome out;
  if (s.state == SessionState::WaitingForBoth) {
    out.reason = "no_show";
  } else if (s.abrupt_end) {
    out.reason = "abrupt_end";
  } else if (s.transcript.size() < kMinFinalizedMessages) {
    out.reason = "too_short";
  } else {
    out.reason = s.state == SessionState::Expired ? "deadline" : "completed";
    Dialogue d;
    d.dialogue_id = "d" + s.slot_id;
    d.paper_id = s.paper_id;
    d.slot_id = s.slot_id;
    d.messages = s.transcript;
    d.finalized = true;
    out.dialogue = std::move(d);
  }
  out.final_state = out.dialogue ? SessionState::Finalized : SessionState::Abandoned;
  set_state(s, out.final_state);
  s.close_reason = out.reason;
  out.events.emplace_back(SessionClosed{out.final_state, out.reason});
  return out;
}

}  // namespace forge
