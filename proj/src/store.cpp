#include "forge/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <set>
#include <sstream>

#include "forge/corpus_json.hpp"
#include "forge/error.hpp"

namespace forge {

using nlohmann::json;
namespace jc = json_codec;

namespace {

constexpr int kSnapshotVersion = 1;

json opt_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }
json opt_time(const std::optional<Timestamp>& t) { return t ? json(to_epoch_ms(*t)) : json(nullptr); }

std::optional<std::string> get_opt_string(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}
std::optional<Timestamp> get_opt_time(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return from_epoch_ms(v.get<std::int64_t>());
}
Timestamp get_time(const json& j, const char* key) { return from_epoch_ms(j.at(key).get<std::int64_t>()); }

template <class Enum, class Parse>
Enum get_enum(const json& j, const char* key, Parse parse) {
  auto v = parse(j.at(key).get<std::string>());
  if (!v) throw Error(ErrorCode::ParseError, std::string("bad enum value for ") + key, key);
  return *v;
}

json calendar_json(const StudyCalendar& c) {
  json deadlines = json::array();
  for (auto d : c.deadlines) deadlines.push_back(to_epoch_ms(d));
  return {{"phase", phase_name(c.phase)}, {"deadlines", deadlines}};
}
StudyCalendar calendar_from(const json& j) {
  StudyCalendar c;
  c.phase = get_enum<StudyPhase>(j, "phase", parse_phase);
  const json& d = j.at("deadlines");
  if (d.size() != c.deadlines.size()) throw Error(ErrorCode::ParseError, "expected 4 deadlines", "deadlines");
  for (std::size_t i = 0; i < c.deadlines.size(); ++i) c.deadlines[i] = from_epoch_ms(d[i].get<std::int64_t>());
  return c;
}

json participant_json(const Participant& p) {
  return {{"participant_id", p.participant_id}, {"full_name", p.full_name}, {"email", p.email},
          {"auth_code", p.auth_code}, {"proposed_paper_ids", p.proposed_paper_ids}};
}
Participant participant_from(const json& j) {
  return {j.at("participant_id").get<std::string>(), j.at("full_name").get<std::string>(),
          j.at("email").get<std::string>(), j.at("auth_code").get<std::string>(),
          j.at("proposed_paper_ids").get<std::vector<std::string>>()};
}

json session_json(const DeSession& s) {
  return {{"session_id", s.session_id}, {"paper_id", s.paper_id}, {"de_participant_id", s.de_participant_id},
          {"start_time", to_epoch_ms(s.start_time)}, {"duration_minutes", s.duration.count()}};
}
DeSession session_from(const json& j) {
  return {j.at("session_id").get<std::string>(), j.at("paper_id").get<std::string>(),
          j.at("de_participant_id").get<std::string>(), get_time(j, "start_time"),
          Minutes{j.at("duration_minutes").get<std::int64_t>()}};
}

json slot_json(const SessionSlot& s) {
  return {{"slot_id", s.slot_id}, {"session_id", s.session_id}, {"slot_index", s.slot_index},
          {"start_time", to_epoch_ms(s.start_time)}, {"duration_minutes", s.duration.count()},
          {"booked_p_participant_id", opt_string(s.booked_p_participant_id)}};
}
SessionSlot slot_from(const json& j) {
  return {j.at("slot_id").get<std::string>(), j.at("session_id").get<std::string>(),
          j.at("slot_index").get<std::size_t>(), get_time(j, "start_time"),
          Minutes{j.at("duration_minutes").get<std::int64_t>()}, get_opt_string(j, "booked_p_participant_id")};
}

std::string_view kind_name(NotificationKind k) {
  return k == NotificationKind::PhaseAdvance ? "PhaseAdvance" : "SlotReminder";
}
std::optional<NotificationKind> parse_kind(std::string_view s) {
  if (s == "PhaseAdvance") return NotificationKind::PhaseAdvance;
  if (s == "SlotReminder") return NotificationKind::SlotReminder;
  return std::nullopt;
}

json notification_json(const Notification& n) {
  return {{"notification_id", n.notification_id},
          {"recipient_participant_id", n.recipient_participant_id},
          {"slot_id", opt_string(n.slot_id)},
          {"fire_at", to_epoch_ms(n.fire_at)},
          {"kind", kind_name(n.kind)},
          {"delivered", n.delivered},
          {"phase", n.phase ? json(phase_name(*n.phase)) : json(nullptr)}};
}
Notification notification_from(const json& j) {
  Notification n;
  n.notification_id = j.at("notification_id").get<std::string>();
  n.recipient_participant_id = j.at("recipient_participant_id").get<std::string>();
  n.slot_id = get_opt_string(j, "slot_id");
  n.fire_at = get_time(j, "fire_at");
  n.kind = get_enum<NotificationKind>(j, "kind", parse_kind);
  n.delivered = j.at("delivered").get<bool>();
  if (!j.at("phase").is_null()) n.phase = get_enum<StudyPhase>(j, "phase", parse_phase);
  return n;
}

json live_json(const LiveSession& s) {
  json transcript = json::array();
  for (const auto& m : s.transcript) {
    json mj = jc::to_json(m);
    mj["no_fact_warning"] = m.no_fact_warning;
    transcript.push_back(std::move(mj));
  }
  json history = json::array();
  for (auto st : s.history) history.push_back(state_name(st));
  return {{"slot_id", s.slot_id},
          {"paper_id", s.paper_id},
          {"de_participant_id", s.de_participant_id},
          {"p_participant_id", opt_string(s.p_participant_id)},
          {"slot_start", to_epoch_ms(s.slot_start)},
          {"deadline", to_epoch_ms(s.deadline)},
          {"state", state_name(s.state)},
          {"present", {s.present[0], s.present[1]}},
          {"transcript", std::move(transcript)},
          {"started_at", opt_time(s.started_at)},
          {"end_signaled", {s.end_signaled[0], s.end_signaled[1]}},
          {"disconnected_at", {opt_time(s.disconnected_at[0]), opt_time(s.disconnected_at[1])}},
          {"abrupt_end", s.abrupt_end},
          {"hinted_at_turns", s.hinted_at_turns},
          {"history", std::move(history)},
          {"close_reason", s.close_reason}};
}
LiveSession live_from(const json& j) {
  LiveSession s;
  s.slot_id = j.at("slot_id").get<std::string>();
  s.paper_id = j.at("paper_id").get<std::string>();
  s.de_participant_id = j.at("de_participant_id").get<std::string>();
  s.p_participant_id = get_opt_string(j, "p_participant_id");
  s.slot_start = get_time(j, "slot_start");
  s.deadline = get_time(j, "deadline");
  s.state = get_enum<SessionState>(j, "state", parse_session_state);
  s.present = {j.at("present").at(0).get<bool>(), j.at("present").at(1).get<bool>()};
  const json& transcript = j.at("transcript");
  for (std::size_t i = 0; i < transcript.size(); ++i) {
    Message m = jc::message_from_json(transcript[i], "transcript[" + std::to_string(i) + "]");
    m.no_fact_warning = transcript[i].at("no_fact_warning").get<bool>();
    s.transcript.push_back(std::move(m));
  }
  s.started_at = get_opt_time(j, "started_at");
  s.end_signaled = {j.at("end_signaled").at(0).get<bool>(), j.at("end_signaled").at(1).get<bool>()};
  for (std::size_t r = 0; r < 2; ++r) {
    const json& d = j.at("disconnected_at").at(r);
    s.disconnected_at[r] = d.is_null() ? std::nullopt : std::optional{from_epoch_ms(d.get<std::int64_t>())};
  }
  s.abrupt_end = j.at("abrupt_end").get<bool>();
  s.hinted_at_turns = j.at("hinted_at_turns").get<std::size_t>();
  s.history.clear();
  for (const auto& h : j.at("history")) {
    auto st = parse_session_state(h.get<std::string>());
    if (!st) throw Error(ErrorCode::ParseError, "bad session state in history", "history");
    s.history.push_back(*st);
  }
  s.close_reason = j.at("close_reason").get<std::string>();
  return s;
}

json dialogue_json(const Dialogue& d) {
  json j = jc::to_json(d);
  for (std::size_t i = 0; i < d.messages.size(); ++i)
    j["messages"][i]["no_fact_warning"] = d.messages[i].no_fact_warning;
  return j;
}
Dialogue dialogue_from(const json& j) {
  Dialogue d = jc::dialogue_from_json(j, "dialogue");
  for (std::size_t i = 0; i < d.messages.size(); ++i)
    d.messages[i].no_fact_warning = j.at("messages").at(i).at("no_fact_warning").get<bool>();
  return d;
}

json state_json(const StudyState& s) {
  json participants = json::array(), papers = json::array(), sessions = json::array(),
       slots = json::array(), notifications = json::array(), live = json::array(),
       corpus = json::array();
  for (const auto& [id, v] : s.scheduler.participants) participants.push_back(participant_json(v));
  for (const auto& [id, v] : s.scheduler.papers) papers.push_back(jc::to_json(v));
  for (const auto& [id, v] : s.scheduler.sessions) sessions.push_back(session_json(v));
  for (const auto& [id, v] : s.scheduler.slots) slots.push_back(slot_json(v));
  for (const auto& [id, v] : s.scheduler.notifications) notifications.push_back(notification_json(v));
  for (const auto& [id, v] : s.live) live.push_back(live_json(v));
  for (const auto& d : s.corpus) corpus.push_back(dialogue_json(d));
  return {{"calendar", calendar_json(s.scheduler.calendar)},
          {"next_id", s.scheduler.next_id},
          {"participants", participants},
          {"papers", papers},
          {"sessions", sessions},
          {"slots", slots},
          {"notifications", notifications},
          {"live", live},
          {"corpus", corpus}};
}

StudyState state_from(const json& j) {
  StudyState s;
  s.scheduler.calendar = calendar_from(j.at("calendar"));
  s.scheduler.next_id = j.at("next_id").get<std::uint64_t>();
  for (const auto& v : j.at("participants")) apply(s, {"participant", v});
  for (const auto& v : j.at("papers")) apply(s, {"paper", v});
  for (const auto& v : j.at("sessions")) apply(s, {"session", v});
  for (const auto& v : j.at("slots")) apply(s, {"slot", v});
  for (const auto& v : j.at("notifications")) apply(s, {"notification", v});
  for (const auto& v : j.at("live")) apply(s, {"live", v});
  for (const auto& v : j.at("corpus")) apply(s, {"dialogue", v});
  return s;
}

void fsync_file(std::FILE* f) {
  std::fflush(f);
  ::fsync(::fileno(f));
}

}  // namespace

Corpus corpus_of(const StudyState& state) {
  Corpus c;
  for (const auto& d : state.corpus) {
    c.dialogues.push_back(d);
    if (auto it = state.scheduler.papers.find(d.paper_id); it != state.scheduler.papers.end())
      c.papers.emplace(it->first, it->second);
  }
  return c;
}

std::string export_corpus(const Corpus& corpus) {
  return jc::corpus_to_json(corpus).dump() + "\n";
}

Corpus import_corpus(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed corpus JSON: ") + e.what());
  }
  Corpus c = jc::corpus_from_json(j);
  check_corpus(c);
  return c;
}

std::vector<StoreRecord> import_records(const StudyState& state, const Corpus& corpus) {
  std::vector<StoreRecord> out;
  for (const auto& [id, paper] : corpus.papers) {
    auto it = state.scheduler.papers.find(id);
    if (it == state.scheduler.papers.end()) {
      out.push_back(put(paper));
    } else if (it->second.title != paper.title || it->second.sections != paper.sections) {
      throw Error(ErrorCode::IntegrityError, "paper " + id + " already exists with different content",
                  "papers." + id);
    }
  }
  for (const auto& d : corpus.dialogues) {
    auto it = std::find_if(state.corpus.begin(), state.corpus.end(),
                           [&](const Dialogue& x) { return x.dialogue_id == d.dialogue_id; });
    Dialogue copy = d;
    copy.finalized = true;
    if (it == state.corpus.end()) out.push_back(put(copy));
    else if (it->messages != d.messages || it->paper_id != d.paper_id)
      throw Error(ErrorCode::IntegrityError, "dialogue " + d.dialogue_id + " already exists with different content",
                  "dialogues." + d.dialogue_id);
  }
  return out;
}

void check_integrity(const StudyState& state) {
  const auto& s = state.scheduler;
  auto fail = [](const std::string& what, const std::string& path) {
    throw Error(ErrorCode::IntegrityError, what, path);
  };
  for (const auto& [id, p] : s.participants)
    for (const auto& paper_id : p.proposed_paper_ids)
      if (!s.papers.contains(paper_id)) fail("unknown proposed paper " + paper_id, "participants." + id);
  for (const auto& [id, p] : s.papers) {
    check_paper(p, "papers." + id);
    if (!s.participants.contains(p.owner_participant_id)) fail("unknown owner", "papers." + id + ".owner");
  }
  for (const auto& [id, ses] : s.sessions) {
    if (!s.papers.contains(ses.paper_id)) fail("unknown paper", "sessions." + id + ".paper_id");
    if (!s.participants.contains(ses.de_participant_id))
      fail("unknown DE", "sessions." + id + ".de_participant_id");
  }
  for (const auto& [id, slot] : s.slots) {
    if (!s.sessions.contains(slot.session_id)) fail("unknown session", "slots." + id + ".session_id");
    if (slot.booked_p_participant_id && !s.participants.contains(*slot.booked_p_participant_id))
      fail("unknown P", "slots." + id + ".booked_p_participant_id");
  }
  for (const auto& [id, n] : s.notifications) {
    if (!s.participants.contains(n.recipient_participant_id))
      fail("unknown recipient", "notifications." + id);
    if (n.slot_id && !s.slots.contains(*n.slot_id)) fail("unknown slot", "notifications." + id + ".slot_id");
  }
  for (const auto& [id, live] : state.live) {
    if (!s.slots.contains(id)) fail("unknown slot", "live." + id);
    if (!s.papers.contains(live.paper_id)) fail("unknown paper", "live." + id + ".paper_id");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < state.corpus.size(); ++i) {
    const auto& d = state.corpus[i];
    const std::string path = "corpus[" + std::to_string(i) + "]";
    if (!seen.insert(d.dialogue_id).second) fail("duplicate dialogue", path);
    if (!d.finalized) fail("corpus holds only finalized dialogues", path + ".finalized");
    auto paper = s.papers.find(d.paper_id);
    if (paper == s.papers.end()) fail("unknown paper", path + ".paper_id");
    check_dialogue(d, paper->second, path);
  }
}

StoreRecord put(const StudyCalendar& calendar) { return {"calendar", calendar_json(calendar)}; }
StoreRecord put_counter(std::uint64_t next_id) { return {"counter", next_id}; }
StoreRecord put(const Participant& p) { return {"participant", participant_json(p)}; }
StoreRecord put(const Paper& p) { return {"paper", jc::to_json(p)}; }
StoreRecord put(const DeSession& s) { return {"session", session_json(s)}; }
StoreRecord put(const SessionSlot& s) { return {"slot", slot_json(s)}; }
StoreRecord put(const Notification& n) { return {"notification", notification_json(n)}; }
StoreRecord put(const LiveSession& s) { return {"live", live_json(s)}; }
StoreRecord put(const Dialogue& d) { return {"dialogue", dialogue_json(d)}; }

void apply(StudyState& state, const StoreRecord& r) {
  auto& s = state.scheduler;
  const json& v = r.value;
  if (r.kind == "calendar") {
    s.calendar = calendar_from(v);
  } else if (r.kind == "counter") {
    s.next_id = v.get<std::uint64_t>();
  } else if (r.kind == "participant") {
    auto p = participant_from(v);
    s.participants.insert_or_assign(p.participant_id, std::move(p));
  } else if (r.kind == "paper") {
    auto p = jc::paper_from_json(v, "paper");
    s.papers.insert_or_assign(p.paper_id, std::move(p));
  } else if (r.kind == "session") {
    auto x = session_from(v);
    s.sessions.insert_or_assign(x.session_id, std::move(x));
  } else if (r.kind == "slot") {
    auto x = slot_from(v);
    s.slots.insert_or_assign(x.slot_id, std::move(x));
  } else if (r.kind == "notification") {
    auto x = notification_from(v);
    s.notifications.insert_or_assign(x.notification_id, std::move(x));
  } else if (r.kind == "live") {
    auto x = live_from(v);
    state.live.insert_or_assign(x.slot_id, std::move(x));
  } else if (r.kind == "dialogue") {
    auto d = dialogue_from(v);
    auto it = std::find_if(state.corpus.begin(), state.corpus.end(),
                           [&](const Dialogue& x) { return x.dialogue_id == d.dialogue_id; });
    if (it != state.corpus.end()) *it = std::move(d);
    else state.corpus.push_back(std::move(d));
  } else {
    throw Error(ErrorCode::ParseError, "unknown record kind " + r.kind);
  }
}

namespace {

template <typename Map>
void diff_map(const Map& before, const Map& after, std::vector<StoreRecord>& out) {
  for (const auto& [id, value] : after) {
    auto it = before.find(id);
    if (it == before.end() || !(it->second == value)) out.push_back(put(value));
  }
}

}  // namespace

std::vector<StoreRecord> diff_records(const SchedulerState& before, const SchedulerState& after) {
  std::vector<StoreRecord> out;
  if (!(before.calendar == after.calendar)) out.push_back(put(after.calendar));
  if (before.next_id != after.next_id) out.push_back(put_counter(after.next_id));
  diff_map(before.participants, after.participants, out);
  diff_map(before.papers, after.papers, out);
  diff_map(before.sessions, after.sessions, out);
  diff_map(before.slots, after.slots, out);
  diff_map(before.notifications, after.notifications, out);
  return out;
}

std::string snapshot(const StudyState& state, std::uint64_t last_seq) {
  return json{{"version", kSnapshotVersion}, {"last_seq", last_seq}, {"state", state_json(state)}}.dump() + "\n";
}

StudyState restore_snapshot(std::string_view bytes, std::uint64_t* last_seq) {
  if (last_seq) *last_seq = 0;
  if (trim(bytes).empty()) return StudyState{};
  try {
    json j = json::parse(bytes.begin(), bytes.end());
    if (j.at("version").get<int>() != kSnapshotVersion)
      throw Error(ErrorCode::CorruptSnapshot, "unsupported snapshot version");
    if (last_seq) *last_seq = j.at("last_seq").get<std::uint64_t>();
    return state_from(j.at("state"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptSnapshot) throw;
    throw Error(ErrorCode::CorruptSnapshot, std::string("corrupt snapshot: ") + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptSnapshot, std::string("corrupt snapshot: ") + e.what());
  }
}

std::string encode_log_line(std::uint64_t seq, const std::vector<StoreRecord>& batch) {
  json puts = json::array();
  for (const auto& r : batch) puts.push_back({{"kind", r.kind}, {"value", r.value}});
  return json{{"seq", seq}, {"puts", std::move(puts)}}.dump() + "\n";
}

std::uint64_t replay_log(StudyState& state, std::string_view log_bytes, std::uint64_t after_seq,
                         std::size_t* valid_bytes) {
  std::uint64_t last = after_seq;
  if (valid_bytes) *valid_bytes = 0;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < log_bytes.size()) {
    std::size_t nl = log_bytes.find('\n', pos);
    const bool complete = nl != std::string_view::npos;
    std::string_view line = log_bytes.substr(pos, complete ? nl - pos : std::string_view::npos);
    const bool is_last = !complete || nl + 1 >= log_bytes.size();
    pos = complete ? nl + 1 : log_bytes.size();
    ++line_no;
    if (!complete) break;  // torn tail
    if (trim(line).empty()) {
      if (valid_bytes) *valid_bytes = pos;
      continue;
    }

    std::vector<StoreRecord> batch;
    std::uint64_t seq = 0;
    try {
      json j = json::parse(line.begin(), line.end());
      seq = j.at("seq").get<std::uint64_t>();
      for (const auto& p : j.at("puts")) batch.push_back({p.at("kind").get<std::string>(), p.at("value")});
    } catch (const json::exception& e) {
      if (is_last) break;
      throw Error(ErrorCode::CorruptSnapshot,
                  "corrupt log record at line " + std::to_string(line_no) + ": " + e.what());
    }
    if (seq <= last) {
      if (valid_bytes) *valid_bytes = pos;
      continue;
    }
    StudyState next = state;
    try {
      for (const auto& r : batch) apply(next, r);
    } catch (const std::exception& e) {
      if (is_last) break;
      throw Error(ErrorCode::CorruptSnapshot,
                  "unreadable log record at line " + std::to_string(line_no) + ": " + e.what());
    }
    state = std::move(next);
    last = seq;
    if (valid_bytes) *valid_bytes = pos;
  }
  return last;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  std::fwrite(bytes.data(), 1, bytes.size(), f);
  fsync_file(f);
  std::fclose(f);
}

Store::Store(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

Store::~Store() {
  if (log_) std::fclose(log_);
}

StudyState Store::restore() {
  std::uint64_t seq = 0;
  StudyState state = restore_snapshot(read_file(snapshot_path()), &seq);
  const std::string log = read_file(log_path());
  std::size_t keep = 0;
  seq_ = replay_log(state, log, seq, &keep);
  // drop a torn tail so later appends start on a clean line
  if (keep != log.size()) std::filesystem::resize_file(log_path(), keep);
  open_log();
  return state;
}

void Store::open_log() {
  if (log_) std::fclose(log_);
  log_ = std::fopen(log_path().c_str(), "ab");
  if (!log_) throw std::runtime_error("cannot open " + log_path().string());
}

void Store::append(const std::vector<StoreRecord>& batch) {
  if (batch.empty()) return;
  if (!log_) open_log();
  const std::string line = encode_log_line(++seq_, batch);
  std::fwrite(line.data(), 1, line.size(), log_);
  fsync_file(log_);
}

void Store::compact(const StudyState& state) {
  const auto tmp = dir_ / "snapshot.json.tmp";
  write_file(tmp, snapshot(state, seq_));
  std::filesystem::rename(tmp, snapshot_path());
  if (log_) std::fclose(log_);
  log_ = std::fopen(log_path().c_str(), "wb");
  if (!log_) throw std::runtime_error("cannot open " + log_path().string());
  fsync_file(log_);
}

}  // namespace forge
