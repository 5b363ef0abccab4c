#include <doctest.h>

#include <memory>

#include "forge/error.hpp"
#include "forge/store.hpp"
#include "support.hpp"

using namespace forge;
using testing::at_minutes;
using testing::slurp;
using json = nlohmann::json;

namespace {

Error error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an Error");
  return Error(ErrorCode::InvalidArgument, "");
}

// A scheduler state built by random registrations, sessions and bookings.
StudyState random_state(std::mt19937& rng) {
  auto counter = std::make_shared<int>(0);
  Scheduler s({}, {}, [counter] { return "c" + std::to_string((*counter)++); });
  s.set_deadlines({at_minutes(1000), at_minutes(2000), at_minutes(3000), at_minutes(4000)});
  const int n = 2 + static_cast<int>(rng() % 5);
  std::vector<Participant> people;
  for (int i = 0; i < n; ++i)
    people.push_back(s.register_participant("N" + std::to_string(i), "e" + std::to_string(i) + "@x",
                                            {{"Title " + std::to_string(rng() % 100), {"A s."}, {"I s."}, true}}));
  s.advance_phase(at_minutes(1000));
  for (int i = 0; i < n; ++i)
    if (rng() % 3)
      s.create_de_session(people[i].participant_id, people[i].proposed_paper_ids[0],
                          at_minutes(5000 + 60 * static_cast<long>(rng() % 20)));
  s.advance_phase(at_minutes(2000));
  std::vector<std::string> slot_ids;
  for (const auto& [id, slot] : s.state().slots) slot_ids.push_back(id);
  for (int k = 0; k < 10 && !slot_ids.empty(); ++k) {
    try {
      s.book_slot_as_p(people[rng() % n].participant_id, slot_ids[rng() % slot_ids.size()]);
    } catch (const Error&) {
    }
  }
  s.due_notifications(at_minutes(3000 + static_cast<long>(rng() % 5000)));

  StudyState st;
  st.scheduler = s.state();
  for (const auto& [id, slot] : st.scheduler.slots) {
    if (!slot.booked_p_participant_id || rng() % 2) continue;
    auto live = open_live_session(slot, st.scheduler.sessions.at(slot.session_id));
    join_slot(live, live.de_participant_id, slot.start_time);
    join_slot(live, *live.p_participant_id, slot.start_time + std::chrono::seconds(5));
    const Paper& paper = st.scheduler.papers.at(live.paper_id);
    post_message(live, Role::Proponent, "Why this? And how.", {}, paper, slot.start_time + std::chrono::seconds(30));
    post_message(live, Role::DomainExpert, "Because.", {{SectionKind::Abstract, 0}}, paper,
                 slot.start_time + std::chrono::seconds(60));
    if (rng() % 2) leave_slot(live, Role::DomainExpert, slot.start_time + std::chrono::seconds(70));
    st.live.emplace(id, std::move(live));
  }
  return st;
}

}  // namespace

TEST_CASE("empty corpus exports with sorted keys") {
  CHECK(export_corpus(Corpus{}) == "{\"dialogues\":[],\"papers\":[]}\n");
  CHECK(import_corpus(export_corpus(Corpus{})) == Corpus{});
}

TEST_CASE("fixture export matches the canonical golden bytes") {
  const Corpus c = testing::fixture_corpus();
  const std::string bytes = export_corpus(c);
  CHECK(bytes == slurp(testing::fixtures_dir() / "corpus.canonical.json"));
  CHECK(import_corpus(bytes) == c);
  CHECK(export_corpus(import_corpus(bytes)) == bytes);
  CHECK(bytes.find("email") == std::string::npos);
  CHECK(bytes.find("full_name") == std::string::npos);
}

TEST_CASE("three facts on one message is an integrity error with a path") {
  json j = json::parse(slurp(testing::fixtures_dir() / "corpus.json"));
  std::size_t di = 0, mi = 0;
  bool found = false;
  for (di = 0; di < j["dialogues"].size() && !found; ++di)
    for (mi = 0; mi < j["dialogues"][di]["messages"].size(); ++mi)
      if (j["dialogues"][di]["messages"][mi]["role"] == "DE") {
        found = true;
        break;
      }
  REQUIRE(found);
  --di;
  j["dialogues"][di]["messages"][mi]["facts"] = json::array({json{{"section", "title"}, {"index", 0}},
                                                             json{{"section", "abstract"}, {"index", 0}},
                                                             json{{"section", "abstract"}, {"index", 1}}});
  auto e = error_of([&] { import_corpus(j.dump()); });
  CHECK(e.code() == ErrorCode::IntegrityError);
  CHECK(e.path() == "dialogues[" + std::to_string(di) + "].messages[" + std::to_string(mi) + "].facts");
}

TEST_CASE("truncated corpus is a parse error") {
  const std::string bytes = export_corpus(testing::fixture_corpus());
  for (std::size_t cut : {std::size_t{1}, bytes.size() / 3, bytes.size() / 2, bytes.size() - 3})
    CHECK(error_of([&] { import_corpus(bytes.substr(0, cut)); }).code() == ErrorCode::ParseError);
  CHECK(error_of([&] { import_corpus("[]"); }).code() == ErrorCode::ParseError);
}

TEST_CASE("dialogue on an unknown paper is an integrity error") {
  json j = json::parse(slurp(testing::fixtures_dir() / "corpus.json"));
  j["dialogues"][0]["paper_id"] = "nope";
  auto e = error_of([&] { import_corpus(j.dump()); });
  CHECK(e.code() == ErrorCode::IntegrityError);
  CHECK(e.path().rfind("dialogues[0]", 0) == 0);
}

TEST_CASE("duplicate dialogue ids are rejected") {
  json j = json::parse(slurp(testing::fixtures_dir() / "corpus.json"));
  j["dialogues"][1]["id"] = j["dialogues"][0]["id"];
  CHECK(error_of([&] { import_corpus(j.dump()); }).code() == ErrorCode::IntegrityError);
}

TEST_CASE("snapshot round-trips random states") {
  std::mt19937 rng(11);
  for (int round = 0; round < 60; ++round) {
    StudyState st = random_state(rng);
    for (const auto& d : testing::fixture_corpus().dialogues)
      if (rng() % 2) st.corpus.push_back(d);
    std::uint64_t seq = 0;
    const std::string bytes = snapshot(st, 17);
    CHECK(restore_snapshot(bytes, &seq) == st);
    CHECK(seq == 17);
    CHECK(snapshot(restore_snapshot(bytes), 17) == bytes);
  }
}

TEST_CASE("empty snapshot restores a fresh state") {
  CHECK(restore_snapshot("") == StudyState{});
  CHECK(restore_snapshot(" \n") == StudyState{});
  CHECK(error_of([] { restore_snapshot("{\"version\":1"); }).code() == ErrorCode::CorruptSnapshot);
  CHECK(error_of([] { restore_snapshot("{\"version\":999,\"last_seq\":0,\"state\":{}}"); }).code() ==
        ErrorCode::CorruptSnapshot);
}

TEST_CASE("diff records rebuild the later state") {
  std::mt19937 rng(5);
  for (int round = 0; round < 40; ++round) {
    StudyState a = random_state(rng);
    StudyState b = random_state(rng);
    StudyState applied;
    applied.scheduler = a.scheduler;
    for (const auto& r : diff_records(a.scheduler, b.scheduler)) apply(applied, r);
    // entities are never deleted, so only ids present in both must agree
    for (const auto& [id, p] : b.scheduler.participants) CHECK(applied.scheduler.participants.at(id) == p);
    for (const auto& [id, s] : b.scheduler.slots) CHECK(applied.scheduler.slots.at(id) == s);
    CHECK(applied.scheduler.calendar == b.scheduler.calendar);
    CHECK(applied.scheduler.next_id == b.scheduler.next_id);
  }
  StudyState a = random_state(rng);
  CHECK(diff_records(a.scheduler, a.scheduler).empty());
}

TEST_CASE("log replay applies each batch and skips a torn tail") {
  std::mt19937 rng(9);
  StudyState target = random_state(rng);
  std::vector<StoreRecord> all = diff_records(SchedulerState{}, target.scheduler);
  for (const auto& [id, live] : target.live) all.push_back(put(live));

  std::string log;
  std::vector<std::size_t> ends;
  for (std::size_t i = 0; i < all.size(); ++i) {
    log += encode_log_line(i + 1, {all[i]});
    ends.push_back(log.size());
  }
  StudyState replayed;
  CHECK(replay_log(replayed, log) == all.size());
  CHECK(replayed == target);

  // every byte prefix recovers exactly the complete lines it holds
  for (std::size_t cut = 0; cut <= log.size(); cut += 1 + cut / 40) {
    StudyState st;
    std::size_t valid = 0;
    const auto last = replay_log(st, std::string_view(log).substr(0, cut), 0, &valid);
    const auto complete = static_cast<std::uint64_t>(std::upper_bound(ends.begin(), ends.end(), cut) - ends.begin());
    CHECK(last == complete);
    CHECK(valid == (complete ? ends[complete - 1] : 0));
  }

  // seq filter
  StudyState partial;
  CHECK(replay_log(partial, log, all.size()) == all.size());
  CHECK(partial == StudyState{});

  // garbage in the middle is corruption, not a torn tail
  std::string bad = log.substr(0, ends[0]) + "{oops\n" + log.substr(ends[0]);
  StudyState st;
  CHECK(error_of([&] { replay_log(st, bad); }).code() == ErrorCode::CorruptSnapshot);
}

TEST_CASE("store survives restart and crash truncation") {
  testing::TempDir dir;
  std::mt19937 rng(2);
  StudyState target = random_state(rng);
  auto records = diff_records(SchedulerState{}, target.scheduler);
  const std::size_t half = records.size() / 2;
  {
    Store store(dir.path());
    CHECK(store.restore() == StudyState{});
    store.append({records.begin(), records.begin() + static_cast<long>(half)});
    store.append({records.begin() + static_cast<long>(half), records.end()});
  }
  {
    Store store(dir.path());
    StudyState st = store.restore();
    CHECK(st.scheduler == target.scheduler);
    store.compact(st);
    CHECK(std::filesystem::file_size(store.log_path()) == 0);
  }
  {
    Store store(dir.path());
    StudyState st = store.restore();
    CHECK(st.scheduler == target.scheduler);
    Dialogue d = testing::fixture_corpus().dialogues[0];
    store.append({put(d)});
  }
  // simulate a crash in the middle of writing the next record
  {
    std::ofstream out(dir / "log.jsonl", std::ios::app | std::ios::binary);
    out << "{\"seq\":99,\"puts\":[{\"kind\":\"counter\",\"va";
  }
  {
    Store store(dir.path());
    StudyState st = store.restore();
    CHECK(st.scheduler == target.scheduler);
    REQUIRE(st.corpus.size() == 1);
    store.append({put_counter(12345)});
  }
  Store store(dir.path());
  CHECK(store.restore().scheduler.next_id == 12345);
}

TEST_CASE("import records add a corpus once") {
  const Corpus c = testing::fixture_corpus();
  StudyState st;
  auto recs = import_records(st, c);
  for (const auto& r : recs) apply(st, r);
  CHECK(st.corpus.size() == c.dialogues.size());
  CHECK(st.scheduler.papers.size() == c.papers.size());
  CHECK(corpus_of(st) == c);
  CHECK(import_records(st, c).empty());

  Corpus changed = c;
  changed.papers.begin()->second.title = "Different";
  CHECK(error_of([&] { import_records(st, changed); }).code() == ErrorCode::IntegrityError);
}

TEST_CASE("integrity check catches dangling references") {
  std::mt19937 rng(4);
  StudyState st = random_state(rng);
  check_integrity(st);
  REQUIRE_FALSE(st.scheduler.slots.empty());
  st.scheduler.slots.begin()->second.session_id = "ghost";
  auto e = error_of([&] { check_integrity(st); });
  CHECK(e.code() == ErrorCode::IntegrityError);
  CHECK(e.path().find(".session_id") != std::string::npos);
}
