#include <doctest.h>

#include <cmath>

#include "forge/baseline/harness.hpp"
#include "forge/baseline/metrics.hpp"
#include "forge/baseline/tfidf.hpp"
#include "forge/error.hpp"
#include "support.hpp"

using namespace forge;
using namespace forge::baseline;
using json = nlohmann::json;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

FactMethod oracle_method() {
  return [](std::span<const TurnSample> samples, const Corpus&) {
    std::vector<std::set<std::size_t>> out;
    for (const auto& s : samples) out.push_back(s.gold_facts);
    return out;
  };
}

FactMethod empty_method() {
  return [](std::span<const TurnSample> samples, const Corpus&) {
    return std::vector<std::set<std::size_t>>(samples.size());
  };
}

// n papers with one two-turn dialogue each.
Corpus synthetic(std::size_t n) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string pid = "paper" + std::to_string(i);
    c.papers.emplace(pid, make_paper(pid, "Title " + std::to_string(i), {"Abstract a.", "Abstract b."},
                                     {"Intro a.", "Intro b."}, "u"));
    Dialogue d{"d" + std::to_string(i), pid, {}, "s" + std::to_string(i) + ".0", true};
    for (int t = 0; t < 2; ++t) {
      d.messages.push_back(testing::msg(Role::Proponent, {{"Tell me about abstract?", IntentLabel::AskInfo}}));
      d.messages.push_back(testing::msg(Role::DomainExpert, {{"Abstract b says so.", IntentLabel::ReplyInfo}},
                                        {{SectionKind::Abstract, static_cast<std::size_t>(t)}}));
    }
    for (std::size_t m = 0; m < d.messages.size(); ++m) d.messages[m].message_id = d.dialogue_id + ".m" + std::to_string(m);
    c.dialogues.push_back(std::move(d));
  }
  return c;
}

}  // namespace

TEST_CASE("tfidf fit and embed") {
  std::vector<std::string> docs{"a b", "b c"};
  auto m = tfidf_fit(docs);
  REQUIRE(m.dimension() == 3);
  auto v = tfidf_embed(m, "b");
  const std::size_t b = m.vocabulary.at("b");
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == (i == b ? doctest::Approx(1.0) : doctest::Approx(0.0)));
  // idf of a term in one of two documents: ln(3/2) + 1
  CHECK(m.idf[m.vocabulary.at("a")] == doctest::Approx(std::log(1.5) + 1));
  CHECK(m.idf[b] == doctest::Approx(1.0));

  auto unseen = tfidf_embed(m, "zzz qqq");
  CHECK(l2_norm(unseen) == 0.0);
  CHECK(l2_norm(tfidf_embed(m, "a b")) == doctest::Approx(1.0).epsilon(1e-9));

  auto ab = tfidf_embed(m, "a b");
  const double ia = std::log(1.5) + 1;
  CHECK(ab[m.vocabulary.at("a")] == doctest::Approx(ia / std::sqrt(ia * ia + 1)));

  CHECK(code_of([] { tfidf_fit(std::vector<std::string>{"", "!!"}); }) == ErrorCode::EmptyFitSet);
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 0}) == 0.0);
}

TEST_CASE("rank and select facts") {
  std::vector<std::string> sents{"we measure annotation cost", "annotation speed is high", "speed matters",
                                 "unrelated words here"};
  auto m = tfidf_fit(sents);
  CHECK(select_facts("annotation speed", sents, m).front() == 1);

  std::vector<std::string> one{"only sentence"};
  CHECK(select_facts("only", one, tfidf_fit(one)) == std::vector<std::size_t>{0});

  std::vector<std::string> twins{"other text", "same words", "same words"};
  CHECK(select_facts("same words", twins, tfidf_fit(twins)) == std::vector<std::size_t>{1, 2});
  CHECK(select_facts("nothing matches", twins, tfidf_fit(twins)) == std::vector<std::size_t>{0, 1});

  std::vector<Vector> vs{{1, 0}, {0.6, 0.8}, {0, 1}};
  std::vector<double> q{0.8, 0.6};
  auto r = rank_by_cosine(q, vs, 2);
  CHECK(r == std::vector<std::size_t>{1, 0});
  std::vector<double> q3{8, 6};
  CHECK(rank_by_cosine(q3, vs, 2) == r);  // scale invariance
  CHECK(rank_by_cosine(q, vs, 5).size() == 3);
}

TEST_CASE("f1 metrics") {
  CHECK(fact_f1({1, 2}, {2, 3}) == 0.5);
  CHECK(fact_f1({1, 2}, {1, 2}) == 1.0);
  CHECK(fact_f1({1}, {2}) == 0.0);
  CHECK(fact_f1({}, {}) == 1.0);
  CHECK(fact_f1({}, {1}) == 0.0);
  CHECK(message_f1("a b c", "b c d") == doctest::Approx(2.0 / 3));
  CHECK(message_f1("Same text.", "same TEXT") == 1.0);
  CHECK(message_f1("x y", "z w") == 0.0);
  CHECK(message_f1("", "") == 1.0);
  CHECK(message_f1("", "a") == 0.0);
  // clipped counts: "a a a" vs "a b": overlap 1, P = 1/3, R = 1/2
  CHECK(message_f1("a a a", "a b") == doctest::Approx(0.4));
}

TEST_CASE("fold construction") {
  CHECK(code_of([] { make_folds(synthetic(3), 5); }) == ErrorCode::TooFewPapers);
  auto plan = make_folds(synthetic(20), 5, 7);
  REQUIRE(plan.folds.size() == 5);
  std::set<std::string> all;
  for (const auto& f : plan.folds) {
    CHECK(f.size() == 4);
    all.insert(f.begin(), f.end());
  }
  CHECK(all.size() == 20);
  CHECK(plan_to_json(plan) == plan_to_json(make_folds(synthetic(20), 5, 7)));
  CHECK(plan_to_json(plan) != plan_to_json(make_folds(synthetic(20), 5, 8)));

  const Corpus c = synthetic(20);
  for (std::size_t i = 0; i < plan.iterations.size(); ++i) {
    const auto& it = plan.iterations[i];
    std::set<std::string> train(it.train_papers.begin(), it.train_papers.end());
    for (const auto& p : plan.folds[i]) CHECK_FALSE(train.count(p));
    CHECK(train.size() == 16);
    CHECK(it.validation_dialogues.size() == 2);  // floor(4 / 2)
    CHECK(it.test_dialogues.size() == 2);
    for (const auto& d : it.test_dialogues) {
      auto dlg = std::find_if(c.dialogues.begin(), c.dialogues.end(), [&](const Dialogue& x) { return x.dialogue_id == d; });
      CHECK_FALSE(train.count(dlg->paper_id));
    }
  }
}

TEST_CASE("fold plan on the fixture matches the oracle") {
  const auto& e = testing::expected()["bench_facts"];
  auto plan = make_folds(testing::fixture_corpus());
  CHECK(json(plan.folds) == e["folds"]);
  for (std::size_t i = 0; i < plan.iterations.size(); ++i) {
    CHECK(json(plan.iterations[i].test_dialogues) == e["plan"][i]["test"]);
    CHECK(json(plan.iterations[i].validation_dialogues) == e["plan"][i]["validation"]);
  }
}

TEST_CASE("turn samples") {
  const Corpus c = testing::fixture_corpus();
  const Dialogue& d = c.dialogues.front();
  auto samples = turn_samples(d, c.papers.at(d.paper_id));
  REQUIRE_FALSE(samples.empty());
  CHECK(samples.size() == derive_turns(d.messages).size());
  CHECK(samples[0].turn_index == 0);
  CHECK(samples[0].history.empty() == (d.messages[0].role == Role::Proponent));
  auto j = sample_to_json(samples[1], c.papers.at(d.paper_id));
  for (const char* k : {"dialogue_id", "paper_id", "turn_index", "query", "history", "history_text",
                        "paper_sentences", "gold_response", "gold_facts"})
    CHECK(j.contains(k));
  CHECK(j["history_text"].get<std::string>().find(kHistorySeparator) != std::string::npos);
}

TEST_CASE("tfidf predictions match the oracle per sample") {
  const Corpus c = testing::fixture_corpus();
  std::map<std::pair<std::string, std::size_t>, json> expected;
  for (const auto& s : testing::expected()["tfidf_samples"])
    expected[{s["dialogue_id"], s["turn_index"]}] = s;
  auto method = tfidf_method();
  std::size_t compared = 0;
  for (const auto& d : c.dialogues) {
    auto samples = turn_samples(d, c.papers.at(d.paper_id));
    auto predicted = method(samples, c);
    REQUIRE(predicted.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& e = expected.at({d.dialogue_id, samples[i].turn_index});
      CAPTURE(d.dialogue_id);
      CAPTURE(i);
      CHECK(json(samples[i].gold_facts) == e["gold"]);
      CHECK(json(predicted[i]) == e["predicted"]);
      ++compared;
    }
  }
  CHECK(compared == testing::expected()["tfidf_samples"].size());
}

TEST_CASE("fact selection evaluation") {
  const Corpus c = testing::fixture_corpus();
  auto plan = make_folds(c);
  CHECK(evaluate_fact_selection(c, plan, oracle_method()).mean == 100.0);
  CHECK(evaluate_fact_selection(c, plan, empty_method()).mean == 0.0);

  auto report = evaluate_fact_selection(c, plan, tfidf_method());
  const auto& e = testing::expected()["bench_facts"]["report"];
  CHECK(report.metric == "fact_f1");
  CHECK(report.mean == doctest::Approx(e["mean"].get<double>()).epsilon(1e-12));
  REQUIRE(report.folds.size() == e["folds"].size());
  for (std::size_t i = 0; i < report.folds.size(); ++i) {
    CHECK(report.folds[i].samples == e["folds"][i]["samples"].get<std::size_t>());
    REQUIRE(report.folds[i].score.has_value());
    CHECK(*report.folds[i].score == doctest::Approx(e["folds"][i]["fact_f1"].get<double>()).epsilon(1e-12));
  }
  auto j = report_to_json(report);
  CHECK(j["metric"] == "fact_f1");
  CHECK(j["folds"][0].contains("fact_f1"));

  Corpus big = synthetic(10);
  auto big_plan = make_folds(big);
  CHECK(evaluate_fact_selection(big, big_plan, oracle_method()).mean == 100.0);
  CHECK(evaluate_fact_selection(big, big_plan, empty_method()).mean == 0.0);
}

TEST_CASE("external selectors and generators") {
  const Corpus c = testing::fixture_corpus();
  auto plan = make_folds(c);

  auto gold = external_fact_method(
      "python3 -c 'import sys,json\nfor l in sys.stdin: print(json.dumps(json.loads(l)[\"gold_facts\"]))'");
  CHECK(evaluate_fact_selection(c, plan, gold).mean == 100.0);

  auto echo = external_generator(
      "python3 -c 'import sys,json\nfor l in sys.stdin: print(json.loads(l)[\"gold_response\"].replace(\"\\n\", \" \"))'");
  CHECK(evaluate_generation(c, plan, echo).mean == 100.0);

  auto blank = external_generator("python3 -c 'import sys\nfor l in sys.stdin: print()'");
  CHECK(evaluate_generation(c, plan, blank).mean == 0.0);

  // first half of the reference tokens: precision 1, recall h/n
  auto half = external_generator(
      "python3 -c 'import sys,json,re\n"
      "for l in sys.stdin:\n"
      "    t = re.findall(r\"[a-z0-9\\x80-\\uffff]+\", json.loads(l)[\"gold_response\"].lower())\n"
      "    print(\" \".join(t[:len(t)//2]))'");
  auto report = evaluate_generation(c, plan, half);
  double expected_sum = 0;
  std::size_t folds = 0;
  for (const auto& it : plan.iterations) {
    double fold_sum = 0;
    std::size_t n = 0;
    for (const auto& did : it.test_dialogues) {
      const Dialogue& d = *std::find_if(c.dialogues.begin(), c.dialogues.end(),
                                        [&](const Dialogue& x) { return x.dialogue_id == did; });
      for (const auto& s : turn_samples(d, c.papers.at(d.paper_id))) {
        const auto t = analysis::Tokenizer{}.tokenize(s.gold_response);
        const double h = static_cast<double>(t.size() / 2), len = static_cast<double>(t.size());
        fold_sum += h == 0 ? 0.0 : 2 * (h / len) / (1 + h / len);
        ++n;
      }
    }
    if (n) {
      expected_sum += 100 * fold_sum / static_cast<double>(n);
      ++folds;
    }
  }
  CHECK(report.metric == "message_f1");
  CHECK(report.mean == doctest::Approx(expected_sum / static_cast<double>(folds)).epsilon(1e-9));

  auto bad = external_fact_method("echo '[1'");
  CHECK(code_of([&] { evaluate_fact_selection(c, plan, bad); }) == ErrorCode::GeneratorFailure);
  auto crash = external_generator("exit 2");
  CHECK(code_of([&] { evaluate_generation(c, plan, crash); }) == ErrorCode::GeneratorFailure);
}
