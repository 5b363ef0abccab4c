#include <doctest.h>

#include "forge/analysis/report.hpp"
#include "forge/analysis/stats.hpp"
#include "forge/analysis/tokenizer.hpp"
#include "forge/error.hpp"
#include "support.hpp"

using namespace forge;
using namespace forge::analysis;
using testing::msg;
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

Paper eight_intro_paper() {
  std::vector<std::string> intro;
  for (int i = 0; i < 8; ++i) intro.push_back("Intro " + std::to_string(i) + ".");
  return make_paper("p", "T", {"Abs zero.", "Abs one."}, intro, "u");
}

Corpus one_dialogue(std::vector<Message> messages, Paper paper = eight_intro_paper()) {
  Corpus c;
  for (std::size_t i = 0; i < messages.size(); ++i) messages[i].message_id = "d.m" + std::to_string(i);
  c.dialogues.push_back({"d", paper.paper_id, std::move(messages), "s.0", true});
  c.papers.emplace(paper.paper_id, std::move(paper));
  return c;
}

void check_close(const json& expected, double actual) { CHECK(actual == doctest::Approx(expected.get<double>()).epsilon(1e-12)); }

}  // namespace

TEST_CASE("tokenizer") {
  Tokenizer t;
  CHECK(t.tokenize("Hello, World! x2-y") == std::vector<std::string>{"hello", "world", "x2", "y"});
  CHECK(t.tokenize("  ...  ").empty());
  CHECK(t.tokenize("naïve café") == std::vector<std::string>{"naïve", "café"});
  CHECK(Tokenizer{false}.tokenize("AbC") == std::vector<std::string>{"AbC"});
}

TEST_CASE("corpus counts") {
  CHECK(corpus_counts(Corpus{}) == CorpusCounts{});
  const auto& e = testing::expected()["table3"];
  auto c = corpus_counts(testing::fixture_corpus());
  CHECK(c.papers == e["papers"].get<std::size_t>());
  CHECK(c.dialogues == e["dialogues"].get<std::size_t>());
  CHECK(c.messages == e["messages"].get<std::size_t>());
  CHECK(c.sentences == e["sentences"].get<std::size_t>());
  CHECK(c.avg_dialogues_per_paper == e["avg_dialogues_per_paper"].get<double>());
}

TEST_CASE("dialogue stats on a two-message dialogue") {
  auto c = one_dialogue({msg(Role::Proponent, {{"Why so?", IntentLabel::AskInfo}}),
                         msg(Role::DomainExpert, {{"Because.", IntentLabel::ReplyInfo}, {"See above.", IntentLabel::ReplyInfo}},
                             {{SectionKind::Abstract, 0}})});
  auto s = dialogue_stats(c);
  CHECK(s.avg_turns == 1.0);
  CHECK(s.pct_msm == 50.0);
  CHECK(s.avg_msg_len == 2.5);  // (2 + 3) / 2 tokens

  auto single = one_dialogue({msg(Role::Proponent, {{"One.", IntentLabel::AskInfo}}),
                              msg(Role::DomainExpert, {{"Two.", IntentLabel::ReplyInfo}})});
  CHECK(dialogue_stats(single).pct_msm == 0.0);
  CHECK(code_of([] { dialogue_stats(Corpus{}); }) == ErrorCode::EmptyCorpus);
}

TEST_CASE("dialogue stats on the fixture") {
  const auto& e = testing::expected()["table4"];
  auto s = dialogue_stats(testing::fixture_corpus());
  check_close(e["avg_turns"], s.avg_turns);
  check_close(e["pct_msm"], s.pct_msm);
  check_close(e["avg_msg_len"], s.avg_msg_len);
}

TEST_CASE("intent distribution") {
  auto only_ai = one_dialogue({msg(Role::Proponent, {{"a?", IntentLabel::AskInfo}, {"b?", IntentLabel::AskInfo}}),
                               msg(Role::DomainExpert, {{"c?", IntentLabel::AskInfo}})});
  auto d = intent_distribution(only_ai);
  CHECK(d.total.pct.at(IntentLabel::AskInfo) == 100.0);
  for (auto l : kAllIntents)
    if (l != IntentLabel::AskInfo) CHECK(d.total.pct.at(l) == 0.0);
  CHECK(d.total.information_seeking == 100.0);
  CHECK(d.total.argumentative == 0.0);
  CHECK(d.proponent.sentences == 2);

  const auto& e = testing::expected()["table5"];
  auto f = intent_distribution(testing::fixture_corpus());
  for (const auto& [name, row] : {std::pair{"P", &f.proponent}, std::pair{"DE", &f.domain_expert},
                                  std::pair{"Total", &f.total}}) {
    CAPTURE(name);
    CHECK(row->sentences == e[name]["sentences"].get<std::size_t>());
    for (auto l : kAllIntents) check_close(e[name][std::string(intent_code(l))], row->pct.at(l));
    check_close(e[name]["IS"], row->information_seeking);
    check_close(e[name]["Arg"], row->argumentative);
  }
}

TEST_CASE("unlabeled sentences are listed") {
  auto c = one_dialogue({msg(Role::Proponent, {{"a?", IntentLabel::AskInfo}})});
  c.dialogues[0].messages[0].sentences.push_back({"b", std::nullopt});
  try {
    intent_distribution(c);
    FAIL("expected UnlabeledSentences");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnlabeledSentences);
    CHECK(std::string(e.what()).find("d/d.m0#1") != std::string::npos);
  }
}

TEST_CASE("fact stats") {
  // introduction 2 and 7 are flattened indices 5 and 10
  auto c = one_dialogue({msg(Role::Proponent, {{"q", IntentLabel::AskInfo}}),
                         msg(Role::DomainExpert, {{"a", IntentLabel::ReplyInfo}},
                             {{SectionKind::Introduction, 2}, {SectionKind::Introduction, 7}})});
  auto s = fact_stats(c);
  REQUIRE(s.avg_sentence_distance.has_value());
  CHECK(*s.avg_sentence_distance == 5.0);
  CHECK(s.pct_2fact == 100.0);

  auto ones = one_dialogue({msg(Role::DomainExpert, {{"a", IntentLabel::ReplyInfo}}, {{SectionKind::Title, 0}}),
                            msg(Role::DomainExpert, {{"b", IntentLabel::ReplyInfo}}, {{SectionKind::Abstract, 1}})});
  s = fact_stats(ones);
  CHECK(s.pct_1fact == 100.0);
  CHECK(s.pct_2fact == 0.0);
  CHECK_FALSE(s.avg_sentence_distance.has_value());
  CHECK(s.section_pct(SectionKind::Title) == 50.0);
  CHECK(s.section_pct(SectionKind::Abstract) == 50.0);

  CHECK(code_of([] { fact_stats(one_dialogue({msg(Role::Proponent, {{"q", IntentLabel::AskInfo}})})); }) ==
        ErrorCode::NoGroundedMessages);

  const auto& e = testing::expected()["table6"];
  auto f = fact_stats(testing::fixture_corpus());
  CHECK(f.grounded_messages == e["grounded_messages"].get<std::size_t>());
  CHECK(f.anchors == e["anchors"].get<std::size_t>());
  check_close(e["pct_1fact"], f.pct_1fact);
  check_close(e["pct_2fact"], f.pct_2fact);
  REQUIRE(f.avg_sentence_distance.has_value());
  check_close(e["avg_sentence_distance"], *f.avg_sentence_distance);
  check_close(e["pct_by_section"]["title"], f.section_pct(SectionKind::Title));
  check_close(e["pct_by_section"]["abstract"], f.section_pct(SectionKind::Abstract));
  check_close(e["pct_by_section"]["introduction"], f.section_pct(SectionKind::Introduction));
}

TEST_CASE("chunk histogram") {
  auto c = one_dialogue({msg(Role::DomainExpert, {{"a", IntentLabel::ReplyInfo}},
                             {{SectionKind::Introduction, 1}, {SectionKind::Introduction, 5}})});
  auto h = fact_chunk_histogram(c, 4);
  CHECK(h.counts == std::vector<std::size_t>{1, 1});
  CHECK(h.fractions == std::vector<double>{0.5, 0.5});

  auto zero = one_dialogue({msg(Role::DomainExpert, {{"a", IntentLabel::ReplyInfo}}, {{SectionKind::Introduction, 0}}),
                            msg(Role::DomainExpert, {{"b", IntentLabel::ReplyInfo}}, {{SectionKind::Introduction, 0}})});
  h = fact_chunk_histogram(zero, 4);
  CHECK(h.fractions[0] == 1.0);
  for (std::size_t i = 1; i < h.fractions.size(); ++i) CHECK(h.fractions[i] == 0.0);
  CHECK(code_of([&] { fact_chunk_histogram(zero, 0); }) == ErrorCode::InvalidArgument);

  const auto& e = testing::expected()["chunks"];
  auto f = fact_chunk_histogram(testing::fixture_corpus(), 4);
  CHECK(f.counts == e["counts"].get<std::vector<std::size_t>>());
  CHECK(f.total == e["total"].get<std::size_t>());
  REQUIRE(f.fractions.size() == e["fractions"].size());
  for (std::size_t i = 0; i < f.fractions.size(); ++i) check_close(e["fractions"][i], f.fractions[i]);
}

TEST_CASE("reports are deterministic and aligned") {
  const Corpus c = testing::fixture_corpus();
  for (const char* name : {"table3", "table4", "table5", "table6", "diversity", "chunks"}) {
    CAPTURE(name);
    auto a = run_report(name, c);
    auto b = run_report(name, testing::fixture_corpus());
    CHECK(a.text == b.text);
    CHECK(a.json.dump() == b.json.dump());
    CHECK(a.text.back() == '\n');
  }
  CHECK(code_of([&] { run_report("table9", c); }) == ErrorCode::InvalidArgument);
  CHECK(format_table({{"a", "1"}, {"long", "22"}}) == "a      1\nlong  22\n");
  CHECK(fixed(2.0 / 3, 2) == "0.67");
}
