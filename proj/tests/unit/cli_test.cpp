#include <doctest.h>

#include "support.hpp"

using testing::run_forge;
using testing::shell_quote;
using json = nlohmann::json;

namespace {

std::string fixture() { return shell_quote((testing::fixtures_dir() / "corpus.json").string()); }

json last_json_line(const std::string& out) {
  const auto end = out.find_last_not_of('\n');
  const auto nl = out.rfind('\n', end);
  const auto start = nl == std::string::npos ? 0 : nl + 1;
  return json::parse(out.substr(start, end + 1 - start));
}

}  // namespace

TEST_CASE("analyze prints tables and json") {
  auto r = run_forge("analyze " + fixture() + " --report table3 --format json");
  REQUIRE(r.exit_status == 0);
  CHECK(json::parse(r.output) == testing::expected()["table3"]);

  r = run_forge("analyze " + fixture() + " --report table3 --format text");
  CHECK(r.output.find("papers") == 0);
  CHECK(r.output.find('{') == std::string::npos);

  for (const char* name : {"table4", "table5", "table6", "chunks", "diversity"}) {
    CAPTURE(name);
    auto a = run_forge("analyze " + fixture() + " --report " + name);
    CHECK(a.exit_status == 0);
    CHECK(a.output == run_forge("analyze " + fixture() + " --report " + name).output);
    CHECK_NOTHROW(last_json_line(a.output));
  }
  auto chunks = last_json_line(run_forge("analyze " + fixture() + " --report chunks").output);
  CHECK(chunks["counts"] == testing::expected()["chunks"]["counts"]);
}

TEST_CASE("import --check validates without a data directory") {
  auto r = run_forge("import --check " + fixture());
  CHECK(r.exit_status == 0);
  CHECK(r.output.find("dialogues") != std::string::npos);

  testing::TempDir dir;
  {
    std::ofstream(dir / "bad.json") << "{\"papers\":[";
  }
  r = run_forge("import --check " + shell_quote((dir / "bad.json").string()));
  CHECK(r.exit_status != 0);
  CHECK(r.output.find("ParseError") != std::string::npos);

  json j = json::parse(testing::slurp(testing::fixtures_dir() / "corpus.json"));
  j["dialogues"][0]["paper_id"] = "ghost";
  {
    std::ofstream(dir / "dangling.json") << j.dump();
  }
  r = run_forge("import --check " + shell_quote((dir / "dangling.json").string()));
  CHECK(r.exit_status != 0);
  CHECK(r.output.find("IntegrityError") != std::string::npos);
  CHECK(r.output.find("dialogues[0]") != std::string::npos);
}

TEST_CASE("import then export yields canonical bytes") {
  testing::TempDir dir;
  const auto data = shell_quote((dir / "data").string());
  auto r = run_forge("import --data-dir " + data + " " + fixture());
  REQUIRE(r.exit_status == 0);
  const auto golden = testing::slurp(testing::fixtures_dir() / "corpus.canonical.json");
  auto out = forge::run_command(shell_quote(testing::forge_bin()) + " export --data-dir " + data, "");
  CHECK(out.exit_status == 0);
  CHECK(out.output == golden);

  // importing again adds nothing and keeps the bytes
  CHECK(run_forge("import --data-dir " + data + " " + fixture()).exit_status == 0);
  const auto file = dir / "out.json";
  CHECK(run_forge("export --data-dir " + data + " --out " + shell_quote(file.string())).exit_status == 0);
  CHECK(testing::slurp(file) == golden);

  auto empty = forge::run_command(shell_quote(testing::forge_bin()) + " export --data-dir " +
                                  shell_quote((dir / "empty").string()), "");
  CHECK(empty.output == "{\"dialogues\":[],\"papers\":[]}\n");
}

TEST_CASE("bench facts reproduces the oracle report") {
  auto r = run_forge("bench facts " + fixture());
  REQUIRE(r.exit_status == 0);
  auto j = json::parse(r.output);
  const auto& e = testing::expected()["bench_facts"]["report"];
  CHECK(j["metric"] == "fact_f1");
  CHECK(j["mean"].get<double>() == doctest::Approx(e["mean"].get<double>()).epsilon(1e-12));
  CHECK(j["folds"].size() == e["folds"].size());

  r = run_forge("bench facts " + fixture() + " --folds 9");
  CHECK(r.exit_status != 0);
  CHECK(r.output.find("TooFewPapers") != std::string::npos);
}

TEST_CASE("bench gen with an echo generator") {
  auto r = run_forge("bench gen " + fixture() + " --generator " +
                     shell_quote("python3 -c 'import sys,json\nfor l in sys.stdin: print(json.loads(l)[\"gold_response\"].replace(\"\\n\",\" \"))'"));
  REQUIRE(r.exit_status == 0);
  auto j = json::parse(r.output);
  CHECK(j["metric"] == "message_f1");
  CHECK(j["mean"] == 100.0);
}

TEST_CASE("usage errors exit nonzero") {
  CHECK(run_forge("").exit_status != 0);
  CHECK(run_forge("analyze " + fixture() + " --report table9").exit_status != 0);
  CHECK(run_forge("analyze /nonexistent.json --report table3").exit_status != 0);
  CHECK(run_forge("frobnicate").exit_status != 0);
}
