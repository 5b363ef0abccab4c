#pragma once

// Helpers shared by the unit and acceptance binaries.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "forge/domain.hpp"
#include "forge/process.hpp"
#include "forge/store.hpp"

namespace testing {

inline std::filesystem::path fixtures_dir() { return FORGE_FIXTURES_DIR; }
inline std::string forge_bin() { return FORGE_BIN; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline forge::Corpus fixture_corpus() { return forge::import_corpus(slurp(fixtures_dir() / "corpus.json")); }

inline const nlohmann::json& expected() {
  static const nlohmann::json j = nlohmann::json::parse(slurp(fixtures_dir() / "expected.json"));
  return j;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("forge-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

/// Runs the forge binary; stderr is folded into the output.
inline forge::ProcessResult run_forge(const std::string& args, const std::string& input = {}) {
  return forge::run_command(shell_quote(forge_bin()) + " " + args + " 2>&1", input);
}

/// Manually advanced clock for platform tests.
struct ManualClock {
  std::shared_ptr<std::atomic<std::int64_t>> ms = std::make_shared<std::atomic<std::int64_t>>(0);

  forge::Timestamp now() const { return forge::from_epoch_ms(ms->load()); }
  void set(forge::Timestamp t) { ms->store(forge::to_epoch_ms(t)); }
  void advance(std::chrono::milliseconds d) { ms->fetch_add(d.count()); }
  std::function<forge::Timestamp()> fn() const {
    auto p = ms;
    return [p] { return forge::from_epoch_ms(p->load()); };
  }
};

inline forge::Timestamp at_minutes(long m) { return forge::from_epoch_ms(1767261600000LL + m * 60000LL); }

inline forge::Message msg(forge::Role role, std::vector<std::pair<std::string, forge::IntentLabel>> sentences,
                          std::vector<forge::FactAnchor> facts = {}, std::int64_t sent_ms = 0) {
  forge::Message m;
  m.role = role;
  for (auto& [text, label] : sentences) m.sentences.push_back({text, label});
  m.facts = std::move(facts);
  m.sent_at = forge::from_epoch_ms(sent_ms);
  return m;
}

}  // namespace testing
