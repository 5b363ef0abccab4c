#pragma once

// Paper-level cross-validation over dialogue turns, the TF-IDF fact
// selector, and scoring of fact selection and response generation.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/baseline/tfidf.hpp"
#include "forge/domain.hpp"

namespace forge::baseline {

struct FoldSplit {
  std::vector<std::string> train_papers;
  std::vector<std::string> train_dialogues;
  std::vector<std::string> validation_dialogues;
  std::vector<std::string> test_dialogues;
};

struct FoldPlan {
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> folds;  // paper ids
  std::vector<FoldSplit> iterations;            // iteration i holds out folds[i]
};

/// Papers that have dialogues are shuffled with a seeded mt19937_64 and dealt
/// round-robin. Each held-out fold's dialogues are shuffled and split into
/// floor(m/2) validation and the rest test. Throws Error{TooFewPapers}.
FoldPlan make_folds(const Corpus& corpus, std::size_t n = 5, std::uint64_t seed = 13);

nlohmann::json plan_to_json(const FoldPlan& plan);

struct HistoryEntry {
  Role role = Role::Proponent;
  std::string text;
};

struct TurnSample {
  std::string dialogue_id;
  std::string paper_id;
  std::size_t turn_index = 0;
  std::string query;                  // P message text
  std::vector<HistoryEntry> history;  // messages before the query, oldest first
  std::string gold_response;          // DE message text
  std::set<std::size_t> gold_facts;   // flattened sentence indices
};

/// Reserved token between history messages for external generators.
inline constexpr std::string_view kHistorySeparator = "</s>";

std::vector<TurnSample> turn_samples(const Dialogue& dialogue, const Paper& paper);

std::string joined_history(const TurnSample& sample);

/// One JSON object per sample, as fed to external selectors and generators:
/// dialogue_id, paper_id, turn_index, query, history, history_text,
/// paper_sentences, gold_response, gold_facts.
nlohmann::json sample_to_json(const TurnSample& sample, const Paper& paper);

/// Indices of the k sentences most cosine-similar to the query, ties to the
/// lower index; min(k, n) indices.
std::vector<std::size_t> rank_by_cosine(std::span<const double> query, std::span<const Vector> sentences,
                                        std::size_t k = 2);
std::vector<std::size_t> select_facts(std::string_view query, std::span<const std::string> sentences,
                                      const TfidfModel& model, std::size_t k = 2);

/// Batch of samples (all from one fold) to predicted index sets.
using FactMethod = std::function<std::vector<std::set<std::size_t>>(std::span<const TurnSample>, const Corpus&)>;
/// Batch of samples to generated responses.
using Generator = std::function<std::vector<std::string>(std::span<const TurnSample>, const Corpus&)>;

/// TF-IDF fit per sample on the paper's flattened sentences, top k by cosine.
FactMethod tfidf_method(std::size_t k = 2);
/// One JSON sample per input line; one JSON array of indices per output line.
FactMethod external_fact_method(std::string command);
/// One JSON sample per input line; one response per output line.
Generator external_generator(std::string command);

struct FoldScore {
  std::size_t fold = 0;
  std::size_t samples = 0;
  std::optional<double> score;  // percent; absent when the fold had no samples
};

struct EvaluationReport {
  std::string metric;  // "fact_f1" or "message_f1"
  std::vector<FoldScore> folds;
  double mean = 0;  // mean of the present fold scores
};

/// Scores test-split turns whose DE message is grounded.
EvaluationReport evaluate_fact_selection(const Corpus& corpus, const FoldPlan& plan, const FactMethod& method);
/// Scores every test-split turn.
EvaluationReport evaluate_generation(const Corpus& corpus, const FoldPlan& plan, const Generator& generator);

/// {"folds":[{"fold":i,"samples":n,"<metric>":x}],"mean":m,"metric":"<metric>"}
nlohmann::json report_to_json(const EvaluationReport& report);

}  // namespace forge::baseline
