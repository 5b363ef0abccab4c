#include "forge/baseline/harness.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "forge/baseline/metrics.hpp"
#include "forge/error.hpp"
#include "forge/process.hpp"

namespace forge::baseline {

namespace {

// Unbiased index in [0, bound) that does not depend on the standard
// library's distribution implementation.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw_below(rng, i)]);
}

std::vector<std::string> split_lines(const std::string& output) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(output);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string samples_input(std::span<const TurnSample> samples, const Corpus& corpus) {
  std::string input;
  for (const auto& s : samples) input += sample_to_json(s, corpus.papers.at(s.paper_id)).dump() + "\n";
  return input;
}

std::vector<std::string> run_batch(const std::string& command, std::span<const TurnSample> samples,
                                   const Corpus& corpus) {
  if (samples.empty()) return {};
  auto result = run_command(command, samples_input(samples, corpus));
  if (result.exit_status != 0)
    throw Error(ErrorCode::GeneratorFailure, "'" + command + "' exited with status " +
                                                 std::to_string(result.exit_status));
  auto lines = split_lines(result.output);
  if (lines.size() != samples.size())
    throw Error(ErrorCode::GeneratorFailure, "'" + command + "' wrote " + std::to_string(lines.size()) +
                                                 " lines for " + std::to_string(samples.size()) + " samples");
  return lines;
}

const Dialogue* find_dialogue(const Corpus& corpus, const std::string& id) {
  for (const auto& d : corpus.dialogues)
    if (d.dialogue_id == id) return &d;
  return nullptr;
}

std::vector<TurnSample> test_samples(const Corpus& corpus, const FoldSplit& split) {
  std::vector<TurnSample> out;
  for (const auto& id : split.test_dialogues) {
    const Dialogue* d = find_dialogue(corpus, id);
    if (!d) throw Error(ErrorCode::InvalidArgument, "fold plan names unknown dialogue " + id);
    auto samples = turn_samples(*d, corpus.papers.at(d->paper_id));
    std::move(samples.begin(), samples.end(), std::back_inserter(out));
  }
  return out;
}

template <typename ScoreFold>
EvaluationReport evaluate(const Corpus& corpus, const FoldPlan& plan, std::string metric, ScoreFold score_fold) {
  EvaluationReport report;
  report.metric = std::move(metric);
  double sum = 0;
  std::size_t scored = 0;
  for (std::size_t i = 0; i < plan.iterations.size(); ++i) {
    auto [samples, total] = score_fold(test_samples(corpus, plan.iterations[i]));
    FoldScore fs{i, samples, std::nullopt};
    if (samples > 0) {
      fs.score = 100.0 * total / static_cast<double>(samples);
      sum += *fs.score;
      ++scored;
    }
    report.folds.push_back(fs);
  }
  if (scored == 0) throw Error(ErrorCode::InvalidArgument, "no fold has evaluation samples");
  report.mean = sum / static_cast<double>(scored);
  return report;
}

}  // namespace

FoldPlan make_folds(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "need at least two folds");
  std::set<std::string> with_dialogues;
  for (const auto& d : corpus.dialogues) with_dialogues.insert(d.paper_id);
  std::vector<std::string> papers(with_dialogues.begin(), with_dialogues.end());
  if (papers.size() < n)
    throw Error(ErrorCode::TooFewPapers,
                std::to_string(papers.size()) + " papers cannot fill " + std::to_string(n) + " folds");

  std::mt19937_64 rng(seed);
  fisher_yates(papers, rng);
  FoldPlan plan;
  plan.seed = seed;
  plan.folds.resize(n);
  for (std::size_t i = 0; i < papers.size(); ++i) plan.folds[i % n].push_back(papers[i]);

  std::map<std::string, std::size_t> fold_of;
  for (std::size_t f = 0; f < n; ++f)
    for (const auto& p : plan.folds[f]) fold_of[p] = f;

  for (std::size_t f = 0; f < n; ++f) {
    FoldSplit split;
    for (std::size_t g = 0; g < n; ++g)
      if (g != f) split.train_papers.insert(split.train_papers.end(), plan.folds[g].begin(), plan.folds[g].end());
    std::sort(split.train_papers.begin(), split.train_papers.end());

    std::vector<std::string> held_out;
    for (const auto& d : corpus.dialogues)
      (fold_of.at(d.paper_id) == f ? held_out : split.train_dialogues).push_back(d.dialogue_id);
    fisher_yates(held_out, rng);
    const std::size_t half = held_out.size() / 2;
    split.validation_dialogues.assign(held_out.begin(), held_out.begin() + static_cast<std::ptrdiff_t>(half));
    split.test_dialogues.assign(held_out.begin() + static_cast<std::ptrdiff_t>(half), held_out.end());
    plan.iterations.push_back(std::move(split));
  }
  return plan;
}

nlohmann::json plan_to_json(const FoldPlan& plan) {
  nlohmann::json iterations = nlohmann::json::array();
  for (const auto& s : plan.iterations)
    iterations.push_back({{"train_papers", s.train_papers},
                          {"train_dialogues", s.train_dialogues},
                          {"validation_dialogues", s.validation_dialogues},
                          {"test_dialogues", s.test_dialogues}});
  return {{"seed", plan.seed}, {"folds", plan.folds}, {"iterations", iterations}};
}

std::vector<TurnSample> turn_samples(const Dialogue& dialogue, const Paper& paper) {
  std::vector<TurnSample> out;
  const auto& msgs = dialogue.messages;
  for (std::size_t i = 0; i + 1 < msgs.size(); ++i) {
    if (msgs[i].role != Role::Proponent || msgs[i + 1].role != Role::DomainExpert) continue;
    TurnSample s;
    s.dialogue_id = dialogue.dialogue_id;
    s.paper_id = dialogue.paper_id;
    s.turn_index = out.size();
    s.query = msgs[i].text();
    for (std::size_t h = 0; h < i; ++h) s.history.push_back({msgs[h].role, msgs[h].text()});
    s.gold_response = msgs[i + 1].text();
    for (const auto& f : msgs[i + 1].facts)
      if (auto idx = paper.global_index(f)) s.gold_facts.insert(*idx);
    out.push_back(std::move(s));
    ++i;
  }
  return out;
}

std::string joined_history(const TurnSample& sample) {
  std::string out;
  for (const auto& h : sample.history) {
    if (!out.empty()) out += " " + std::string(kHistorySeparator) + " ";
    out += h.text;
  }
  return out;
}

nlohmann::json sample_to_json(const TurnSample& sample, const Paper& paper) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& h : sample.history) history.push_back({{"role", role_code(h.role)}, {"text", h.text}});
  return {{"dialogue_id", sample.dialogue_id},
          {"paper_id", sample.paper_id},
          {"turn_index", sample.turn_index},
          {"query", sample.query},
          {"history", history},
          {"history_text", joined_history(sample)},
          {"paper_sentences", paper.flattened_sentences()},
          {"gold_response", sample.gold_response},
          {"gold_facts", sample.gold_facts}};
}

std::vector<std::size_t> rank_by_cosine(std::span<const double> query, std::span<const Vector> sentences,
                                        std::size_t k) {
  std::vector<double> sims;
  sims.reserve(sentences.size());
  for (const auto& s : sentences) sims.push_back(cosine(query, s));
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sims[a] > sims[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

std::vector<std::size_t> select_facts(std::string_view query, std::span<const std::string> sentences,
                                      const TfidfModel& model, std::size_t k) {
  std::vector<Vector> vecs;
  vecs.reserve(sentences.size());
  for (const auto& s : sentences) vecs.push_back(tfidf_embed(model, s));
  return rank_by_cosine(tfidf_embed(model, query), vecs, k);
}

FactMethod tfidf_method(std::size_t k) {
  return [k](std::span<const TurnSample> samples, const Corpus& corpus) {
    std::map<std::string, std::pair<TfidfModel, std::vector<std::string>>> models;
    std::vector<std::set<std::size_t>> out;
    for (const auto& s : samples) {
      auto it = models.find(s.paper_id);
      if (it == models.end()) {
        auto sentences = corpus.papers.at(s.paper_id).flattened_sentences();
        auto model = tfidf_fit(sentences);
        it = models.emplace(s.paper_id, std::make_pair(std::move(model), std::move(sentences))).first;
      }
      const auto& [model, sentences] = it->second;
      auto picked = select_facts(s.query, sentences, model, k);
      out.emplace_back(picked.begin(), picked.end());
    }
    return out;
  };
}

FactMethod external_fact_method(std::string command) {
  return [command = std::move(command)](std::span<const TurnSample> samples, const Corpus& corpus) {
    std::vector<std::set<std::size_t>> out;
    for (const auto& line : run_batch(command, samples, corpus)) {
      try {
        out.push_back(nlohmann::json::parse(line).get<std::set<std::size_t>>());
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::GeneratorFailure, "malformed index list: " + line);
      }
    }
    return out;
  };
}

Generator external_generator(std::string command) {
  return [command = std::move(command)](std::span<const TurnSample> samples, const Corpus& corpus) {
    return run_batch(command, samples, corpus);
  };
}

EvaluationReport evaluate_fact_selection(const Corpus& corpus, const FoldPlan& plan, const FactMethod& method) {
  return evaluate(corpus, plan, "fact_f1", [&](std::vector<TurnSample> samples) {
    std::erase_if(samples, [](const TurnSample& s) { return s.gold_facts.empty(); });
    auto predicted = method(samples, corpus);
    if (predicted.size() != samples.size())
      throw Error(ErrorCode::GeneratorFailure, "fact method returned the wrong number of predictions");
    double total = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) total += fact_f1(predicted[i], samples[i].gold_facts);
    return std::make_pair(samples.size(), total);
  });
}

EvaluationReport evaluate_generation(const Corpus& corpus, const FoldPlan& plan, const Generator& generator) {
  return evaluate(corpus, plan, "message_f1", [&](std::vector<TurnSample> samples) {
    auto responses = generator(samples, corpus);
    if (responses.size() != samples.size())
      throw Error(ErrorCode::GeneratorFailure, "generator returned the wrong number of responses");
    double total = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) total += message_f1(responses[i], samples[i].gold_response);
    return std::make_pair(samples.size(), total);
  });
}

nlohmann::json report_to_json(const EvaluationReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    nlohmann::json entry = {{"fold", f.fold}, {"samples", f.samples}};
    entry[report.metric] = f.score ? nlohmann::json(*f.score) : nlohmann::json(nullptr);
    folds.push_back(entry);
  }
  return {{"folds", folds}, {"mean", report.mean}, {"metric", report.metric}};
}

}  // namespace forge::baseline
