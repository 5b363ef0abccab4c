#include "forge/analysis/embedding.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "forge/error.hpp"
#include "forge/process.hpp"

namespace forge::analysis {

std::vector<Vector> EmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

TfidfEmbeddingProvider TfidfEmbeddingProvider::fit_on(const Corpus& corpus, Tokenizer tokenizer) {
  std::vector<std::string> texts;
  for (const auto& d : corpus.dialogues)
    for (const auto& m : d.messages) texts.push_back(m.text());
  for (const auto& [id, paper] : corpus.papers)
    for (auto& s : paper.flattened_sentences()) texts.push_back(std::move(s));
  return TfidfEmbeddingProvider(baseline::tfidf_fit(texts, tokenizer));
}

Vector TfidfEmbeddingProvider::embed(std::string_view text) { return baseline::tfidf_embed(model_, text); }

Vector ExternalEmbeddingProvider::embed(std::string_view text) {
  std::string owned(text);
  return embed_batch(std::span<const std::string>(&owned, 1)).front();
}

std::vector<Vector> ExternalEmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  std::vector<std::string> missing;
  for (const auto& t : texts)
    if (!cache_.contains(t)) missing.push_back(t);

  if (!missing.empty()) {
    std::string input;
    for (const auto& t : missing) input += nlohmann::json(t).dump() + "\n";
    auto result = run_command(command_, input);
    if (result.exit_status != 0)
      throw Error(ErrorCode::GeneratorFailure,
                  "embedder exited with status " + std::to_string(result.exit_status));

    std::istringstream lines(result.output);
    std::string line;
    std::size_t i = 0;
    while (std::getline(lines, line)) {
      if (trim(line).empty()) continue;
      if (i >= missing.size()) throw Error(ErrorCode::GeneratorFailure, "embedder wrote too many lines");
      Vector v;
      try {
        v = nlohmann::json::parse(line).get<Vector>();
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::GeneratorFailure, "embedder output line " + std::to_string(i + 1) + ": " + e.what());
      }
      if (v.empty()) throw Error(ErrorCode::GeneratorFailure, "embedder returned an empty vector");
      for (double x : v)
        if (!std::isfinite(x)) throw Error(ErrorCode::GeneratorFailure, "embedder returned a non-finite value");
      if (dimension_ == 0) dimension_ = v.size();
      if (v.size() != dimension_) throw Error(ErrorCode::GeneratorFailure, "embedder dimension changed");
      cache_.emplace(missing[i], std::move(v));
      ++i;
    }
    if (i != missing.size())
      throw Error(ErrorCode::GeneratorFailure, "embedder wrote " + std::to_string(i) + " vectors for " +
                                                   std::to_string(missing.size()) + " texts");
  }

  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(cache_.find(t)->second);
  return out;
}

Vector TableEmbeddingProvider::embed(std::string_view text) {
  auto it = table_.find(text);
  if (it == table_.end()) throw Error(ErrorCode::InvalidArgument, "no vector for text: " + std::string(text));
  return it->second;
}

std::unique_ptr<EmbeddingProvider> make_provider(std::string_view spec, const Corpus& corpus) {
  if (spec == "tfidf") return std::make_unique<TfidfEmbeddingProvider>(TfidfEmbeddingProvider::fit_on(corpus));
  constexpr std::string_view prefix = "external:";
  if (spec.starts_with(prefix) && spec.size() > prefix.size())
    return std::make_unique<ExternalEmbeddingProvider>(std::string(spec.substr(prefix.size())));
  throw Error(ErrorCode::InvalidArgument, "unknown embedder: " + std::string(spec));
}

}  // namespace forge::analysis
