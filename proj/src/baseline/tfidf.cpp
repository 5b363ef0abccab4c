#include "forge/baseline/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "forge/error.hpp"

namespace forge::baseline {

TfidfModel tfidf_fit(std::span<const std::string> texts, analysis::Tokenizer tokenizer) {
  TfidfModel model;
  model.tokenizer = tokenizer;
  std::map<std::string, std::size_t> df;
  bool any = false;
  for (const auto& text : texts) {
    auto tokens = tokenizer.tokenize(text);
    any = any || !tokens.empty();
    for (const auto& t : std::set<std::string>(tokens.begin(), tokens.end())) ++df[t];
  }
  if (texts.empty() || !any) throw Error(ErrorCode::EmptyFitSet, "tf-idf needs at least one non-empty text");

  const double n = static_cast<double>(texts.size());
  model.idf.reserve(df.size());
  for (const auto& [term, count] : df) {
    model.vocabulary.emplace(term, model.idf.size());
    model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return model;
}

Vector tfidf_embed(const TfidfModel& model, std::string_view text) {
  Vector v(model.dimension(), 0.0);
  for (const auto& t : model.tokenizer.tokenize(text))
    if (auto it = model.vocabulary.find(t); it != model.vocabulary.end()) v[it->second] += 1.0;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= model.idf[i];
  const double norm = l2_norm(v);
  if (norm > 0)
    for (double& x : v) x /= norm;
  return v;
}

double l2_norm(std::span<const double> v) {
  double sum = 0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0, na = 0, nb = 0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) dot += a[i] * b[i];
  for (double x : a) na += x * x;
  for (double x : b) nb += x * x;
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

}  // namespace forge::baseline
