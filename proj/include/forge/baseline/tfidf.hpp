#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/analysis/tokenizer.hpp"

namespace forge::baseline {

using Vector = std::vector<double>;

/// Raw term counts weighted by smoothed idf, ln((1 + N) / (1 + df)) + 1, and
/// L2-normalized. Terms not seen during fitting are ignored.
struct TfidfModel {
  std::map<std::string, std::size_t> vocabulary;
  std::vector<double> idf;
  analysis::Tokenizer tokenizer;

  std::size_t dimension() const noexcept { return idf.size(); }
};

/// Throws Error{EmptyFitSet} when no text yields a token.
TfidfModel tfidf_fit(std::span<const std::string> texts, analysis::Tokenizer tokenizer = {});

/// Unit vector, or the zero vector when no token is in the vocabulary.
Vector tfidf_embed(const TfidfModel& model, std::string_view text);

/// Cosine similarity; 0 when either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

double l2_norm(std::span<const double> v);

}  // namespace forge::baseline
