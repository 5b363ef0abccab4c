#include "forge/baseline/metrics.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace forge::baseline {

namespace {

double f1(std::size_t overlap, std::size_t predicted, std::size_t gold) {
  if (predicted == 0 && gold == 0) return 1.0;
  if (predicted == 0 || gold == 0 || overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(predicted);
  const double r = static_cast<double>(overlap) / static_cast<double>(gold);
  return 2 * p * r / (p + r);
}

}  // namespace

double fact_f1(const std::set<std::size_t>& predicted, const std::set<std::size_t>& gold) {
  std::size_t overlap = 0;
  for (auto i : predicted) overlap += gold.count(i);
  return f1(overlap, predicted.size(), gold.size());
}

double message_f1(std::string_view generated, std::string_view reference, const analysis::Tokenizer& tokenizer) {
  auto gen = tokenizer.tokenize(generated);
  auto ref = tokenizer.tokenize(reference);
  std::map<std::string, std::size_t> ref_counts;
  for (const auto& t : ref) ++ref_counts[t];
  std::map<std::string, std::size_t> gen_counts;
  for (const auto& t : gen) ++gen_counts[t];
  std::size_t overlap = 0;
  for (const auto& [t, n] : gen_counts)
    if (auto it = ref_counts.find(t); it != ref_counts.end()) overlap += std::min(n, it->second);
  return f1(overlap, gen.size(), ref.size());
}

}  // namespace forge::baseline
