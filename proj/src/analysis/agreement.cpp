#include "forge/analysis/agreement.hpp"

#include <array>

#include "forge/error.hpp"

namespace forge::analysis {

namespace {

constexpr std::size_t kCategories = std::size(kAllIntents);

std::size_t category(IntentLabel l) { return static_cast<std::size_t>(l); }

void check_shape(const AnnotationMatrix& m) {
  if (m.items() == 0) throw Error(ErrorCode::InvalidArgument, "annotation matrix has no items");
  if (m.annotators() < 2) throw Error(ErrorCode::InvalidArgument, "annotation matrix needs two annotators");
  for (const auto& row : m.labels)
    if (row.size() != m.annotators()) throw Error(ErrorCode::InvalidArgument, "annotation matrix rows differ in length");
}

}  // namespace

double fleiss_kappa(const AnnotationMatrix& m) {
  check_shape(m);
  const std::size_t items = m.items();
  const double n = static_cast<double>(m.annotators());

  std::array<double, kCategories> totals{};
  double agreement_sum = 0;
  for (std::size_t i = 0; i < items; ++i) {
    std::array<double, kCategories> counts{};
    for (const auto& cell : m.labels[i]) {
      if (!cell) throw Error(ErrorCode::InvalidArgument, "missing label in item " + std::to_string(i));
      counts[category(*cell)] += 1;
    }
    double squares = 0;
    for (std::size_t j = 0; j < kCategories; ++j) {
      squares += counts[j] * counts[j];
      totals[j] += counts[j];
    }
    agreement_sum += (squares - n) / (n * (n - 1));
  }
  const double p_bar = agreement_sum / static_cast<double>(items);
  double p_e = 0;
  for (double t : totals) {
    const double p = t / (static_cast<double>(items) * n);
    p_e += p * p;
  }
  if (p_e >= 1.0) throw Error(ErrorCode::DegenerateExpected, "all labels fall in one category");
  if (p_bar == 1.0) return 1.0;
  return (p_bar - p_e) / (1.0 - p_e);
}

double krippendorff_alpha(const AnnotationMatrix& m) {
  check_shape(m);
  std::array<std::array<double, kCategories>, kCategories> o{};
  for (const auto& row : m.labels) {
    std::array<double, kCategories> counts{};
    double m_u = 0;
    for (const auto& cell : row)
      if (cell) {
        counts[category(*cell)] += 1;
        m_u += 1;
      }
    if (m_u < 2) continue;
    for (std::size_t c = 0; c < kCategories; ++c)
      for (std::size_t k = 0; k < kCategories; ++k) {
        const double pairs = c == k ? counts[c] * (counts[c] - 1) : counts[c] * counts[k];
        o[c][k] += pairs / (m_u - 1);
      }
  }

  std::array<double, kCategories> n_c{};
  double n = 0;
  for (std::size_t c = 0; c < kCategories; ++c) {
    for (std::size_t k = 0; k < kCategories; ++k) n_c[c] += o[c][k];
    n += n_c[c];
  }
  if (n < 2) throw Error(ErrorCode::TooFewPairableValues, "fewer than two pairable values");

  double observed = 0, expected = 0;
  for (std::size_t c = 0; c < kCategories; ++c)
    for (std::size_t k = 0; k < kCategories; ++k)
      if (c != k) {
        observed += o[c][k];
        expected += n_c[c] * n_c[k];
      }
  if (expected == 0) throw Error(ErrorCode::NoVariance, "all pairable values are identical");
  if (observed == 0) return 1.0;
  const double d_o = observed / n;
  const double d_e = expected / (n * (n - 1));
  return 1.0 - d_o / d_e;
}

}  // namespace forge::analysis
