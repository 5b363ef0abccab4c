#pragma once

#include <optional>
#include <vector>

#include "forge/domain.hpp"

namespace forge::analysis {

/// items x annotators; nullopt marks a missing label.
struct AnnotationMatrix {
  std::vector<std::vector<std::optional<IntentLabel>>> labels;

  std::size_t items() const noexcept { return labels.size(); }
  std::size_t annotators() const noexcept { return labels.empty() ? 0 : labels.front().size(); }
};

/// Throws Error{InvalidArgument} for a missing cell, fewer than two
/// annotators, no items or ragged rows; Error{DegenerateExpected} when every
/// label falls in one category.
double fleiss_kappa(const AnnotationMatrix& m);

/// Nominal-metric alpha from the coincidence matrix. Units with fewer than
/// two labels are not pairable and are ignored. Throws
/// Error{TooFewPairableValues} and Error{NoVariance}.
double krippendorff_alpha(const AnnotationMatrix& m);

}  // namespace forge::analysis
