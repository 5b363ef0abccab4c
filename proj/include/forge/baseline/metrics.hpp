#pragma once

#include <cstddef>
#include <set>
#include <string_view>

#include "forge/analysis/tokenizer.hpp"

namespace forge::baseline {

/// Set F1. Both empty scores 1, exactly one empty scores 0.
double fact_f1(const std::set<std::size_t>& predicted, const std::set<std::size_t>& gold);

/// Bag-of-tokens F1 with clipped counts. Both empty scores 1, exactly one
/// empty scores 0.
double message_f1(std::string_view generated, std::string_view reference,
                  const analysis::Tokenizer& tokenizer = {});

}  // namespace forge::baseline
