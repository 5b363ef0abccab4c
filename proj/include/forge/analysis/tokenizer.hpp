#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forge::analysis {

/// Tokens are maximal runs of ASCII letters/digits or non-ASCII bytes (so
/// UTF-8 words stay whole); everything else separates tokens. ASCII letters
/// are lowercased when `lowercase` is set.
struct Tokenizer {
  bool lowercase = true;

  std::vector<std::string> tokenize(std::string_view text) const;
};

}  // namespace forge::analysis
