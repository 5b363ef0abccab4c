#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forge {

/// Splits composed text into sentences: every non-blank line is at least one
/// sentence, and a line is further split after terminal punctuation
/// (. ! ?, optionally followed by closing quotes/brackets) when whitespace
/// follows. Common abbreviations ("e.g.", "et al.", "Fig.") do not end a
/// sentence. Returned sentences are trimmed and non-empty.
std::vector<std::string> segment_sentences(std::string_view text);

}  // namespace forge
