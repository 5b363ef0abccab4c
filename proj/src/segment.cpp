#include "forge/segment.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "forge/domain.hpp"

namespace forge {

namespace {

constexpr std::array<std::string_view, 14> kAbbreviations = {
    "e.g.", "i.e.", "et al.", "etc.", "vs.", "fig.", "figs.", "eq.", "eqs.", "sec.", "cf.", "dr.", "prof.", "approx."};

bool ends_with_abbreviation(std::string_view sentence) {
  std::string lower(sentence);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (std::string_view abbr : kAbbreviations) {
    if (lower.size() < abbr.size()) continue;
    if (lower.compare(lower.size() - abbr.size(), abbr.size(), abbr) != 0) continue;
    std::size_t start = lower.size() - abbr.size();
    if (start == 0 || !std::isalpha(static_cast<unsigned char>(lower[start - 1]))) return true;
  }
  return false;
}

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

void split_line(std::string_view line, std::vector<std::string>& out) {
  std::size_t begin = 0;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < line.size() && (line[end] == '.' || line[end] == '!' || line[end] == '?')) ++end;
    while (end < line.size() && is_closer(line[end])) ++end;
    bool boundary = end >= line.size() || std::isspace(static_cast<unsigned char>(line[end]));
    if (boundary && !(c == '.' && end == i + 1 && ends_with_abbreviation(line.substr(begin, end - begin)))) {
      std::string s = trim(line.substr(begin, end - begin));
      if (!s.empty()) out.push_back(std::move(s));
      begin = end;
    }
    i = end;
  }
  std::string rest = trim(line.substr(begin));
  if (!rest.empty()) out.push_back(std::move(rest));
}

}  // namespace

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    split_line(text.substr(pos, nl - pos), out);
    pos = nl + 1;
  }
  return out;
}

}  // namespace forge
