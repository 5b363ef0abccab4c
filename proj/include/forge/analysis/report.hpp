#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/analysis/diversity.hpp"
#include "forge/analysis/stats.hpp"

namespace forge::analysis {

struct Report {
  nlohmann::json json;
  std::string text;  // aligned table, LF-terminated
};

Report counts_report(const CorpusCounts& c);
Report dialogue_report(const DialogueStats& s);
Report intent_report(const IntentDistribution& d);
Report fact_report(const FactStats& s);
Report diversity_report(const GroupedDiversity& g, double cluster_threshold);
Report chunk_report(const ChunkHistogram& h);

struct ReportOptions {
  std::vector<double> thresholds{0.3, 0.4, 0.5, 0.6, 0.7};
  std::size_t chunk_size = 4;
  std::string embedder = "tfidf";
  double cluster_threshold = 0.5;
};

/// `name` is table3, table4, table5, table6, diversity or chunks; anything
/// else throws Error{InvalidArgument}.
Report run_report(std::string_view name, const Corpus& corpus, const ReportOptions& options = {});

/// Left-aligned first column, right-aligned others, two spaces between.
std::string format_table(const std::vector<std::vector<std::string>>& rows);

std::string fixed(double value, int decimals);

}  // namespace forge::analysis
