#include "forge/analysis/report.hpp"

#include <algorithm>
#include <cstdio>

#include "forge/error.hpp"

namespace forge::analysis {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string format_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], row[c].size());
    }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(width[c] - row[c].size(), ' ');
      if (c > 0) line += "  ";
      line += c == 0 ? row[c] + pad : pad + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

Report counts_report(const CorpusCounts& c) {
  Report r;
  r.json = {{"papers", c.papers},
            {"dialogues", c.dialogues},
            {"messages", c.messages},
            {"sentences", c.sentences},
            {"avg_dialogues_per_paper", c.avg_dialogues_per_paper}};
  r.text = format_table({{"papers", std::to_string(c.papers)},
                         {"dialogues", std::to_string(c.dialogues)},
                         {"messages", std::to_string(c.messages)},
                         {"sentences", std::to_string(c.sentences)},
                         {"avg dialogues per paper", fixed(c.avg_dialogues_per_paper, 1)}});
  return r;
}

Report dialogue_report(const DialogueStats& s) {
  Report r;
  r.json = {{"avg_turns", s.avg_turns}, {"pct_msm", s.pct_msm}, {"avg_msg_len", s.avg_msg_len}};
  r.text = format_table({{"avg turns", fixed(s.avg_turns, 1)},
                         {"% MSM", fixed(s.pct_msm, 1)},
                         {"avg message length", fixed(s.avg_msg_len, 1)}});
  return r;
}

Report intent_report(const IntentDistribution& d) {
  Report r;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"role"};
  for (IntentLabel l : kAllIntents) header.emplace_back(intent_code(l));
  header.insert(header.end(), {"IS", "Arg", "sentences"});
  rows.push_back(header);

  auto add = [&](std::string_view name, const IntentRow& row) {
    nlohmann::json j;
    std::vector<std::string> cells{std::string(name)};
    for (IntentLabel l : kAllIntents) {
      j[std::string(intent_code(l))] = row.pct.at(l);
      cells.push_back(fixed(row.pct.at(l), 1));
    }
    j["IS"] = row.information_seeking;
    j["Arg"] = row.argumentative;
    j["sentences"] = row.sentences;
    cells.insert(cells.end(), {fixed(row.information_seeking, 1), fixed(row.argumentative, 1),
                               std::to_string(row.sentences)});
    r.json[std::string(name)] = j;
    rows.push_back(cells);
  };
  add("P", d.proponent);
  add("DE", d.domain_expert);
  add("Total", d.total);
  r.text = format_table(rows);
  return r;
}

Report fact_report(const FactStats& s) {
  Report r;
  nlohmann::json sections;
  for (SectionKind k : {SectionKind::Title, SectionKind::Abstract, SectionKind::Introduction})
    sections[std::string(section_code(k))] = s.section_pct(k);
  r.json = {{"grounded_messages", s.grounded_messages},
            {"pct_1fact", s.pct_1fact},
            {"pct_2fact", s.pct_2fact},
            {"avg_sentence_distance",
             s.avg_sentence_distance ? nlohmann::json(*s.avg_sentence_distance) : nlohmann::json(nullptr)},
            {"anchors", s.anchors},
            {"pct_by_section", sections}};
  r.text = format_table({{"grounded messages", std::to_string(s.grounded_messages)},
                         {"% 1-fact", fixed(s.pct_1fact, 1)},
                         {"% 2-fact", fixed(s.pct_2fact, 1)},
                         {"avg sentence distance",
                          s.avg_sentence_distance ? fixed(*s.avg_sentence_distance, 1) : "-"},
                         {"% title", fixed(s.section_pct(SectionKind::Title), 1)},
                         {"% abstract", fixed(s.section_pct(SectionKind::Abstract), 1)},
                         {"% introduction", fixed(s.section_pct(SectionKind::Introduction), 1)}});
  return r;
}

Report diversity_report(const GroupedDiversity& g, double cluster_threshold) {
  Report r;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"group"};
  for (double t : g.thresholds) header.push_back(fixed(t, 2));
  rows.push_back(header);

  nlohmann::json groups, scored;
  for (DiversityGroup grp : kAllGroups) {
    const auto i = static_cast<std::size_t>(grp);
    nlohmann::json values = nlohmann::json::array();
    std::vector<std::string> cells{std::string(group_name(grp))};
    for (const auto& v : g.scores[i]) {
      values.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
      cells.push_back(v ? fixed(*v, 2) : "-");
    }
    groups[std::string(group_name(grp))] = values;
    scored[std::string(group_name(grp))] = g.papers_scored[i];
    rows.push_back(cells);
  }
  r.json = {{"thresholds", g.thresholds},
            {"groups", groups},
            {"papers", g.papers},
            {"papers_scored", scored},
            {"cluster_threshold", cluster_threshold}};
  r.text = format_table(rows);
  return r;
}

Report chunk_report(const ChunkHistogram& h) {
  Report r;
  r.json = {{"chunk_size", h.chunk_size}, {"counts", h.counts}, {"fractions", h.fractions}, {"total", h.total}};
  std::vector<std::vector<std::string>> rows{{"chunk", "sentences", "anchors", "fraction"}};
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    rows.push_back({std::to_string(i), std::to_string(i * h.chunk_size) + "-" +
                                           std::to_string((i + 1) * h.chunk_size - 1),
                    std::to_string(h.counts[i]), fixed(h.fractions[i], 3)});
  r.text = format_table(rows);
  return r;
}

Report run_report(std::string_view name, const Corpus& corpus, const ReportOptions& options) {
  if (name == "table3") return counts_report(corpus_counts(corpus));
  if (name == "table4") return dialogue_report(dialogue_stats(corpus));
  if (name == "table5") return intent_report(intent_distribution(corpus));
  if (name == "table6") return fact_report(fact_stats(corpus));
  if (name == "chunks") return chunk_report(fact_chunk_histogram(corpus, options.chunk_size));
  if (name == "diversity") {
    auto provider = make_provider(options.embedder, corpus);
    return diversity_report(grouped_diversity(corpus, *provider, options.thresholds, options.cluster_threshold),
                            options.cluster_threshold);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown report: " + std::string(name));
}

}  // namespace forge::analysis
