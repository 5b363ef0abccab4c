#include "forge/analysis/stats.hpp"

#include <cmath>

#include "forge/error.hpp"

namespace forge::analysis {

namespace {

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

double mean(double sum, std::size_t n) { return n == 0 ? 0.0 : sum / static_cast<double>(n); }

const Paper* paper_of(const Corpus& corpus, const Dialogue& d) {
  auto it = corpus.papers.find(d.paper_id);
  return it == corpus.papers.end() ? nullptr : &it->second;
}

IntentRow make_row(const std::map<IntentLabel, std::size_t>& counts) {
  IntentRow row;
  for (const auto& [label, n] : counts) row.sentences += n;
  for (IntentLabel label : kAllIntents) {
    auto it = counts.find(label);
    const std::size_t n = it == counts.end() ? 0 : it->second;
    const double p = percent(n, row.sentences);
    row.pct[label] = p;
    (intent_group(label) == IntentGroup::InformationSeeking ? row.information_seeking : row.argumentative) += p;
  }
  return row;
}

}  // namespace

CorpusCounts corpus_counts(const Corpus& corpus) {
  CorpusCounts c;
  c.papers = corpus.papers.size();
  c.dialogues = corpus.dialogues.size();
  for (const auto& d : corpus.dialogues) {
    c.messages += d.messages.size();
    for (const auto& m : d.messages) c.sentences += m.sentences.size();
  }
  if (c.papers > 0)
    c.avg_dialogues_per_paper =
        std::round(10.0 * static_cast<double>(c.dialogues) / static_cast<double>(c.papers)) / 10.0;
  return c;
}

DialogueStats dialogue_stats(const Corpus& corpus, const Tokenizer& tokenizer) {
  std::size_t messages = 0, msm = 0, tokens = 0, turns = 0;
  for (const auto& d : corpus.dialogues) {
    turns += derive_turns(d).size();
    for (const auto& m : d.messages) {
      ++messages;
      if (m.is_multi_sentence()) ++msm;
      for (const auto& s : m.sentences) tokens += tokenizer.tokenize(s.text).size();
    }
  }
  if (messages == 0) throw Error(ErrorCode::EmptyCorpus, "corpus has no messages");
  DialogueStats s;
  s.avg_turns = mean(static_cast<double>(turns), corpus.dialogues.size());
  s.pct_msm = percent(msm, messages);
  s.avg_msg_len = mean(static_cast<double>(tokens), messages);
  return s;
}

IntentDistribution intent_distribution(const Corpus& corpus) {
  std::map<IntentLabel, std::size_t> p, de, all;
  std::vector<std::string> unlabeled;
  for (const auto& d : corpus.dialogues)
    for (const auto& m : d.messages)
      for (std::size_t i = 0; i < m.sentences.size(); ++i) {
        const auto& label = m.sentences[i].intent;
        if (!label) {
          unlabeled.push_back(d.dialogue_id + "/" + m.message_id + "#" + std::to_string(i));
          continue;
        }
        ++(m.role == Role::Proponent ? p : de)[*label];
        ++all[*label];
      }
  if (!unlabeled.empty()) {
    std::string list;
    for (const auto& id : unlabeled) list += (list.empty() ? "" : ", ") + id;
    throw Error(ErrorCode::UnlabeledSentences, "unlabeled sentences: " + list, unlabeled.front());
  }
  return {make_row(p), make_row(de), make_row(all)};
}

FactStats fact_stats(const Corpus& corpus) {
  FactStats s;
  std::array<std::size_t, 3> by_section{};
  double distance_sum = 0;
  for (const auto& d : corpus.dialogues) {
    const Paper* paper = paper_of(corpus, d);
    for (const auto& m : d.messages) {
      if (m.facts.empty()) continue;
      ++s.grounded_messages;
      if (m.facts.size() == 1) ++s.one_fact;
      if (m.facts.size() == 2) {
        ++s.two_fact;
        if (paper) {
          auto a = paper->global_index(m.facts[0]);
          auto b = paper->global_index(m.facts[1]);
          if (a && b) distance_sum += static_cast<double>(*a > *b ? *a - *b : *b - *a);
        }
      }
      for (const auto& f : m.facts) {
        ++by_section[static_cast<std::size_t>(f.section)];
        ++s.anchors;
      }
    }
  }
  if (s.grounded_messages == 0) throw Error(ErrorCode::NoGroundedMessages, "no message carries a fact");
  s.pct_1fact = percent(s.one_fact, s.grounded_messages);
  s.pct_2fact = percent(s.two_fact, s.grounded_messages);
  if (s.two_fact > 0) s.avg_sentence_distance = distance_sum / static_cast<double>(s.two_fact);
  for (std::size_t k = 0; k < 3; ++k) s.pct_by_section[k] = percent(by_section[k], s.anchors);
  return s;
}

ChunkHistogram fact_chunk_histogram(const Corpus& corpus, std::size_t chunk_size) {
  if (chunk_size < 1) throw Error(ErrorCode::InvalidArgument, "chunk size must be at least 1");
  ChunkHistogram h;
  h.chunk_size = chunk_size;
  std::size_t longest = 0;
  for (const auto& [id, paper] : corpus.papers)
    if (const Section* intro = paper.section(SectionKind::Introduction))
      longest = std::max(longest, intro->sentences.size());
  h.counts.assign((longest + chunk_size - 1) / chunk_size, 0);

  for (const auto& d : corpus.dialogues)
    for (const auto& m : d.messages)
      for (const auto& f : m.facts) {
        if (f.section != SectionKind::Introduction) continue;
        const std::size_t chunk = f.sentence_index / chunk_size;
        if (chunk >= h.counts.size()) h.counts.resize(chunk + 1, 0);
        ++h.counts[chunk];
        ++h.total;
      }
  h.fractions.reserve(h.counts.size());
  for (std::size_t n : h.counts)
    h.fractions.push_back(h.total == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(h.total));
  return h;
}

}  // namespace forge::analysis
