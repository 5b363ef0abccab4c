#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "forge/analysis/tokenizer.hpp"
#include "forge/domain.hpp"

namespace forge::analysis {

struct CorpusCounts {
  std::size_t papers = 0;
  std::size_t dialogues = 0;
  std::size_t messages = 0;
  std::size_t sentences = 0;
  double avg_dialogues_per_paper = 0;  // rounded to one decimal

  bool operator==(const CorpusCounts&) const = default;
};

CorpusCounts corpus_counts(const Corpus& corpus);

struct DialogueStats {
  double avg_turns = 0;
  double pct_msm = 0;      // percent of messages with two or more sentences
  double avg_msg_len = 0;  // tokens per message
};

/// Throws Error{EmptyCorpus} when there are no messages.
DialogueStats dialogue_stats(const Corpus& corpus, const Tokenizer& tokenizer = {});

struct IntentRow {
  std::size_t sentences = 0;
  std::map<IntentLabel, double> pct;  // every label present, percent of `sentences`
  double information_seeking = 0;
  double argumentative = 0;
};

struct IntentDistribution {
  IntentRow proponent;
  IntentRow domain_expert;
  IntentRow total;

  const IntentRow& row(Role r) const { return r == Role::Proponent ? proponent : domain_expert; }
};

/// Throws Error{UnlabeledSentences}; the message lists every offending
/// "<dialogue>/<message>#<sentence>" id.
IntentDistribution intent_distribution(const Corpus& corpus);

struct FactStats {
  std::size_t grounded_messages = 0;
  std::size_t one_fact = 0;
  std::size_t two_fact = 0;
  double pct_1fact = 0;
  double pct_2fact = 0;
  /// Mean |i - j| of flattened sentence indices over 2-fact messages; absent
  /// when there are none.
  std::optional<double> avg_sentence_distance;
  std::size_t anchors = 0;
  std::array<double, 3> pct_by_section{};  // indexed by SectionKind

  double section_pct(SectionKind k) const { return pct_by_section[static_cast<std::size_t>(k)]; }
};

/// Throws Error{NoGroundedMessages}.
FactStats fact_stats(const Corpus& corpus);

struct ChunkHistogram {
  std::size_t chunk_size = 4;
  std::vector<std::size_t> counts;  // one bin per chunk of the longest introduction
  std::vector<double> fractions;    // counts / total; all zero without anchors
  std::size_t total = 0;
};

/// Throws Error{InvalidArgument} when chunk_size < 1.
ChunkHistogram fact_chunk_histogram(const Corpus& corpus, std::size_t chunk_size = 4);

}  // namespace forge::analysis
