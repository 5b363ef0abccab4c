#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/analysis/embedding.hpp"
#include "forge/domain.hpp"

namespace forge::analysis {

/// G1: P messages. G2: DE messages grouped by the topic cluster of the P
/// message they answer. G3: grounded DE messages followed by their fact
/// sentences.
enum class DiversityGroup { G1, G2, G3 };

inline constexpr DiversityGroup kAllGroups[] = {DiversityGroup::G1, DiversityGroup::G2, DiversityGroup::G3};

std::string_view group_name(DiversityGroup g) noexcept;

/// Fraction of unordered pairs whose cosine similarity is below `threshold`.
/// Throws Error{TooFewMessages} for fewer than two vectors and
/// Error{ZeroVector} for a zero-norm vector.
double diversity_score(std::span<const Vector> embeddings, double threshold);
double diversity_score(std::span<const std::string> messages, EmbeddingProvider& provider, double threshold);

/// Cluster ids from single-link merging of vectors at cosine >= threshold.
/// Ids are dense and numbered by first member.
std::vector<std::size_t> single_link_clusters(std::span<const Vector> vectors, double threshold);

struct GroupedDiversity {
  std::vector<double> thresholds;
  /// scores[group][t] is the mean over contributing papers; absent when no
  /// paper had a pair for that group.
  std::array<std::vector<std::optional<double>>, 3> scores;
  std::array<std::size_t, 3> papers_scored{};
  std::size_t papers = 0;  // papers with two or more dialogues

  const std::optional<double>& score(DiversityGroup g, std::size_t t) const {
    return scores[static_cast<std::size_t>(g)][t];
  }
};

/// Only papers with at least two dialogues take part. Throws
/// Error{NoMultiDialoguePapers} when there are none and Error{InvalidArgument}
/// for an empty threshold list.
GroupedDiversity grouped_diversity(const Corpus& corpus, EmbeddingProvider& provider,
                                   std::span<const double> thresholds, double cluster_threshold = 0.5);

}  // namespace forge::analysis
