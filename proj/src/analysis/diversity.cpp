#include "forge/analysis/diversity.hpp"

#include <map>
#include <numeric>

#include "forge/baseline/tfidf.hpp"
#include "forge/error.hpp"

namespace forge::analysis {

namespace {

void require_nonzero(std::span<const Vector> vectors) {
  for (std::size_t i = 0; i < vectors.size(); ++i)
    if (baseline::l2_norm(vectors[i]) == 0)
      throw Error(ErrorCode::ZeroVector, "embedding " + std::to_string(i) + " has zero norm");
}

double fraction_below(std::span<const double> sims, double threshold) {
  std::size_t below = 0;
  for (double s : sims)
    if (s < threshold) ++below;
  return static_cast<double>(below) / static_cast<double>(sims.size());
}

void add_pairs(std::span<const Vector> vectors, const std::vector<std::size_t>& members,
               std::vector<double>& sims) {
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b)
      sims.push_back(baseline::cosine(vectors[members[a]], vectors[members[b]]));
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

struct PaperItems {
  std::vector<std::string> p_texts;
  std::vector<std::string> de_texts;
  std::vector<std::size_t> de_answers;  // index into p_texts
  std::vector<std::string> grounded_texts;
};

PaperItems collect(const Paper& paper, const std::vector<const Dialogue*>& dialogues) {
  PaperItems items;
  const auto sentences = paper.flattened_sentences();
  for (const Dialogue* d : dialogues) {
    std::optional<std::size_t> last_p;
    for (const auto& m : d->messages) {
      if (m.role == Role::Proponent) {
        last_p = items.p_texts.size();
        items.p_texts.push_back(m.text());
        continue;
      }
      if (last_p) {
        items.de_texts.push_back(m.text());
        items.de_answers.push_back(*last_p);
      }
      if (!m.facts.empty()) {
        std::string text = m.text();
        for (const auto& f : m.facts)
          if (auto i = paper.global_index(f)) text += " " + sentences[*i];
        items.grounded_texts.push_back(std::move(text));
      }
    }
  }
  return items;
}

}  // namespace

std::string_view group_name(DiversityGroup g) noexcept {
  switch (g) {
    case DiversityGroup::G1: return "G1";
    case DiversityGroup::G2: return "G2";
    case DiversityGroup::G3: return "G3";
  }
  return "?";
}

double diversity_score(std::span<const Vector> embeddings, double threshold) {
  if (embeddings.size() < 2) throw Error(ErrorCode::TooFewMessages, "diversity needs at least two messages");
  require_nonzero(embeddings);
  std::vector<double> sims;
  add_pairs(embeddings, iota(embeddings.size()), sims);
  return fraction_below(sims, threshold);
}

double diversity_score(std::span<const std::string> messages, EmbeddingProvider& provider, double threshold) {
  if (messages.size() < 2) throw Error(ErrorCode::TooFewMessages, "diversity needs at least two messages");
  auto vectors = provider.embed_batch(messages);
  return diversity_score(vectors, threshold);
}

std::vector<std::size_t> single_link_clusters(std::span<const Vector> vectors, double threshold) {
  std::vector<std::size_t> parent = iota(vectors.size());
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < vectors.size(); ++a)
    for (std::size_t b = a + 1; b < vectors.size(); ++b)
      if (baseline::cosine(vectors[a], vectors[b]) >= threshold) {
        auto ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
  std::map<std::size_t, std::size_t> dense;
  std::vector<std::size_t> ids(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto root = find(i);
    ids[i] = dense.emplace(root, dense.size()).first->second;
  }
  return ids;
}

GroupedDiversity grouped_diversity(const Corpus& corpus, EmbeddingProvider& provider,
                                   std::span<const double> thresholds, double cluster_threshold) {
  if (thresholds.empty()) throw Error(ErrorCode::InvalidArgument, "no thresholds given");

  std::map<std::string, std::vector<const Dialogue*>> by_paper;
  for (const auto& d : corpus.dialogues) by_paper[d.paper_id].push_back(&d);

  GroupedDiversity out;
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  std::array<std::vector<double>, 3> sums;
  for (auto& s : sums) s.assign(thresholds.size(), 0.0);

  for (const auto& [paper_id, dialogues] : by_paper) {
    if (dialogues.size() < 2) continue;
    auto paper_it = corpus.papers.find(paper_id);
    if (paper_it == corpus.papers.end()) continue;
    ++out.papers;

    auto items = collect(paper_it->second, dialogues);
    auto p_vecs = provider.embed_batch(items.p_texts);
    auto de_vecs = provider.embed_batch(items.de_texts);
    auto g3_vecs = provider.embed_batch(items.grounded_texts);
    require_nonzero(p_vecs);
    require_nonzero(de_vecs);
    require_nonzero(g3_vecs);

    std::array<std::vector<double>, 3> sims;
    add_pairs(p_vecs, iota(p_vecs.size()), sims[0]);

    auto clusters = single_link_clusters(p_vecs, cluster_threshold);
    std::map<std::size_t, std::vector<std::size_t>> replies;
    for (std::size_t i = 0; i < de_vecs.size(); ++i) replies[clusters[items.de_answers[i]]].push_back(i);
    for (const auto& [cluster, members] : replies) add_pairs(de_vecs, members, sims[1]);

    add_pairs(g3_vecs, iota(g3_vecs.size()), sims[2]);

    for (std::size_t g = 0; g < 3; ++g) {
      if (sims[g].empty()) continue;
      ++out.papers_scored[g];
      for (std::size_t t = 0; t < thresholds.size(); ++t) sums[g][t] += fraction_below(sims[g], thresholds[t]);
    }
  }
  if (out.papers == 0)
    throw Error(ErrorCode::NoMultiDialoguePapers, "no paper has two or more dialogues");

  for (std::size_t g = 0; g < 3; ++g) {
    out.scores[g].resize(thresholds.size());
    if (out.papers_scored[g] == 0) continue;
    for (std::size_t t = 0; t < thresholds.size(); ++t)
      out.scores[g][t] = sums[g][t] / static_cast<double>(out.papers_scored[g]);
  }
  return out;
}

}  // namespace forge::analysis
