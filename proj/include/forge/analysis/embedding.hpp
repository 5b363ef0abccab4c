#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/baseline/tfidf.hpp"
#include "forge/domain.hpp"

namespace forge::analysis {

using Vector = std::vector<double>;

/// Maps text to a finite vector of fixed dimension. The same text always
/// yields the same vector.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual Vector embed(std::string_view text) = 0;
  /// Default calls embed() per text; providers backed by a process override
  /// this to make one call per batch.
  virtual std::vector<Vector> embed_batch(std::span<const std::string> texts);
};

class TfidfEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit TfidfEmbeddingProvider(baseline::TfidfModel model) : model_(std::move(model)) {}
  /// Fit on every message text and every paper sentence of the corpus.
  static TfidfEmbeddingProvider fit_on(const Corpus& corpus, Tokenizer tokenizer = {});

  Vector embed(std::string_view text) override;
  const baseline::TfidfModel& model() const noexcept { return model_; }

 private:
  baseline::TfidfModel model_;
};

/// Runs a shell command that reads one JSON string per input line and writes
/// one JSON array of numbers per output line. Results are cached per text.
/// Throws Error{GeneratorFailure} on nonzero exit or malformed output.
class ExternalEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit ExternalEmbeddingProvider(std::string command) : command_(std::move(command)) {}

  Vector embed(std::string_view text) override;
  std::vector<Vector> embed_batch(std::span<const std::string> texts) override;

 private:
  std::string command_;
  std::map<std::string, Vector, std::less<>> cache_;
  std::size_t dimension_ = 0;
};

/// Fixed text → vector table; unknown texts throw Error{InvalidArgument}.
class TableEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit TableEmbeddingProvider(std::map<std::string, Vector, std::less<>> table)
      : table_(std::move(table)) {}

  Vector embed(std::string_view text) override;

 private:
  std::map<std::string, Vector, std::less<>> table_;
};

/// "tfidf" or "external:<cmd>"; throws Error{InvalidArgument} otherwise.
std::unique_ptr<EmbeddingProvider> make_provider(std::string_view spec, const Corpus& corpus);

}  // namespace forge::analysis
