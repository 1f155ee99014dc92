#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexsub/estimators.hpp"
#include "lexsub/io.hpp"

namespace lexsub {

inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";

// Immediate neighbours of the target, with sentence-boundary symbols.
std::string LeftNeighbour(const LexSubInstance& instance);
std::string RightNeighbour(const LexSubInstance& instance);

/// Table-driven backend for tests and fixtures.
///
/// JSON layout: {"table": {"left|right": {word: weight, ...}, ...},
///               "embeddings": {word: [floats]}, "prior": {word: count}}.
/// "*" matches any neighbour. Keys of the form "left|target|right" are
/// consulted first when the target is visible (injection base).
class ToyTableEstimator final : public SubstituteEstimator {
 public:
  explicit ToyTableEstimator(const Json& spec);
  static ToyTableEstimator FromFile(const std::filesystem::path& path);

  BackendKind kind() const override { return BackendKind::kToyTable; }
  const std::vector<std::string>& vocabulary() const override { return vocab_; }
  SubstituteDistribution EstimateContext(
      const LexSubInstance& instance,
      const EstimatorConfig& config) const override;
  const EmbeddingTable* target_embeddings() const override {
    return embeddings_ ? &*embeddings_ : nullptr;
  }
  const UnigramPrior& prior() const override { return prior_; }
  Injection default_injection() const override { return Injection::kNoTarget; }

 private:
  std::map<std::string, SubstituteDistribution> table_;
  std::vector<std::string> vocab_;
  std::optional<EmbeddingTable> embeddings_;
  UnigramPrior prior_ = UnigramPrior::Uniform();
};

/// Interpolated (Witten-Bell) bigram models run left-to-right and
/// right-to-left over a tokenized corpus, fused as P(s|L)P(s|R)/P(s)^beta.
/// The target itself is never part of either conditioning context.
class ForwardBackwardLmEstimator final : public SubstituteEstimator {
 public:
  struct Options {
    std::size_t min_count = 1;
    bool lowercase = true;
  };

  // One sentence per element, tokens separated by whitespace.
  ForwardBackwardLmEstimator(const std::vector<std::string>& sentences,
                             Options options);
  static ForwardBackwardLmEstimator FromCorpusFile(
      const std::filesystem::path& path, Options options);

  void set_embeddings(EmbeddingTable embeddings) {
    embeddings_ = std::move(embeddings);
  }

  BackendKind kind() const override { return BackendKind::kForwardBackwardLm; }
  const std::vector<std::string>& vocabulary() const override { return vocab_; }
  SubstituteDistribution EstimateContext(
      const LexSubInstance& instance,
      const EstimatorConfig& config) const override;
  const EmbeddingTable* target_embeddings() const override {
    return embeddings_ ? &*embeddings_ : nullptr;
  }
  const UnigramPrior& prior() const override { return prior_; }
  Injection default_injection() const override { return Injection::kNoTarget; }
  std::vector<Injection> supported_injections() const override;

  // P(s | previous word) and P(s | next word) over the vocabulary.
  SubstituteDistribution Forward(const std::string& previous) const;
  SubstituteDistribution Backward(const std::string& next) const;

 private:
  struct Direction {
    // history -> (word index -> count)
    std::unordered_map<std::string, std::unordered_map<std::size_t, double>>
        counts;
    std::unordered_map<std::string, double> history_totals;
  };
  SubstituteDistribution Conditional(const Direction& dir,
                                     const std::string& history) const;

  Options options_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> unigram_;  // smoothed, aligned with vocab_
  Direction forward_;
  Direction backward_;
  UnigramPrior prior_ = UnigramPrior::Uniform();
  std::optional<EmbeddingTable> embeddings_;
};

/// What a transformer-style backend is asked to score.
///
/// `visible[i] == 0` means context positions may not attend to position i
/// (permutation-LM target hiding). Empty means everything is visible.
struct ScoreRequest {
  std::vector<std::string> tokens;
  std::size_t position = 0;
  std::vector<std::uint8_t> visible;
};

/// Scores every vocabulary entry at one position; returns raw logits aligned
/// with vocabulary().
class TokenScorer {
 public:
  virtual ~TokenScorer() = default;
  virtual std::vector<float> Score(const ScoreRequest& request) const = 0;
  virtual const std::vector<std::string>& vocabulary() const = 0;
  virtual bool reentrant() const { return true; }
};

/// Talks to an external model server: POST <endpoint>/score with
/// {"tokens", "position", "visible"} and expects {"logits": [...]} aligned
/// with the vocabulary file.
class RemoteTokenScorer final : public TokenScorer {
 public:
  RemoteTokenScorer(std::string endpoint, std::vector<std::string> vocabulary,
                    int timeout_seconds = 30);
  std::vector<float> Score(const ScoreRequest& request) const override;
  const std::vector<std::string>& vocabulary() const override { return vocab_; }

 private:
  std::string endpoint_;
  std::vector<std::string> vocab_;
  int timeout_seconds_;
};

enum class VocabStyle { kPlain, kWordPiece, kSentencePiece };
VocabStyle ParseVocabStyle(std::string_view text);

// Maps raw vocabulary entries to substitute candidates: whole alphabetic
// words only. Returns (raw index, candidate string) pairs.
std::vector<std::pair<std::size_t, std::string>> FilterVocabulary(
    const std::vector<std::string>& raw, VocabStyle style);

struct TransformerOptions {
  std::string mask_token = "[MASK]";
  VocabStyle vocab_style = VocabStyle::kWordPiece;
  bool reentrant = true;
};

/// Masked-LM adapter: notgt replaces the target with the mask symbol.
class MaskedLmEstimator : public SubstituteEstimator {
 public:
  MaskedLmEstimator(std::shared_ptr<const TokenScorer> scorer,
                    TransformerOptions options,
                    std::optional<EmbeddingTable> embeddings = std::nullopt,
                    UnigramPrior prior = UnigramPrior::Uniform());

  BackendKind kind() const override { return BackendKind::kMaskedLm; }
  const std::vector<std::string>& vocabulary() const override { return vocab_; }
  SubstituteDistribution EstimateContext(
      const LexSubInstance& instance,
      const EstimatorConfig& config) const override;
  const EmbeddingTable* target_embeddings() const override {
    return embeddings_ ? &*embeddings_ : nullptr;
  }
  const UnigramPrior& prior() const override { return prior_; }
  bool reentrant() const override {
    return options_.reentrant && scorer_->reentrant();
  }

 protected:
  SubstituteDistribution ScoreToDistribution(
      const ScoreRequest& request) const;
  const TransformerOptions& options() const { return options_; }

 private:
  std::shared_ptr<const TokenScorer> scorer_;
  TransformerOptions options_;
  std::vector<std::pair<std::size_t, std::string>> candidates_;
  std::vector<std::string> vocab_;
  std::optional<EmbeddingTable> embeddings_;
  UnigramPrior prior_;
};

/// Permutation-LM adapter. notgt hides the target from every context
/// position (attention mask) and blanks its token; short contexts get the
/// configured padding text prepended.
class PermutationLmEstimator final : public MaskedLmEstimator {
 public:
  PermutationLmEstimator(std::shared_ptr<const TokenScorer> scorer,
                         TransformerOptions options,
                         std::optional<EmbeddingTable> embeddings = std::nullopt,
                         UnigramPrior prior = UnigramPrior::Uniform());

  BackendKind kind() const override { return BackendKind::kPermutationLm; }
  SubstituteDistribution EstimateContext(
      const LexSubInstance& instance,
      const EstimatorConfig& config) const override;
};

/// OOC and nPIC baselines over dependency-based word/context embeddings.
class DependencyEmbeddingEstimator final : public SubstituteEstimator {
 public:
  enum class Mode { kOoc, kNpic };
  DependencyEmbeddingEstimator(Mode mode, EmbeddingTable word_emb,
                               std::optional<EmbeddingTable> ctx_emb);

  BackendKind kind() const override {
    return BackendKind::kDependencyEmbedding;
  }
  const std::vector<std::string>& vocabulary() const override { return vocab_; }
  SubstituteDistribution EstimateContext(
      const LexSubInstance& instance,
      const EstimatorConfig& config) const override;
  std::vector<Injection> supported_injections() const override {
    return {Injection::kBase};
  }
  Mode mode() const { return mode_; }

 private:
  Mode mode_;
  EmbeddingTable word_emb_;
  std::optional<EmbeddingTable> ctx_emb_;
  std::vector<std::string> vocab_;
};

// Builds a context representation from the tokens around the target.
using ContextEncoder =
    std::function<std::vector<float>(const LexSubInstance&)>;

// Mean of the context-embedding vectors of up to `window` tokens on each side
// of the target (target excluded); zero vector if none is known.
ContextEncoder WindowMeanEncoder(std::shared_ptr<const EmbeddingTable> ctx_emb,
                                 std::size_t window);

/// context2vec-style ranking behind a pluggable context encoder.
class ContextEmbeddingEstimator final : public SubstituteEstimator {
 public:
  ContextEmbeddingEstimator(EmbeddingTable candidate_emb,
                            ContextEncoder encoder);

  BackendKind kind() const override { return BackendKind::kContextEmbedding; }
  const std::vector<std::string>& vocabulary() const override { return vocab_; }
  SubstituteDistribution EstimateContext(
      const LexSubInstance& instance,
      const EstimatorConfig& config) const override;
  const EmbeddingTable* target_embeddings() const override {
    return &candidate_emb_;
  }
  Injection default_injection() const override { return Injection::kNoTarget; }
  std::vector<Injection> supported_injections() const override;

 private:
  EmbeddingTable candidate_emb_;
  ContextEncoder encoder_;
  std::vector<std::string> vocab_;
};

}  // namespace lexsub
