#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lexsub/core.hpp"

namespace lexsub {

enum class BackendKind {
  kForwardBackwardLm,
  kMaskedLm,
  kPermutationLm,
  kContextEmbedding,
  kDependencyEmbedding,
  kToyTable,
};

// How the target word reaches the estimator.
//   kNoTarget: hidden (mask symbol / attention mask / never seen)
//   kBase:     left in place, visible to the backend
//   kEmbs:     backend default, then fused with embedding similarity
//   kPattern:  target replaced by a dynamic pattern such as "T and then _"
enum class Injection { kNoTarget, kBase, kEmbs, kPattern };

std::string_view BackendKindName(BackendKind kind);
BackendKind ParseBackendKind(std::string_view text);
std::string_view InjectionName(Injection injection);
// Accepts notgt, base, embs, pat/pattern.
Injection ParseInjection(std::string_view text);

inline constexpr std::string_view kEndOfDocument = "<eod>";
inline constexpr std::string_view kDefaultPaddingText =
    "The following passage is taken from a longer collection of ordinary "
    "written English covering news, fiction and correspondence. <eod>";
inline constexpr std::size_t kDefaultPaddingThreshold = 50;

struct EstimatorConfig {
  BackendKind backend = BackendKind::kToyTable;
  Injection injection = Injection::kNoTarget;
  double temperature = 1.0;
  double beta = 1.0;
  std::string pattern = "T and then _";
  std::string padding_text = std::string(kDefaultPaddingText);
  // Contexts with fewer tokens than this are padded (permutation-lm only).
  std::size_t padding_threshold = kDefaultPaddingThreshold;

  // kInvalidArgument for temperature <= 0 or beta < 0, kMalformedPattern for
  // a bad template.
  void Validate() const;
};

/// A backend that turns a context into P(s|C) over its vocabulary.
///
/// Implementations must be deterministic given (instance, config). Backends
/// that cannot be called concurrently report reentrant() == false; parallel
/// drivers then serialize calls to them.
class SubstituteEstimator {
 public:
  virtual ~SubstituteEstimator() = default;

  virtual BackendKind kind() const = 0;
  virtual const std::vector<std::string>& vocabulary() const = 0;

  // injection is kNoTarget or kBase here; the free function estimate_context
  // checks this before dispatching.
  virtual SubstituteDistribution EstimateContext(
      const LexSubInstance& instance, const EstimatorConfig& config) const = 0;

  // Embeddings used for P(s|T); nullptr disables the embs injection.
  virtual const EmbeddingTable* target_embeddings() const { return nullptr; }
  virtual const UnigramPrior& prior() const;
  virtual bool reentrant() const { return true; }
  // What the backend sees of the target when nothing is requested.
  virtual Injection default_injection() const { return Injection::kBase; }
  virtual std::vector<Injection> supported_injections() const;
};

SubstituteDistribution estimate_context(const SubstituteEstimator& estimator,
                                        const LexSubInstance& instance,
                                        const EstimatorConfig& config);

// P(s|L,R) ∝ P(s|L) P(s|R) / P(s)^beta over the shared support.
SubstituteDistribution forward_backward_combine(
    const SubstituteDistribution& p_left, const SubstituteDistribution& p_right,
    const UnigramPrior& prior, double beta);

// P(s|T) ∝ exp(<emb_s, emb_T> / temperature) over `vocab`. Vocabulary words
// without a vector get the smallest inner product observed in the batch.
SubstituteDistribution target_similarity(std::string_view target,
                                         const EmbeddingTable& emb,
                                         double temperature,
                                         const std::vector<std::string>& vocab);

// P(s|C,T) ∝ P(s|C) P(s|T) / P(s)^beta over the shared support.
SubstituteDistribution inject_target(const SubstituteDistribution& p_context,
                                     const SubstituteDistribution& p_target,
                                     const UnigramPrior& prior, double beta);

// Replaces the target with the pattern expansion ("T" -> target word) and
// moves target_index onto the "_" slot. A bare "_" leaves the instance as is.
LexSubInstance apply_pattern(const LexSubInstance& instance,
                             std::string_view pattern);
void ValidatePattern(std::string_view pattern);

// Padding text split into tokens, with trailing punctuation detached and the
// end-of-document symbol appended when missing.
std::vector<std::string> PaddingTokens(std::string_view padding_text);
// Prepends the padding when the instance has fewer than `threshold` tokens.
LexSubInstance prepend_padding(const LexSubInstance& instance,
                               std::string_view padding_text,
                               std::size_t threshold = kDefaultPaddingThreshold);
// Inverse of prepend_padding; no-op when the padding prefix is absent.
LexSubInstance strip_padding(const LexSubInstance& instance,
                             std::string_view padding_text);

// Out-of-context baseline: softmax over cosine(emb_s, emb_T).
SubstituteDistribution ooc_scores(const LexSubInstance& instance,
                                  const EmbeddingTable& emb);
SubstituteDistribution ooc_scores(const LexSubInstance& instance,
                                  const EmbeddingTable& emb,
                                  const std::vector<std::string>& vocab);

// Context elements used by nPIC: the dependency neighbours when present,
// otherwise a +-2 token window.
std::vector<std::string> npic_context_elements(const LexSubInstance& instance);
bool npic_uses_window_fallback(const LexSubInstance& instance);

// nPIC: softmax(<w_s, w_T>) * softmax(sum_c <w_s, v_c>), renormalized.
SubstituteDistribution npic_scores(const LexSubInstance& instance,
                                   const EmbeddingTable& word_emb,
                                   const EmbeddingTable& ctx_emb);
SubstituteDistribution npic_scores(const LexSubInstance& instance,
                                   const EmbeddingTable& word_emb,
                                   const EmbeddingTable& ctx_emb,
                                   const std::vector<std::string>& vocab);

// context2vec-style ranking: softmax of <emb_s, context_vector> at T = 1.
SubstituteDistribution c2v_rank(const LexSubInstance& instance,
                                std::span<const float> context_vector,
                                const EmbeddingTable& candidate_emb);
SubstituteDistribution c2v_rank(const LexSubInstance& instance,
                                std::span<const float> context_vector,
                                const EmbeddingTable& candidate_emb,
                                const std::vector<std::string>& vocab);

/// Full substitute generation for one instance: applies the pattern, masking
/// or padding that `config.injection` asks for, runs the backend and, for
/// kEmbs, fuses the result with target similarity.
SubstituteDistribution generate(const SubstituteEstimator& estimator,
                                const LexSubInstance& instance,
                                const EstimatorConfig& config);

}  // namespace lexsub
