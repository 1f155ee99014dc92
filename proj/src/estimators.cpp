#include "lexsub/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "lexsub/io.hpp"

namespace lexsub {

std::string_view BackendKindName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kForwardBackwardLm: return "forward-backward-lm";
    case BackendKind::kMaskedLm: return "masked-lm";
    case BackendKind::kPermutationLm: return "permutation-lm";
    case BackendKind::kContextEmbedding: return "context-embedding";
    case BackendKind::kDependencyEmbedding: return "dependency-embedding";
    case BackendKind::kToyTable: return "toy-table";
  }
  return "toy-table";
}

BackendKind ParseBackendKind(std::string_view text) {
  for (BackendKind k :
       {BackendKind::kForwardBackwardLm, BackendKind::kMaskedLm,
        BackendKind::kPermutationLm, BackendKind::kContextEmbedding,
        BackendKind::kDependencyEmbedding, BackendKind::kToyTable}) {
    if (BackendKindName(k) == text) return k;
  }
  throw LexsubError(ErrorCode::kInvalidArgument,
                    "unknown backend type '" + std::string(text) + "'");
}

std::string_view InjectionName(Injection injection) {
  switch (injection) {
    case Injection::kNoTarget: return "notgt";
    case Injection::kBase: return "base";
    case Injection::kEmbs: return "embs";
    case Injection::kPattern: return "pat";
  }
  return "base";
}

Injection ParseInjection(std::string_view text) {
  if (text == "notgt") return Injection::kNoTarget;
  if (text == "base") return Injection::kBase;
  if (text == "embs") return Injection::kEmbs;
  if (text == "pat" || text == "pattern") return Injection::kPattern;
  throw LexsubError(ErrorCode::kInvalidArgument,
                    "unknown injection '" + std::string(text) + "'");
}

void ValidatePattern(std::string_view pattern) {
  const auto tokens = SplitWhitespace(pattern);
  const auto blanks = std::count(tokens.begin(), tokens.end(), "_");
  const auto targets = std::count(tokens.begin(), tokens.end(), "T");
  if (blanks != 1 || targets > 1) {
    throw LexsubError(ErrorCode::kMalformedPattern,
                      "pattern '" + std::string(pattern) +
                          "' needs exactly one '_' and at most one 'T'");
  }
}

void EstimatorConfig::Validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      "temperature must be positive");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      "beta must be non-negative");
  }
  ValidatePattern(pattern);
}

const UnigramPrior& SubstituteEstimator::prior() const {
  static const UnigramPrior kUniform = UnigramPrior::Uniform();
  return kUniform;
}

std::vector<Injection> SubstituteEstimator::supported_injections() const {
  std::vector<Injection> out = {Injection::kNoTarget, Injection::kBase};
  if (target_embeddings() != nullptr) out.push_back(Injection::kEmbs);
  out.push_back(Injection::kPattern);
  return out;
}

SubstituteDistribution estimate_context(const SubstituteEstimator& estimator,
                                        const LexSubInstance& instance,
                                        const EstimatorConfig& config) {
  Validate(instance);
  if (config.injection != Injection::kNoTarget &&
      config.injection != Injection::kBase) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      "estimate_context takes notgt or base injection");
  }
  return estimator.EstimateContext(instance, config);
}

namespace {

// Elementwise product of two distributions over their shared support divided
// by prior^beta. Computed in log space; zero factors stay at -inf.
SubstituteDistribution CombineWithPrior(const SubstituteDistribution& a,
                                        const SubstituteDistribution& b,
                                        const UnigramPrior& prior,
                                        double beta) {
  if (!(beta >= 0.0)) {
    throw LexsubError(ErrorCode::kInvalidArgument, "beta must be >= 0");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  auto log_or_neg_inf = [](double p) { return p > 0.0 ? std::log(p) : kNegInf; };

  std::vector<WordProb> log_weights;
  auto ia = a.begin();
  auto ib = b.begin();
  // Both sides are sorted by word: merge-join.
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      double lw = log_or_neg_inf(ia->second) + log_or_neg_inf(ib->second);
      if (beta != 0.0 && std::isfinite(lw)) {
        lw -= beta * std::log(prior.lookup(ia->first));
      }
      log_weights.emplace_back(ia->first, lw);
      ++ia;
      ++ib;
    }
  }
  if (log_weights.empty()) {
    throw LexsubError(ErrorCode::kVocabMismatch,
                      "distributions share no substitutes");
  }
  return NormalizeLog(std::move(log_weights));
}

const std::vector<float>& TargetVector(const LexSubInstance& instance,
                                       const EmbeddingTable& emb) {
  for (const std::string& key :
       {instance.target(), ToLower(instance.target()), instance.lemma}) {
    if (const auto* v = emb.find(key)) return *v;
  }
  throw LexsubError(ErrorCode::kTargetEmbeddingMissing,
                    "no embedding for target '" + instance.target() + "'");
}

std::vector<std::string> AlphabeticWords(const EmbeddingTable& emb) {
  std::vector<std::string> out;
  for (auto& w : emb.words()) {
    if (IsAlphabeticWord(w)) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

SubstituteDistribution forward_backward_combine(
    const SubstituteDistribution& p_left, const SubstituteDistribution& p_right,
    const UnigramPrior& prior, double beta) {
  return CombineWithPrior(p_left, p_right, prior, beta);
}

SubstituteDistribution inject_target(const SubstituteDistribution& p_context,
                                     const SubstituteDistribution& p_target,
                                     const UnigramPrior& prior, double beta) {
  return CombineWithPrior(p_context, p_target, prior, beta);
}

SubstituteDistribution target_similarity(
    std::string_view target, const EmbeddingTable& emb, double temperature,
    const std::vector<std::string>& vocab) {
  if (!(temperature > 0.0)) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      "temperature must be positive");
  }
  const auto* target_vec = emb.find(target);
  if (target_vec == nullptr) {
    throw LexsubError(ErrorCode::kTargetEmbeddingMissing,
                      "no embedding for target '" + std::string(target) + "'");
  }
  std::vector<WordProb> scores;
  scores.reserve(vocab.size());
  std::vector<std::size_t> missing;
  double min_score = std::numeric_limits<double>::infinity();
  for (const auto& word : vocab) {
    if (const auto* v = emb.find(word)) {
      const double s = Dot(*v, *target_vec);
      min_score = std::min(min_score, s);
      scores.emplace_back(word, s);
    } else {
      missing.push_back(scores.size());
      scores.emplace_back(word, 0.0);
    }
  }
  if (!std::isfinite(min_score)) min_score = 0.0;
  for (std::size_t i : missing) scores[i].second = min_score;
  // Duplicate vocabulary entries must not double their mass.
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end(),
                           [](const WordProb& x, const WordProb& y) {
                             return x.first == y.first;
                           }),
               scores.end());
  return Softmax(std::move(scores), temperature);
}

LexSubInstance apply_pattern(const LexSubInstance& instance,
                             std::string_view pattern) {
  ValidatePattern(pattern);
  Validate(instance);
  const auto pieces = SplitWhitespace(pattern);
  if (pieces.size() == 1) return instance;

  LexSubInstance out = instance;
  out.tokens.clear();
  out.tokens.reserve(instance.tokens.size() + pieces.size() - 1);
  const auto left = instance.left();
  out.tokens.insert(out.tokens.end(), left.begin(), left.end());
  for (const auto& piece : pieces) {
    if (piece == "_") out.target_index = out.tokens.size();
    out.tokens.push_back(piece == "T" ? instance.target() : piece);
  }
  const auto right = instance.right();
  out.tokens.insert(out.tokens.end(), right.begin(), right.end());
  // Dependency indices refer to the original token positions.
  out.dependents.reset();
  return out;
}

std::vector<std::string> PaddingTokens(std::string_view padding_text) {
  std::vector<std::string> out;
  for (auto& raw : SplitWhitespace(padding_text)) {
    if (raw == kEndOfDocument) {
      out.push_back(std::move(raw));
      continue;
    }
    std::size_t end = raw.size();
    while (end > 0 && std::ispunct(static_cast<unsigned char>(raw[end - 1]))) {
      --end;
    }
    if (end > 0) out.push_back(raw.substr(0, end));
    for (std::size_t i = end; i < raw.size(); ++i) out.push_back(raw.substr(i, 1));
  }
  if (out.empty() || out.back() != kEndOfDocument) {
    out.emplace_back(kEndOfDocument);
  }
  return out;
}

LexSubInstance prepend_padding(const LexSubInstance& instance,
                               std::string_view padding_text,
                               std::size_t threshold) {
  if (SplitWhitespace(padding_text).empty()) {
    throw LexsubError(ErrorCode::kInvalidArgument, "padding text is empty");
  }
  Validate(instance);
  if (instance.tokens.size() >= threshold) return instance;
  const auto padding = PaddingTokens(padding_text);
  LexSubInstance out = instance;
  out.tokens = padding;
  out.tokens.insert(out.tokens.end(), instance.tokens.begin(),
                    instance.tokens.end());
  out.target_index += padding.size();
  if (out.dependents) {
    for (auto& d : *out.dependents) d += padding.size();
  }
  return out;
}

LexSubInstance strip_padding(const LexSubInstance& instance,
                             std::string_view padding_text) {
  const auto padding = PaddingTokens(padding_text);
  if (instance.tokens.size() <= padding.size() ||
      instance.target_index < padding.size() ||
      !std::equal(padding.begin(), padding.end(), instance.tokens.begin())) {
    return instance;
  }
  LexSubInstance out = instance;
  out.tokens.erase(out.tokens.begin(),
                   out.tokens.begin() + static_cast<std::ptrdiff_t>(padding.size()));
  out.target_index -= padding.size();
  if (out.dependents) {
    for (auto& d : *out.dependents) d -= padding.size();
  }
  return out;
}

SubstituteDistribution ooc_scores(const LexSubInstance& instance,
                                  const EmbeddingTable& emb) {
  return ooc_scores(instance, emb, AlphabeticWords(emb));
}

SubstituteDistribution ooc_scores(const LexSubInstance& instance,
                                  const EmbeddingTable& emb,
                                  const std::vector<std::string>& vocab) {
  const auto& target = TargetVector(instance, emb);
  std::vector<WordProb> scores;
  scores.reserve(vocab.size());
  for (const auto& word : vocab) {
    if (const auto* v = emb.find(word)) {
      scores.emplace_back(word, Cosine(*v, target));
    }
  }
  return Softmax(std::move(scores), 1.0);
}

bool npic_uses_window_fallback(const LexSubInstance& instance) {
  return !instance.dependents.has_value();
}

std::vector<std::string> npic_context_elements(const LexSubInstance& instance) {
  std::vector<std::string> out;
  if (instance.dependents) {
    for (std::size_t idx : *instance.dependents) {
      if (idx < instance.tokens.size() && idx != instance.target_index) {
        out.push_back(ToLower(instance.tokens[idx]));
      }
    }
    return out;
  }
  constexpr std::size_t kWindow = 2;
  const std::size_t t = instance.target_index;
  const std::size_t lo = t >= kWindow ? t - kWindow : 0;
  const std::size_t hi = std::min(instance.tokens.size(), t + kWindow + 1);
  for (std::size_t i = lo; i < hi; ++i) {
    if (i != t) out.push_back(ToLower(instance.tokens[i]));
  }
  return out;
}

SubstituteDistribution npic_scores(const LexSubInstance& instance,
                                   const EmbeddingTable& word_emb,
                                   const EmbeddingTable& ctx_emb) {
  return npic_scores(instance, word_emb, ctx_emb, AlphabeticWords(word_emb));
}

SubstituteDistribution npic_scores(const LexSubInstance& instance,
                                   const EmbeddingTable& word_emb,
                                   const EmbeddingTable& ctx_emb,
                                   const std::vector<std::string>& vocab) {
  const auto& target = TargetVector(instance, word_emb);
  std::vector<const std::vector<float>*> contexts;
  for (const auto& c : npic_context_elements(instance)) {
    if (const auto* v = ctx_emb.find(c)) contexts.push_back(v);
  }
  if (!contexts.empty() && ctx_emb.dim() != word_emb.dim()) {
    throw LexsubError(ErrorCode::kDimensionMismatch,
                      "word and context embeddings differ in dimension");
  }
  std::vector<WordProb> target_scores;
  std::vector<WordProb> context_scores;
  for (const auto& word : vocab) {
    const auto* v = word_emb.find(word);
    if (v == nullptr) continue;
    target_scores.emplace_back(word, Dot(*v, target));
    double ctx = 0.0;
    for (const auto* c : contexts) ctx += Dot(*v, *c);
    context_scores.emplace_back(word, ctx);
  }
  const auto p_target = Softmax(std::move(target_scores), 1.0);
  const auto p_context = Softmax(std::move(context_scores), 1.0);
  return CombineWithPrior(p_target, p_context, UnigramPrior::Uniform(), 0.0);
}

SubstituteDistribution c2v_rank(const LexSubInstance& instance,
                                std::span<const float> context_vector,
                                const EmbeddingTable& candidate_emb) {
  return c2v_rank(instance, context_vector, candidate_emb,
                  AlphabeticWords(candidate_emb));
}

SubstituteDistribution c2v_rank(const LexSubInstance& /*instance*/,
                                std::span<const float> context_vector,
                                const EmbeddingTable& candidate_emb,
                                const std::vector<std::string>& vocab) {
  if (context_vector.size() != candidate_emb.dim()) {
    throw LexsubError(ErrorCode::kDimensionMismatch,
                      "context vector has dimension " +
                          std::to_string(context_vector.size()) +
                          ", embeddings have " +
                          std::to_string(candidate_emb.dim()));
  }
  std::vector<WordProb> scores;
  scores.reserve(vocab.size());
  for (const auto& word : vocab) {
    if (const auto* v = candidate_emb.find(word)) {
      scores.emplace_back(word, Dot(*v, context_vector));
    }
  }
  return Softmax(std::move(scores), 1.0);
}

SubstituteDistribution generate(const SubstituteEstimator& estimator,
                                const LexSubInstance& instance,
                                const EstimatorConfig& config) {
  config.Validate();
  Validate(instance);
  if (config.backend != estimator.kind()) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      "config names backend " +
                          std::string(BackendKindName(config.backend)) +
                          " but estimator is " +
                          std::string(BackendKindName(estimator.kind())));
  }
  const auto supported = estimator.supported_injections();
  if (std::find(supported.begin(), supported.end(), config.injection) ==
      supported.end()) {
    throw LexsubError(ErrorCode::kBackendUnavailable,
                      std::string(BackendKindName(estimator.kind())) +
                          " does not support injection " +
                          std::string(InjectionName(config.injection)));
  }

  EstimatorConfig stage = config;
  switch (config.injection) {
    case Injection::kNoTarget:
    case Injection::kBase:
      return estimator.EstimateContext(instance, stage);
    case Injection::kPattern: {
      // The target is visible through the pattern; the blank slot is hidden.
      stage.injection = Injection::kNoTarget;
      return estimator.EstimateContext(apply_pattern(instance, config.pattern),
                                       stage);
    }
    case Injection::kEmbs: {
      stage.injection = estimator.default_injection();
      // The forward-backward fusion applies the frequency penalty itself; in
      // the embs mode the penalty is applied once, at injection time.
      if (estimator.kind() == BackendKind::kForwardBackwardLm) stage.beta = 0.0;
      const auto p_context = estimator.EstimateContext(instance, stage);
      const EmbeddingTable& emb = *estimator.target_embeddings();
      std::string target_key = instance.target();
      if (!emb.contains(target_key)) target_key = ToLower(instance.target());
      if (!emb.contains(target_key)) target_key = instance.lemma;
      std::vector<std::string> vocab;
      vocab.reserve(p_context.size());
      for (const auto& [w, p] : p_context) vocab.push_back(w);
      const auto p_target =
          target_similarity(target_key, emb, config.temperature, vocab);
      return inject_target(p_context, p_target, estimator.prior(), config.beta);
    }
  }
  throw LexsubError(ErrorCode::kInvalidArgument, "unhandled injection");
}

}  // namespace lexsub
