#include "lexsub/backends.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <httplib.h>

namespace lexsub {

std::string LeftNeighbour(const LexSubInstance& instance) {
  return instance.target_index == 0
             ? std::string(kSentenceStart)
             : instance.tokens[instance.target_index - 1];
}

std::string RightNeighbour(const LexSubInstance& instance) {
  return instance.target_index + 1 >= instance.tokens.size()
             ? std::string(kSentenceEnd)
             : instance.tokens[instance.target_index + 1];
}

// ---------------------------------------------------------------------------
// Toy table

ToyTableEstimator::ToyTableEstimator(const Json& spec) {
  const Json& table = spec.contains("table") ? spec.at("table") : spec;
  std::set<std::string> vocab;
  for (const auto& [key, weights] : table.items()) {
    std::vector<WordProb> entries;
    for (const auto& [word, w] : weights.items()) {
      entries.emplace_back(word, w.get<double>());
      vocab.insert(word);
    }
    table_.emplace(ToLower(key), normalize(std::move(entries)));
  }
  vocab_.assign(vocab.begin(), vocab.end());
  if (auto it = spec.find("embeddings"); it != spec.end()) {
    EmbeddingTable emb;
    for (const auto& [word, vec] : it->items()) {
      emb.add(word, vec.get<std::vector<float>>());
    }
    embeddings_ = std::move(emb);
  }
  if (auto it = spec.find("prior"); it != spec.end()) {
    std::unordered_map<std::string, double> counts;
    for (const auto& [word, c] : it->items()) counts[word] = c.get<double>();
    prior_ = UnigramPrior::FromCounts(counts);
  }
}

ToyTableEstimator ToyTableEstimator::FromFile(
    const std::filesystem::path& path) {
  return ToyTableEstimator(ReadJsonFile(path));
}

SubstituteDistribution ToyTableEstimator::EstimateContext(
    const LexSubInstance& instance, const EstimatorConfig& config) const {
  const std::string left = ToLower(LeftNeighbour(instance));
  const std::string right = ToLower(RightNeighbour(instance));
  std::vector<std::string> keys;
  if (config.injection == Injection::kBase) {
    const std::string target = ToLower(instance.target());
    keys.push_back(left + "|" + target + "|" + right);
    keys.push_back("*|" + target + "|*");
  }
  keys.push_back(left + "|" + right);
  keys.push_back(left + "|*");
  keys.push_back("*|" + right);
  keys.push_back("*|*");
  for (const auto& key : keys) {
    if (auto it = table_.find(key); it != table_.end()) return it->second;
  }
  throw LexsubError(ErrorCode::kEmptyDistribution,
                    "toy table has no entry for context (" + left + ", " +
                        right + ")");
}

// ---------------------------------------------------------------------------
// Forward-backward bigram LM

ForwardBackwardLmEstimator::ForwardBackwardLmEstimator(
    const std::vector<std::string>& sentences, Options options)
    : options_(options) {
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(sentences.size());
  std::unordered_map<std::string, double> counts;
  for (const auto& line : sentences) {
    auto tokens = SplitWhitespace(options_.lowercase ? ToLower(line) : line);
    if (tokens.empty()) continue;
    for (const auto& t : tokens) counts[t] += 1.0;
    corpus.push_back(std::move(tokens));
  }
  for (const auto& [w, c] : counts) {
    if (c >= static_cast<double>(options_.min_count) && IsAlphabeticWord(w)) {
      vocab_.push_back(w);
    }
  }
  if (vocab_.empty()) {
    throw LexsubError(ErrorCode::kBackendUnavailable,
                      "forward-backward LM corpus has no usable words");
  }
  std::sort(vocab_.begin(), vocab_.end());
  double total = 0.0;
  std::unordered_map<std::string, double> vocab_counts;
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    index_.emplace(vocab_[i], i);
    total += counts[vocab_[i]];
    vocab_counts[vocab_[i]] = counts[vocab_[i]];
  }
  unigram_.resize(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    unigram_[i] = (counts[vocab_[i]] + 1.0) /
                  (total + static_cast<double>(vocab_.size()));
  }
  prior_ = UnigramPrior::FromCounts(vocab_counts);

  for (const auto& tokens : corpus) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto it = index_.find(tokens[i]);
      if (it == index_.end()) continue;
      const std::string prev =
          i == 0 ? std::string(kSentenceStart) : tokens[i - 1];
      const std::string next =
          i + 1 == tokens.size() ? std::string(kSentenceEnd) : tokens[i + 1];
      forward_.counts[prev][it->second] += 1.0;
      forward_.history_totals[prev] += 1.0;
      backward_.counts[next][it->second] += 1.0;
      backward_.history_totals[next] += 1.0;
    }
  }
}

ForwardBackwardLmEstimator ForwardBackwardLmEstimator::FromCorpusFile(
    const std::filesystem::path& path, Options options) {
  return ForwardBackwardLmEstimator(ReadLines(path), options);
}

std::vector<Injection> ForwardBackwardLmEstimator::supported_injections()
    const {
  std::vector<Injection> out = {Injection::kNoTarget};
  if (embeddings_) out.push_back(Injection::kEmbs);
  out.push_back(Injection::kPattern);
  return out;
}

SubstituteDistribution ForwardBackwardLmEstimator::Conditional(
    const Direction& dir, const std::string& history) const {
  const std::string key = options_.lowercase ? ToLower(history) : history;
  std::vector<WordProb> probs;
  probs.reserve(vocab_.size());
  auto it = dir.counts.find(key);
  if (it == dir.counts.end()) {
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      probs.emplace_back(vocab_[i], unigram_[i]);
    }
    return normalize(std::move(probs));
  }
  // Witten-Bell: P(w|h) = (c(h,w) + T(h) P_uni(w)) / (c(h) + T(h)).
  const double types = static_cast<double>(it->second.size());
  const double hist_total = dir.history_totals.at(key);
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    double c = 0.0;
    if (auto jt = it->second.find(i); jt != it->second.end()) c = jt->second;
    probs.emplace_back(vocab_[i],
                       (c + types * unigram_[i]) / (hist_total + types));
  }
  return normalize(std::move(probs));
}

SubstituteDistribution ForwardBackwardLmEstimator::Forward(
    const std::string& previous) const {
  return Conditional(forward_, previous);
}

SubstituteDistribution ForwardBackwardLmEstimator::Backward(
    const std::string& next) const {
  return Conditional(backward_, next);
}

SubstituteDistribution ForwardBackwardLmEstimator::EstimateContext(
    const LexSubInstance& instance, const EstimatorConfig& config) const {
  // Only the neighbours are read; the target token never is.
  const auto p_left = Forward(LeftNeighbour(instance));
  const auto p_right = Backward(RightNeighbour(instance));
  return forward_backward_combine(p_left, p_right, prior_, config.beta);
}

// ---------------------------------------------------------------------------
// Transformer-style adapters

RemoteTokenScorer::RemoteTokenScorer(std::string endpoint,
                                     std::vector<std::string> vocabulary,
                                     int timeout_seconds)
    : endpoint_(std::move(endpoint)),
      vocab_(std::move(vocabulary)),
      timeout_seconds_(timeout_seconds) {}

std::vector<float> RemoteTokenScorer::Score(const ScoreRequest& request) const {
  httplib::Client client(endpoint_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  Json body;
  body["tokens"] = request.tokens;
  body["position"] = request.position;
  body["visible"] = request.visible;
  auto res = client.Post("/score", body.dump(), "application/json");
  if (!res || res->status != 200) {
    throw LexsubError(ErrorCode::kBackendUnavailable,
                      "model server " + endpoint_ + " did not answer");
  }
  std::vector<float> logits;
  try {
    logits = Json::parse(res->body).at("logits").get<std::vector<float>>();
  } catch (const Json::exception& e) {
    throw LexsubError(ErrorCode::kBackendUnavailable,
                      std::string("bad model server reply: ") + e.what());
  }
  if (logits.size() != vocab_.size()) {
    throw LexsubError(ErrorCode::kDimensionMismatch,
                      "model server returned " + std::to_string(logits.size()) +
                          " logits for a vocabulary of " +
                          std::to_string(vocab_.size()));
  }
  return logits;
}

VocabStyle ParseVocabStyle(std::string_view text) {
  if (text == "plain") return VocabStyle::kPlain;
  if (text == "wordpiece") return VocabStyle::kWordPiece;
  if (text == "sentencepiece") return VocabStyle::kSentencePiece;
  throw LexsubError(ErrorCode::kInvalidArgument,
                    "unknown vocabulary style '" + std::string(text) + "'");
}

std::vector<std::pair<std::size_t, std::string>> FilterVocabulary(
    const std::vector<std::string>& raw, VocabStyle style) {
  static constexpr std::string_view kWordStart = "\xE2\x96\x81";  // U+2581
  std::vector<std::pair<std::size_t, std::string>> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string_view piece = raw[i];
    switch (style) {
      case VocabStyle::kPlain:
        break;
      case VocabStyle::kWordPiece:
        if (piece.starts_with("##")) continue;
        break;
      case VocabStyle::kSentencePiece:
        // Pieces without the word-start marker continue a previous word.
        if (!piece.starts_with(kWordStart)) continue;
        piece.remove_prefix(kWordStart.size());
        break;
    }
    if (IsAlphabeticWord(piece)) out.emplace_back(i, std::string(piece));
  }
  return out;
}

MaskedLmEstimator::MaskedLmEstimator(std::shared_ptr<const TokenScorer> scorer,
                                     TransformerOptions options,
                                     std::optional<EmbeddingTable> embeddings,
                                     UnigramPrior prior)
    : scorer_(std::move(scorer)),
      options_(std::move(options)),
      embeddings_(std::move(embeddings)),
      prior_(std::move(prior)) {
  if (!scorer_) {
    throw LexsubError(ErrorCode::kBackendUnavailable, "no token scorer");
  }
  candidates_ = FilterVocabulary(scorer_->vocabulary(), options_.vocab_style);
  std::set<std::string> unique;
  for (const auto& [idx, word] : candidates_) unique.insert(word);
  vocab_.assign(unique.begin(), unique.end());
  if (vocab_.empty()) {
    throw LexsubError(ErrorCode::kBackendUnavailable,
                      "scorer vocabulary has no whole-word entries");
  }
}

SubstituteDistribution MaskedLmEstimator::ScoreToDistribution(
    const ScoreRequest& request) const {
  const auto logits = scorer_->Score(request);
  if (logits.size() != scorer_->vocabulary().size()) {
    throw LexsubError(ErrorCode::kDimensionMismatch,
                      "scorer returned a wrong number of logits");
  }
  std::vector<WordProb> scores;
  scores.reserve(candidates_.size());
  for (const auto& [idx, word] : candidates_) {
    scores.emplace_back(word, static_cast<double>(logits[idx]));
  }
  // Softmax restricted to whole-word candidates; NormalizeLog folds any
  // duplicate surface forms by log-sum-exp.
  return NormalizeLog(std::move(scores));
}

SubstituteDistribution MaskedLmEstimator::EstimateContext(
    const LexSubInstance& instance, const EstimatorConfig& config) const {
  ScoreRequest request;
  request.tokens = instance.tokens;
  request.position = instance.target_index;
  if (config.injection == Injection::kNoTarget) {
    request.tokens[instance.target_index] = options_.mask_token;
  }
  return ScoreToDistribution(request);
}

PermutationLmEstimator::PermutationLmEstimator(
    std::shared_ptr<const TokenScorer> scorer, TransformerOptions options,
    std::optional<EmbeddingTable> embeddings, UnigramPrior prior)
    : MaskedLmEstimator(std::move(scorer), std::move(options),
                        std::move(embeddings), std::move(prior)) {}

SubstituteDistribution PermutationLmEstimator::EstimateContext(
    const LexSubInstance& instance, const EstimatorConfig& config) const {
  const LexSubInstance padded = prepend_padding(
      instance, config.padding_text, config.padding_threshold);
  ScoreRequest request;
  request.tokens = padded.tokens;
  request.position = padded.target_index;
  if (config.injection == Injection::kNoTarget) {
    request.tokens[padded.target_index] = options().mask_token;
    request.visible.assign(padded.tokens.size(), 1);
    request.visible[padded.target_index] = 0;
  }
  return ScoreToDistribution(request);
}

// ---------------------------------------------------------------------------
// Embedding baselines

namespace {

std::vector<std::string> AlphabeticVocabulary(const EmbeddingTable& emb) {
  std::vector<std::string> out;
  for (auto& w : emb.words()) {
    if (IsAlphabeticWord(w)) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

DependencyEmbeddingEstimator::DependencyEmbeddingEstimator(
    Mode mode, EmbeddingTable word_emb, std::optional<EmbeddingTable> ctx_emb)
    : mode_(mode),
      word_emb_(std::move(word_emb)),
      ctx_emb_(std::move(ctx_emb)),
      vocab_(AlphabeticVocabulary(word_emb_)) {
  if (mode_ == Mode::kNpic && !ctx_emb_) {
    throw LexsubError(ErrorCode::kBackendUnavailable,
                      "nPIC needs context embeddings");
  }
}

SubstituteDistribution DependencyEmbeddingEstimator::EstimateContext(
    const LexSubInstance& instance, const EstimatorConfig& /*config*/) const {
  if (mode_ == Mode::kOoc) return ooc_scores(instance, word_emb_, vocab_);
  return npic_scores(instance, word_emb_, *ctx_emb_, vocab_);
}

ContextEncoder WindowMeanEncoder(std::shared_ptr<const EmbeddingTable> ctx_emb,
                                 std::size_t window) {
  return [ctx_emb = std::move(ctx_emb), window](const LexSubInstance& inst) {
    std::vector<float> sum(ctx_emb->dim(), 0.0f);
    std::size_t n = 0;
    const std::size_t t = inst.target_index;
    const std::size_t lo = t >= window ? t - window : 0;
    const std::size_t hi = std::min(inst.tokens.size(), t + window + 1);
    for (std::size_t i = lo; i < hi; ++i) {
      if (i == t) continue;
      const auto* v = ctx_emb->find(ToLower(inst.tokens[i]));
      if (v == nullptr) continue;
      for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += (*v)[d];
      ++n;
    }
    if (n > 0) {
      for (float& x : sum) x /= static_cast<float>(n);
    }
    return sum;
  };
}

ContextEmbeddingEstimator::ContextEmbeddingEstimator(
    EmbeddingTable candidate_emb, ContextEncoder encoder)
    : candidate_emb_(std::move(candidate_emb)),
      encoder_(std::move(encoder)),
      vocab_(AlphabeticVocabulary(candidate_emb_)) {}

std::vector<Injection> ContextEmbeddingEstimator::supported_injections()
    const {
  return {Injection::kNoTarget, Injection::kEmbs, Injection::kPattern};
}

SubstituteDistribution ContextEmbeddingEstimator::EstimateContext(
    const LexSubInstance& instance, const EstimatorConfig& /*config*/) const {
  const auto context = encoder_(instance);
  return c2v_rank(instance, context, candidate_emb_, vocab_);
}

}  // namespace lexsub
