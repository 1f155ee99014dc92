#include "lexsub/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

namespace lexsub {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAllZero: return "AllZero";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kTargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::kVocabMismatch: return "VocabMismatch";
    case ErrorCode::kTargetEmbeddingMissing: return "TargetEmbeddingMissing";
    case ErrorCode::kMalformedPattern: return "MalformedPattern";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyAfterFiltering: return "EmptyAfterFiltering";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyGold: return "EmptyGold";
    case ErrorCode::kMissingPoolEntry: return "MissingPoolEntry";
    case ErrorCode::kTooFewInstances: return "TooFewInstances";
    case ErrorCode::kNoSlotTokens: return "NoSlotTokens";
    case ErrorCode::kEmptyDistribution: return "EmptyDistribution";
    case ErrorCode::kUnknownPos: return "UnknownPos";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

std::string_view PosName(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return "noun";
    case Pos::kVerb: return "verb";
    case Pos::kAdj: return "adj";
    case Pos::kAdv: return "adv";
  }
  return "noun";
}

char PosLetter(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return 'n';
    case Pos::kVerb: return 'v';
    case Pos::kAdj: return 'a';
    case Pos::kAdv: return 'r';
  }
  return 'n';
}

Pos ParsePos(std::string_view text) {
  const std::string t = ToLower(text);
  if (t == "noun" || t == "n") return Pos::kNoun;
  if (t == "verb" || t == "v") return Pos::kVerb;
  if (t == "adj" || t == "a" || t == "j" || t == "s") return Pos::kAdj;
  if (t == "adv" || t == "r") return Pos::kAdv;
  throw LexsubError(ErrorCode::kUnknownPos, "unknown part of speech '" +
                                                std::string(text) + "'");
}

std::span<const std::string> LexSubInstance::left() const {
  return std::span<const std::string>(tokens).first(target_index);
}

std::span<const std::string> LexSubInstance::right() const {
  return std::span<const std::string>(tokens).subspan(target_index + 1);
}

void Validate(const LexSubInstance& instance) {
  if (instance.target_index >= instance.tokens.size()) {
    throw LexsubError(ErrorCode::kTargetOutOfRange,
                      "instance '" + instance.id + "': target index " +
                          std::to_string(instance.target_index) +
                          " outside " + std::to_string(instance.tokens.size()) +
                          " tokens");
  }
  if (instance.gold) {
    for (const auto& [word, weight] : *instance.gold) {
      if (weight < 1 || word.empty() ||
          word.find(' ') != std::string::npos) {
        throw LexsubError(ErrorCode::kInvalidArgument,
                          "instance '" + instance.id +
                              "': bad gold entry '" + word + "'");
      }
    }
  }
}

namespace {

bool ByWord(const WordProb& a, const WordProb& b) { return a.first < b.first; }

// Sorts by word and folds duplicate keys with `fold`.
template <typename Fold>
std::vector<WordProb> SortAndMerge(std::vector<WordProb> entries, Fold fold) {
  std::sort(entries.begin(), entries.end(), ByWord);
  std::vector<WordProb> out;
  out.reserve(entries.size());
  for (auto& e : entries) {
    if (!out.empty() && out.back().first == e.first) {
      out.back().second = fold(out.back().second, e.second);
    } else {
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace

SubstituteDistribution SubstituteDistribution::FromNormalized(
    std::vector<WordProb> entries) {
  std::sort(entries.begin(), entries.end(), ByWord);
  double sum = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& [word, p] = entries[i];
    if (word.empty()) {
      throw LexsubError(ErrorCode::kInvalidArgument, "empty substitute key");
    }
    if (i > 0 && entries[i - 1].first == word) {
      throw LexsubError(ErrorCode::kInvalidArgument,
                        "duplicate substitute key '" + word + "'");
    }
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw LexsubError(ErrorCode::kNegativeWeight,
                        "probability of '" + word + "' is not in [0,1]");
    }
    sum += p;
  }
  if (entries.empty() || std::abs(sum - 1.0) > 1e-6) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      "probabilities sum to " + std::to_string(sum));
  }
  return SubstituteDistribution(std::move(entries));
}

double SubstituteDistribution::prob(std::string_view word) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), word,
      [](const WordProb& e, std::string_view w) { return e.first < w; });
  return (it != entries_.end() && it->first == word) ? it->second : 0.0;
}

bool SubstituteDistribution::contains(std::string_view word) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), word,
      [](const WordProb& e, std::string_view w) { return e.first < w; });
  return it != entries_.end() && it->first == word;
}

double SubstituteDistribution::total() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.second;
  return s;
}

SubstituteDistribution normalize(std::vector<WordProb> weights) {
  double sum = 0.0;
  for (const auto& [word, w] : weights) {
    if (word.empty()) {
      throw LexsubError(ErrorCode::kInvalidArgument, "empty substitute key");
    }
    if (w < 0.0 || std::isnan(w)) {
      throw LexsubError(ErrorCode::kNegativeWeight,
                        "weight of '" + word + "' is negative");
    }
    sum += w;
  }
  if (!(sum > 0.0)) {
    throw LexsubError(ErrorCode::kAllZero, "all weights are zero");
  }
  auto merged = SortAndMerge(std::move(weights),
                             [](double a, double b) { return a + b; });
  for (auto& e : merged) e.second /= sum;
  return SubstituteDistribution(std::move(merged));
}

SubstituteDistribution normalize(const std::map<std::string, double>& weights) {
  return normalize(std::vector<WordProb>(weights.begin(), weights.end()));
}

SubstituteDistribution normalize(std::initializer_list<WordProb> weights) {
  return normalize(std::vector<WordProb>(weights));
}

SubstituteDistribution NormalizeLog(std::vector<WordProb> log_weights) {
  double max_log = -std::numeric_limits<double>::infinity();
  for (const auto& [word, lw] : log_weights) {
    if (word.empty()) {
      throw LexsubError(ErrorCode::kInvalidArgument, "empty substitute key");
    }
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
      throw LexsubError(ErrorCode::kInvalidArgument,
                        "non-finite log weight for '" + word + "'");
    }
    max_log = std::max(max_log, lw);
  }
  if (!std::isfinite(max_log)) {
    throw LexsubError(ErrorCode::kAllZero, "all weights are zero");
  }
  auto merged = SortAndMerge(std::move(log_weights), [](double a, double b) {
    const double m = std::max(a, b);
    if (!std::isfinite(m)) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
  });
  double sum = 0.0;
  for (auto& e : merged) {
    e.second = std::exp(e.second - max_log);
    sum += e.second;
  }
  for (auto& e : merged) e.second /= sum;
  return SubstituteDistribution(std::move(merged));
}

std::vector<WordProb> rank(const SubstituteDistribution& dist, std::size_t k) {
  std::vector<WordProb> out(dist.begin(), dist.end());
  const std::size_t n = std::min(k, out.size());
  auto order = [](const WordProb& a, const WordProb& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n),
                    out.end(), order);
  out.resize(n);
  return out;
}

std::vector<std::string> RankedWords(const SubstituteDistribution& dist,
                                     std::size_t k) {
  std::vector<std::string> words;
  for (auto& [w, p] : rank(dist, k)) words.push_back(std::move(w));
  return words;
}

UnigramPrior::UnigramPrior(std::unordered_map<std::string, double> probs,
                           double smoothing_mass)
    : probs_(std::move(probs)), smoothing_mass_(smoothing_mass) {
  if (!(smoothing_mass_ > 0.0)) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      "prior smoothing mass must be positive");
  }
  double sum = 0.0;
  for (const auto& [w, p] : probs_) {
    if (p < 0.0) {
      throw LexsubError(ErrorCode::kNegativeWeight, "negative prior for " + w);
    }
    sum += p;
  }
  if (sum > 1.0 + 1e-9) {
    throw LexsubError(ErrorCode::kInvalidArgument, "prior mass exceeds 1");
  }
}

UnigramPrior UnigramPrior::FromCounts(
    const std::unordered_map<std::string, double>& counts,
    double smoothing_mass) {
  double total = 0.0;
  for (const auto& [w, c] : counts) total += c;
  if (!(total > 0.0)) return Uniform();
  std::unordered_map<std::string, double> probs;
  probs.reserve(counts.size());
  for (const auto& [w, c] : counts) {
    probs.emplace(w, (1.0 - smoothing_mass) * c / total);
  }
  return UnigramPrior(std::move(probs), smoothing_mass);
}

UnigramPrior UnigramPrior::Uniform() { return UnigramPrior({}, 1.0); }

double UnigramPrior::lookup(std::string_view word) const {
  if (probs_.empty()) return smoothing_mass_;
  auto it = probs_.find(std::string(word));
  if (it == probs_.end() || it->second <= 0.0) return smoothing_mass_;
  return it->second;
}

void EmbeddingTable::add(std::string word, std::vector<float> vec) {
  if (dim_ == 0 && vectors_.empty()) dim_ = vec.size();
  if (vec.size() != dim_) {
    throw LexsubError(ErrorCode::kDimensionMismatch,
                      "vector for '" + word + "' has dimension " +
                          std::to_string(vec.size()) + ", expected " +
                          std::to_string(dim_));
  }
  for (float x : vec) {
    if (!std::isfinite(x)) {
      throw LexsubError(ErrorCode::kInvalidArgument,
                        "non-finite component in vector for '" + word + "'");
    }
  }
  vectors_[std::move(word)] = std::move(vec);
}

const std::vector<float>* EmbeddingTable::find(std::string_view word) const {
  auto it = vectors_.find(std::string(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<std::string> EmbeddingTable::words() const {
  std::vector<std::string> out;
  out.reserve(vectors_.size());
  for (const auto& [w, v] : vectors_) out.push_back(w);
  std::sort(out.begin(), out.end());
  return out;
}

double Dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw LexsubError(ErrorCode::kDimensionMismatch, "dot of unequal sizes");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return s;
}

double Norm(std::span<const float> a) { return std::sqrt(Dot(a, a)); }

double Cosine(std::span<const float> a, std::span<const float> b) {
  const double na = Norm(a);
  const double nb = Norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return Dot(a, b) / (na * nb);
}

SubstituteDistribution Softmax(std::vector<WordProb> scores,
                               double temperature) {
  if (!(temperature > 0.0)) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      "temperature must be positive");
  }
  if (scores.empty()) {
    throw LexsubError(ErrorCode::kEmptyDistribution, "softmax over nothing");
  }
  for (auto& e : scores) e.second /= temperature;
  return NormalizeLog(std::move(scores));
}

std::string ToLower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool IsAlphabeticWord(std::string_view text) {
  if (text.empty()) return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
  });
}

}  // namespace lexsub
