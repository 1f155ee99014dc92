#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexsub/error.hpp"

namespace lexsub {

enum class Pos { kNoun, kVerb, kAdj, kAdv };

std::string_view PosName(Pos pos);
// Accepts "noun"/"n", "verb"/"v", "adj"/"a"/"j"/"s", "adv"/"r".
Pos ParsePos(std::string_view text);
// Single-letter tag used by SemEval and WordNet files (n, v, a, r).
char PosLetter(Pos pos);

using GoldWeights = std::map<std::string, int>;

/// One lexical-substitution example: a tokenized context with a target slot.
///
/// The left context is tokens[0, target_index) and the right context is
/// tokens(target_index, end). Gold maps single-word substitute lemmas to
/// annotator counts.
struct LexSubInstance {
  std::string id;
  std::vector<std::string> tokens;
  std::size_t target_index = 0;
  std::string lemma;
  Pos pos = Pos::kNoun;
  std::optional<GoldWeights> gold;
  // Optional dependency neighbours of the target (token indices).
  std::optional<std::vector<std::size_t>> dependents;

  const std::string& target() const { return tokens.at(target_index); }
  std::span<const std::string> left() const;
  std::span<const std::string> right() const;
};

// Throws kTargetOutOfRange or kInvalidArgument on broken invariants.
void Validate(const LexSubInstance& instance);

using WordProb = std::pair<std::string, double>;

/// Normalized probability mass over candidate substitute strings.
///
/// Entries are kept sorted by word, which makes iteration order (and hence all
/// downstream floating-point reductions) independent of how the distribution
/// was built.
class SubstituteDistribution {
 public:
  SubstituteDistribution() = default;

  // Validating constructor: keys non-empty and unique, values >= 0, sum = 1
  // within 1e-6.
  static SubstituteDistribution FromNormalized(std::vector<WordProb> entries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<WordProb>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // 0 for words outside the support.
  double prob(std::string_view word) const;
  bool contains(std::string_view word) const;
  double total() const;

  friend bool operator==(const SubstituteDistribution&,
                         const SubstituteDistribution&) = default;

 private:
  explicit SubstituteDistribution(std::vector<WordProb> sorted)
      : entries_(std::move(sorted)) {}
  friend SubstituteDistribution normalize(std::vector<WordProb> weights);
  friend SubstituteDistribution NormalizeLog(std::vector<WordProb> log_weights);

  std::vector<WordProb> entries_;
};

SubstituteDistribution normalize(std::vector<WordProb> weights);
SubstituteDistribution normalize(const std::map<std::string, double>& weights);
SubstituteDistribution normalize(std::initializer_list<WordProb> weights);

// Log-space path: entries carry unnormalized log-weights (-inf allowed for
// zero mass). Uses max-shifted exponentiation so products of very peaky
// distributions do not underflow before renormalization.
SubstituteDistribution NormalizeLog(std::vector<WordProb> log_weights);

// Descending by probability, ties by ascending word; length min(k, |dist|).
std::vector<WordProb> rank(const SubstituteDistribution& dist, std::size_t k);
std::vector<std::string> RankedWords(const SubstituteDistribution& dist,
                                     std::size_t k);

/// Unigram frequency prior P(s). Unknown words get smoothing_mass, never 0.
class UnigramPrior {
 public:
  UnigramPrior() = default;
  UnigramPrior(std::unordered_map<std::string, double> probs,
               double smoothing_mass);

  static UnigramPrior FromCounts(
      const std::unordered_map<std::string, double>& counts,
      double smoothing_mass = 1e-9);
  // Same constant for every word; makes any beta a no-op.
  static UnigramPrior Uniform();

  double lookup(std::string_view word) const;
  double smoothing_mass() const { return smoothing_mass_; }
  bool uniform() const { return probs_.empty(); }

 private:
  std::unordered_map<std::string, double> probs_;
  double smoothing_mass_ = 1.0;
};

/// Word vectors of a fixed dimension.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = 0) : dim_(dim) {}

  void add(std::string word, std::vector<float> vec);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  // nullptr when absent.
  const std::vector<float>* find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word) != nullptr; }
  std::vector<std::string> words() const;

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

double Dot(std::span<const float> a, std::span<const float> b);
double Norm(std::span<const float> a);
double Cosine(std::span<const float> a, std::span<const float> b);

// Numerically stable softmax over (word, score) pairs.
SubstituteDistribution Softmax(std::vector<WordProb> scores,
                               double temperature = 1.0);

std::string ToLower(std::string_view text);
bool IsAlphabeticWord(std::string_view text);

}  // namespace lexsub
