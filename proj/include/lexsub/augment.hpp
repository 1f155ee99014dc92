#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lexsub/evaluation.hpp"
#include "lexsub/io.hpp"
#include "lexsub/parallel.hpp"
#include "lexsub/postproc.hpp"

namespace lexsub {

struct SlotSpan {
  std::size_t start = 0;  // token range [start, end)
  std::size_t end = 0;
  std::string label;

  friend bool operator==(const SlotSpan&, const SlotSpan&) = default;
};

struct AugmentProvenance {
  std::string source_id;
  std::size_t replaced_index = 0;
  std::string original;
  std::string substitute;
  std::uint64_t seed = 0;
};

struct SlotUtterance {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<SlotSpan> slots;  // sorted, non-overlapping
  std::string intent;
  std::optional<AugmentProvenance> provenance;
};

// Throws kInvalidArgument if spans are empty, overlap or leave the tokens.
void Validate(const SlotUtterance& utt);

/// mt19937_64 stream whose draws do not depend on the standard library's
/// distribution implementations.
class DerivedRng {
 public:
  explicit DerivedRng(std::uint64_t seed);
  // Seeded from (seed, index, copy) through std::seed_seq.
  DerivedRng(std::uint64_t seed, std::uint64_t index, std::uint64_t copy = 0);

  double Uniform();                   // [0, 1), 53-bit resolution
  std::size_t Below(std::size_t n);   // uniform in [0, n)
  std::uint64_t seed() const { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

// Inverse-CDF draw over the distribution in rank order.
std::string SampleSubstitute(const SubstituteDistribution& dist,
                             DerivedRng& rng);

struct AugmentConfig {
  // Slot words are mostly nouns and names.
  Pos slot_pos = Pos::kNoun;
  PostprocVariant postproc = PostprocVariant::NoLemmatization();
  // Keep only single alphabetic words as substitutes.
  bool alphabetic_only = true;
};

// Replaces one uniformly chosen slot token with a substitute sampled from the
// post-processed distribution for that position. Throws kNoSlotTokens when
// the utterance has no slot, kEmptyDistribution when nothing is left to sample.
SlotUtterance augment_one(const SlotUtterance& utt, const Model& model,
                          const AugmentConfig& config, DerivedRng& rng);
SlotUtterance augment_one(const SlotUtterance& utt, const Model& model,
                          const AugmentConfig& config, std::uint64_t seed);

struct AugmentResult {
  std::vector<SlotUtterance> dataset;  // originals first, then new examples
  std::size_t generated = 0;
  std::size_t skipped = 0;  // examples with no slot or nothing to sample
};

// `multiplier` new examples per original; copy c of example i draws from
// DerivedRng(seed, i, c).
AugmentResult augment_dataset(const std::vector<SlotUtterance>& dataset,
                              const Model& model, std::size_t multiplier,
                              std::uint64_t seed, const AugmentConfig& config = {},
                              Execution exec = Execution::kParallel);

// Per-intent stratified sample without replacement; round(fraction * n_intent)
// examples per intent, in original order.
std::vector<SlotUtterance> subsample_train(
    const std::vector<SlotUtterance>& dataset, double fraction,
    std::uint64_t seed);

// Instance whose target is token `index`, lemmatized with the slot POS.
LexSubInstance SlotInstance(const SlotUtterance& utt, std::size_t index,
                            Pos pos);

// SNIPS benchmark layout: {"Intent": [{"data": [{"text": ..., "entity": ...}]}]}
// Extra keys "id" and "provenance" are read and written when present.
std::vector<SlotUtterance> ReadSnipsJson(const Json& j);
std::vector<SlotUtterance> ReadSnips(const std::filesystem::path& path);
Json SnipsToJson(const std::vector<SlotUtterance>& dataset);

}  // namespace lexsub
