#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lexsub/augment.hpp"

namespace testing_support {

// Per-intent train sizes of the SNIPS benchmark (13084 in total).
const std::map<std::string, std::size_t>& SnipsTrainCounts();

// SNIPS-shaped data: seven intents, templated carrier phrases and
// slot values drawn from per-slot lexicons. `per_intent` overrides the counts
// when non-zero.
std::vector<lexsub::SlotUtterance> SyntheticSnips(std::uint64_t seed,
                                                  std::size_t per_intent = 0);

// Plain text of the utterances, one sentence per element.
std::vector<std::string> Sentences(const std::vector<lexsub::SlotUtterance>& data);

// Random valid utterance of 1..12 tokens with 0..3 slots.
lexsub::SlotUtterance RandomUtterance(lexsub::DerivedRng& rng, std::size_t index);

}  // namespace testing_support
