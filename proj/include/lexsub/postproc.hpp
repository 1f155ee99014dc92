#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "lexsub/core.hpp"
#include "lexsub/lemmatizer.hpp"

namespace lexsub {

enum class TargetExclusion {
  kLemma,      // candidate lemma equals the target lemma
  kStem,       // Porter stems equal
  kExactForm,  // candidate lemma equals the target's surface form
  kNone,
};

/// One post-processing recipe applied to raw substitute distributions.
struct PostprocVariant {
  std::string name = "default";
  bool lemmatize = true;
  TargetExclusion exclusion = TargetExclusion::kLemma;
  std::shared_ptr<const Lemmatizer> lemmatizer = DefaultLemmatizer();

  static PostprocVariant Default();
  static PostprocVariant NoLemmatization();
  static PostprocVariant NoTargetExclusion();
  static PostprocVariant C2vStyle();
  static PostprocVariant StemExclusion();
  // default | no-lemma | no-target-excl | c2v | stem
  static PostprocVariant Named(std::string_view name);
};

/// Lowercases and (optionally) lemmatizes candidates using the target POS,
/// summing the mass of forms that collapse onto the same lemma, zeroes out
/// entries matching the target and renormalizes.
///
/// Throws kEmptyAfterFiltering when nothing survives.
SubstituteDistribution postprocess(const SubstituteDistribution& dist,
                                   const LexSubInstance& instance,
                                   const PostprocVariant& variant);

}  // namespace lexsub
