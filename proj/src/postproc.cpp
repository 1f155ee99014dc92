#include "lexsub/postproc.hpp"

#include <algorithm>

namespace lexsub {

PostprocVariant PostprocVariant::Default() { return PostprocVariant{}; }

PostprocVariant PostprocVariant::NoLemmatization() {
  PostprocVariant v;
  v.name = "no-lemma";
  v.lemmatize = false;
  return v;
}

PostprocVariant PostprocVariant::NoTargetExclusion() {
  PostprocVariant v;
  v.name = "no-target-excl";
  v.exclusion = TargetExclusion::kNone;
  return v;
}

PostprocVariant PostprocVariant::C2vStyle() {
  PostprocVariant v;
  v.name = "c2v";
  v.exclusion = TargetExclusion::kExactForm;
  return v;
}

PostprocVariant PostprocVariant::StemExclusion() {
  PostprocVariant v;
  v.name = "stem";
  v.lemmatize = false;
  v.exclusion = TargetExclusion::kStem;
  return v;
}

PostprocVariant PostprocVariant::Named(std::string_view name) {
  if (name == "default") return Default();
  if (name == "no-lemma" || name == "no-lemmatization") return NoLemmatization();
  if (name == "no-target-excl" || name == "no-target-exclusion") {
    return NoTargetExclusion();
  }
  if (name == "c2v" || name == "c2v-style") return C2vStyle();
  if (name == "stem") return StemExclusion();
  throw LexsubError(ErrorCode::kInvalidArgument,
                    "unknown post-processing variant '" + std::string(name) +
                        "'");
}

SubstituteDistribution postprocess(const SubstituteDistribution& dist,
                                   const LexSubInstance& instance,
                                   const PostprocVariant& variant) {
  const Lemmatizer& lemmatizer =
      variant.lemmatizer ? *variant.lemmatizer : *DefaultLemmatizer();
  const std::string target_form = ToLower(instance.target());
  const std::string target_lemma = ToLower(instance.lemma);

  auto excluded = [&](const std::string& candidate) {
    switch (variant.exclusion) {
      case TargetExclusion::kNone:
        return false;
      case TargetExclusion::kLemma:
        return candidate == target_lemma || candidate == target_form;
      case TargetExclusion::kStem:
        return PorterStem(candidate) == PorterStem(target_lemma);
      case TargetExclusion::kExactForm:
        return candidate == target_form;
    }
    return false;
  };

  std::vector<WordProb> kept;
  kept.reserve(dist.size());
  for (const auto& [word, p] : dist) {
    std::string key = ToLower(word);
    if (variant.lemmatize) key = lemmatizer.Lemmatize(key, instance.pos);
    if (key.empty() || excluded(key)) continue;
    kept.emplace_back(std::move(key), p);
  }
  const bool any_mass = std::any_of(kept.begin(), kept.end(),
                                    [](const WordProb& e) { return e.second > 0; });
  if (!any_mass) {
    throw LexsubError(ErrorCode::kEmptyAfterFiltering,
                      "no substitutes left for instance '" + instance.id + "'");
  }
  // normalize() sums colliding lemmas.
  return normalize(std::move(kept));
}

}  // namespace lexsub
