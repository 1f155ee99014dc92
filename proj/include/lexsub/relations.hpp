#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lexsub/evaluation.hpp"
#include "lexsub/io.hpp"
#include "lexsub/parallel.hpp"
#include "lexsub/wordnet.hpp"

namespace lexsub {

// Declared from most to least specific; classify prefers earlier labels.
enum class RelationLabel {
  kSynonym,
  kHypernym,
  kHyponym,
  kCoHyponym,
  kTransitiveHypernym,
  kTransitiveHyponym,
  kCoHyponym3,
  kUnknownRelation,
  kUnknownWord,
};

inline constexpr std::size_t kRelationLabelCount = 9;
inline constexpr std::array<RelationLabel, kRelationLabelCount> kAllRelationLabels = {
    RelationLabel::kSynonym,           RelationLabel::kHypernym,
    RelationLabel::kHyponym,           RelationLabel::kCoHyponym,
    RelationLabel::kTransitiveHypernym, RelationLabel::kTransitiveHyponym,
    RelationLabel::kCoHyponym3,        RelationLabel::kUnknownRelation,
    RelationLabel::kUnknownWord};

std::string_view RelationName(RelationLabel label);
RelationLabel ParseRelation(std::string_view name);

enum class CoHyponymHops {
  kPerSide,    // common ancestor at most max_hops above each synset
  kTotalPath,  // both distances summed at most max_hops
};

struct RelationOptions {
  CoHyponymHops hops = CoHyponymHops::kPerSide;
  std::size_t max_hops = 3;
};

// Label of a single synset pair, substitute read relative to target.
RelationLabel ClassifyPair(const SynsetGraph& graph, SynsetId target,
                           SynsetId substitute, const RelationOptions& options = {});

// Most specific label over all synset pairs of the two lemmas; unknown-word
// when either lemma has no synset for pos.
RelationLabel classify(std::string_view target_lemma,
                       std::string_view substitute_lemma, Pos pos,
                       const SynsetGraph& graph, const RelationOptions& options = {});

struct RelationQuery {
  std::string target_lemma;
  Pos pos = Pos::kNoun;
  std::vector<std::string> substitutes;
};

struct RelationStats {
  std::array<std::size_t, kRelationLabelCount> counts{};
  std::size_t total = 0;

  double percent(RelationLabel label) const;
};

RelationStats relation_stats(const std::vector<RelationQuery>& queries,
                             const SynsetGraph& graph,
                             const std::optional<std::set<Pos>>& pos_filter = std::nullopt,
                             const RelationOptions& options = {},
                             Execution exec = Execution::kParallel);

// Top-k post-processed substitutes of `model` per instance.
std::vector<RelationQuery> ModelRelationQueries(
    const Model& model, const std::vector<LexSubInstance>& dataset,
    const PostprocVariant& postproc, std::size_t top_k,
    Execution exec = Execution::kParallel);
// Annotator substitutes per instance.
std::vector<RelationQuery> GoldRelationQueries(
    const std::vector<LexSubInstance>& dataset);

// {"labels": [...], "series": [{"name", "percent", "log10_percent"}]};
// log10 is null for empty bins.
Json RelationChartJson(const std::vector<std::pair<std::string, RelationStats>>& series);

}  // namespace lexsub
