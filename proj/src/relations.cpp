#include "lexsub/relations.hpp"

#include <cmath>
#include <unordered_map>

namespace lexsub {

namespace {

constexpr std::array<std::string_view, kRelationLabelCount> kNames = {
    "synonym",          "hypernym",           "hyponym",
    "co-hyponym",       "transitive-hypernym", "transitive-hyponym",
    "co-hyponym-3",     "unknown-relation",   "unknown-word"};

using Depths = std::unordered_map<SynsetId, std::size_t>;

std::optional<std::size_t> DepthOf(const Depths& d, SynsetId id) {
  auto it = d.find(id);
  if (it == d.end()) return std::nullopt;
  return it->second;
}

RelationLabel LabelFromDepths(SynsetId target, SynsetId substitute,
                              const Depths& up_target, const Depths& up_sub,
                              const RelationOptions& options) {
  if (target == substitute) return RelationLabel::kSynonym;
  const auto sub_above = DepthOf(up_target, substitute);
  const auto target_above = DepthOf(up_sub, target);
  if (sub_above == 1u) return RelationLabel::kHypernym;
  if (target_above == 1u) return RelationLabel::kHyponym;
  bool shared_parent = false;
  bool near_ancestor = false;
  for (const auto& [node, dt] : up_target) {
    const auto ds = DepthOf(up_sub, node);
    if (!ds) continue;
    if (dt == 1 && *ds == 1) shared_parent = true;
    const bool near = options.hops == CoHyponymHops::kPerSide
                          ? dt <= options.max_hops && *ds <= options.max_hops
                          : dt + *ds <= options.max_hops;
    if (near) near_ancestor = true;
  }
  if (shared_parent) return RelationLabel::kCoHyponym;
  if (sub_above) return RelationLabel::kTransitiveHypernym;
  if (target_above) return RelationLabel::kTransitiveHyponym;
  if (near_ancestor) return RelationLabel::kCoHyponym3;
  return RelationLabel::kUnknownRelation;
}

}  // namespace

std::string_view RelationName(RelationLabel label) {
  return kNames[static_cast<std::size_t>(label)];
}

RelationLabel ParseRelation(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return kAllRelationLabels[i];
  }
  throw LexsubError(ErrorCode::kInvalidArgument,
                    "unknown relation '" + std::string(name) + "'");
}

RelationLabel ClassifyPair(const SynsetGraph& graph, SynsetId target,
                           SynsetId substitute, const RelationOptions& options) {
  return LabelFromDepths(target, substitute, graph.AncestorDepths(target),
                         graph.AncestorDepths(substitute), options);
}

RelationLabel classify(std::string_view target_lemma,
                       std::string_view substitute_lemma, Pos pos,
                       const SynsetGraph& graph, const RelationOptions& options) {
  const auto& targets = graph.Senses(target_lemma, pos);
  const auto& subs = graph.Senses(substitute_lemma, pos);
  if (targets.empty() || subs.empty()) return RelationLabel::kUnknownWord;
  std::vector<Depths> sub_depths;
  sub_depths.reserve(subs.size());
  for (SynsetId s : subs) sub_depths.push_back(graph.AncestorDepths(s));
  auto best = RelationLabel::kUnknownRelation;
  for (SynsetId t : targets) {
    const auto up_t = graph.AncestorDepths(t);
    for (std::size_t j = 0; j < subs.size(); ++j) {
      const auto label = LabelFromDepths(t, subs[j], up_t, sub_depths[j], options);
      if (label < best) best = label;
      if (best == RelationLabel::kSynonym) return best;
    }
  }
  return best;
}

double RelationStats::percent(RelationLabel label) const {
  if (total == 0) return 0.0;
  return 100.0 * static_cast<double>(counts[static_cast<std::size_t>(label)]) /
         static_cast<double>(total);
}

RelationStats relation_stats(const std::vector<RelationQuery>& queries,
                             const SynsetGraph& graph,
                             const std::optional<std::set<Pos>>& pos_filter,
                             const RelationOptions& options, Execution exec) {
  std::vector<std::array<std::size_t, kRelationLabelCount>> partial(queries.size());
  ForEachIndex(queries.size(), exec, [&](std::size_t i) {
    auto& counts = partial[i];
    counts.fill(0);
    const auto& q = queries[i];
    if (pos_filter && pos_filter->count(q.pos) == 0) return;
    for (const auto& s : q.substitutes) {
      ++counts[static_cast<std::size_t>(classify(q.target_lemma, s, q.pos, graph, options))];
    }
  });
  RelationStats stats;
  for (const auto& counts : partial) {
    for (std::size_t l = 0; l < kRelationLabelCount; ++l) {
      stats.counts[l] += counts[l];
      stats.total += counts[l];
    }
  }
  return stats;
}

std::vector<RelationQuery> ModelRelationQueries(
    const Model& model, const std::vector<LexSubInstance>& dataset,
    const PostprocVariant& postproc, std::size_t top_k, Execution exec) {
  std::vector<RelationQuery> out(dataset.size());
  const Execution run = model.reentrant ? exec : Execution::kSerial;
  ForEachIndex(dataset.size(), run, [&](std::size_t i) {
    const auto& inst = dataset[i];
    out[i].target_lemma = inst.lemma;
    out[i].pos = inst.pos;
    try {
      out[i].substitutes =
          RankedWords(postprocess(model.generate(inst), inst, postproc), top_k);
    } catch (const LexsubError& e) {
      if (e.code() != ErrorCode::kEmptyAfterFiltering) throw;
    }
  });
  return out;
}

std::vector<RelationQuery> GoldRelationQueries(
    const std::vector<LexSubInstance>& dataset) {
  std::vector<RelationQuery> out;
  for (const auto& inst : dataset) {
    if (!inst.gold) continue;
    RelationQuery q{inst.lemma, inst.pos, {}};
    for (const auto& [word, weight] : *inst.gold) q.substitutes.push_back(word);
    out.push_back(std::move(q));
  }
  return out;
}

Json RelationChartJson(
    const std::vector<std::pair<std::string, RelationStats>>& series) {
  Json labels = Json::array();
  for (auto name : kNames) labels.push_back(name);
  Json rows = Json::array();
  for (const auto& [name, stats] : series) {
    Json percent = Json::array();
    Json log10 = Json::array();
    Json counts = Json::array();
    for (auto label : kAllRelationLabels) {
      const double p = stats.percent(label);
      percent.push_back(p);
      log10.push_back(p > 0.0 ? Json(std::log10(p)) : Json(nullptr));
      counts.push_back(stats.counts[static_cast<std::size_t>(label)]);
    }
    rows.push_back({{"name", name},
                    {"total", stats.total},
                    {"counts", std::move(counts)},
                    {"percent", std::move(percent)},
                    {"log10_percent", std::move(log10)}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"labels", std::move(labels)},
          {"series", std::move(rows)}};
}

}  // namespace lexsub
