#include "lexsub/evaluation.hpp"

#include <algorithm>
#include <unordered_set>

namespace lexsub {

Model MakeModel(std::string name,
                std::shared_ptr<const SubstituteEstimator> estimator,
                EstimatorConfig config) {
  config.Validate();
  Model model;
  model.name = std::move(name);
  model.reentrant = estimator->reentrant();
  model.generate = [estimator = std::move(estimator),
                    config = std::move(config)](const LexSubInstance& inst) {
    return generate(*estimator, inst, config);
  };
  return model;
}

CandidatePool build_candidate_pool(const std::vector<LexSubInstance>& dataset) {
  CandidatePool pool;
  for (const auto& inst : dataset) {
    auto& entry = pool[{inst.lemma, inst.pos}];
    if (!inst.gold) continue;
    for (const auto& [word, weight] : *inst.gold) entry.insert(word);
  }
  return pool;
}

namespace {

void RequireGold(const GoldWeights& gold) {
  if (gold.empty()) throw LexsubError(ErrorCode::kEmptyGold, "gold is empty");
}

double GoldWeight(const GoldWeights& gold, const std::string& word) {
  auto it = gold.find(word);
  return it == gold.end() ? 0.0 : static_cast<double>(it->second);
}

std::size_t HitsInTop(const std::vector<std::string>& ranked,
                      const GoldWeights& gold, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    if (gold.count(ranked[i]) != 0) ++hits;
  }
  return hits;
}

}  // namespace

double gap(const std::vector<std::string>& ranked, const GoldWeights& gold) {
  RequireGold(gold);
  double numerator = 0.0;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const double g = GoldWeight(gold, ranked[i]);
    cumulative += g;
    if (g > 0.0) numerator += cumulative / static_cast<double>(i + 1);
  }
  std::vector<double> ideal;
  ideal.reserve(gold.size());
  for (const auto& [w, c] : gold) ideal.push_back(static_cast<double>(c));
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double denominator = 0.0;
  cumulative = 0.0;
  for (std::size_t j = 0; j < ideal.size(); ++j) {
    cumulative += ideal[j];
    denominator += cumulative / static_cast<double>(j + 1);
  }
  return numerator / denominator;
}

double precision_at_k(const std::vector<std::string>& ranked,
                      const GoldWeights& gold, std::size_t k) {
  RequireGold(gold);
  if (k == 0) {
    throw LexsubError(ErrorCode::kInvalidArgument, "k must be positive");
  }
  return static_cast<double>(HitsInTop(ranked, gold, k)) /
         static_cast<double>(k);
}

double recall_at_10(const std::vector<std::string>& ranked,
                    const GoldWeights& gold) {
  RequireGold(gold);
  return static_cast<double>(HitsInTop(ranked, gold, 10)) /
         static_cast<double>(gold.size());
}

namespace {

constexpr std::size_t kShownInReport = 10;

std::optional<SubstituteDistribution> PostprocessOrEmpty(
    const SubstituteDistribution& dist, const LexSubInstance& inst,
    const PostprocVariant& postproc) {
  try {
    return postprocess(dist, inst, postproc);
  } catch (const LexsubError& e) {
    if (e.code() == ErrorCode::kEmptyAfterFiltering) return std::nullopt;
    throw;
  }
}

void FillGoldRanks(InstanceResult& result,
                   const std::vector<std::string>& ranked) {
  for (const auto& [word, weight] : result.gold) {
    result.gold_ranks[word] = std::nullopt;
  }
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    auto it = result.gold_ranks.find(ranked[i]);
    if (it != result.gold_ranks.end() && !it->second) it->second = i + 1;
  }
}

InstanceResult CandidateKernel(const SubstituteDistribution& dist,
                               const LexSubInstance& inst,
                               const CandidatePool& pool,
                               const PostprocVariant& postproc) {
  auto it = pool.find({inst.lemma, inst.pos});
  if (it == pool.end()) {
    throw LexsubError(ErrorCode::kMissingPoolEntry,
                      "no candidates for " + inst.lemma + "." +
                          PosLetter(inst.pos));
  }
  const auto processed = PostprocessOrEmpty(dist, inst, postproc);
  struct Scored {
    std::string word;
    double prob;
    bool known;
  };
  std::vector<Scored> scored;
  scored.reserve(it->second.size());
  for (const auto& cand : it->second) {
    const bool known = processed && processed->contains(cand);
    scored.push_back({cand, known ? processed->prob(cand) : 0.0, known});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    if (a.known != b.known) return a.known;
    return a.word < b.word;
  });
  std::vector<std::string> ranked;
  ranked.reserve(scored.size());
  for (const auto& s : scored) ranked.push_back(s.word);

  InstanceResult result;
  result.id = inst.id;
  result.gold = *inst.gold;
  for (std::size_t i = 0; i < std::min(kShownInReport, scored.size()); ++i) {
    result.ranked.emplace_back(scored[i].word, scored[i].prob);
  }
  FillGoldRanks(result, ranked);
  result.gap = gap(ranked, result.gold);
  return result;
}

InstanceResult AllWordsKernel(const SubstituteDistribution& dist,
                              const LexSubInstance& inst,
                              const PostprocVariant& postproc) {
  const auto processed = PostprocessOrEmpty(dist, inst, postproc);
  InstanceResult result;
  result.id = inst.id;
  result.gold = *inst.gold;
  std::vector<std::string> ranked;
  if (processed) {
    auto full = rank(*processed, processed->size());
    ranked.reserve(full.size());
    for (const auto& [w, p] : full) ranked.push_back(w);
    full.resize(std::min(kShownInReport, full.size()));
    result.ranked = std::move(full);
  }
  FillGoldRanks(result, ranked);
  result.p_at_1 = precision_at_k(ranked, result.gold, 1);
  result.p_at_3 = precision_at_k(ranked, result.gold, 3);
  result.r_at_10 = recall_at_10(ranked, result.gold);
  return result;
}

std::vector<const LexSubInstance*> WithGold(
    const std::vector<LexSubInstance>& dataset) {
  std::vector<const LexSubInstance*> out;
  for (const auto& inst : dataset) {
    if (inst.gold && !inst.gold->empty()) out.push_back(&inst);
  }
  return out;
}

template <typename Kernel>
std::vector<InstanceResult> RunKernel(
    const Model& model, const std::vector<const LexSubInstance*>& items,
    Execution exec, Kernel kernel) {
  std::vector<InstanceResult> results(items.size());
  if (model.reentrant || exec == Execution::kSerial) {
    ForEachIndex(items.size(), exec, [&](std::size_t i) {
      results[i] = kernel(model.generate(*items[i]), *items[i]);
    });
    return results;
  }
  // Non-reentrant backend: generate in order, score in parallel.
  std::vector<SubstituteDistribution> dists;
  dists.reserve(items.size());
  for (const auto* inst : items) dists.push_back(model.generate(*inst));
  ForEachIndex(items.size(), exec, [&](std::size_t i) {
    results[i] = kernel(dists[i], *items[i]);
  });
  return results;
}

std::optional<double> Mean(const std::vector<InstanceResult>& results,
                           std::optional<double> InstanceResult::*field) {
  if (results.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& r : results) sum += (r.*field).value_or(0.0);
  return sum / static_cast<double>(results.size());
}

}  // namespace

EvalReport evaluate_candidate_ranking(const Model& model,
                                      const std::vector<LexSubInstance>& dataset,
                                      const CandidatePool& pool,
                                      const PostprocVariant& postproc,
                                      Execution exec) {
  const auto items = WithGold(dataset);
  EvalReport report;
  report.task = "candidate";
  report.per_instance = RunKernel(
      model, items, exec,
      [&](const SubstituteDistribution& dist, const LexSubInstance& inst) {
        return CandidateKernel(dist, inst, pool, postproc);
      });
  report.evaluated = report.per_instance.size();
  report.gap = Mean(report.per_instance, &InstanceResult::gap);
  if (items.size() != dataset.size()) {
    report.notes.push_back(std::to_string(dataset.size() - items.size()) +
                           " instances without gold skipped");
  }
  return report;
}

EvalReport evaluate_all_words(const Model& model,
                              const std::vector<LexSubInstance>& dataset,
                              const PostprocVariant& postproc,
                              Execution exec) {
  const auto items = WithGold(dataset);
  EvalReport report;
  report.task = "all-words";
  report.per_instance = RunKernel(
      model, items, exec,
      [&](const SubstituteDistribution& dist, const LexSubInstance& inst) {
        return AllWordsKernel(dist, inst, postproc);
      });
  report.evaluated = report.per_instance.size();
  report.p_at_1 = Mean(report.per_instance, &InstanceResult::p_at_1);
  report.p_at_3 = Mean(report.per_instance, &InstanceResult::p_at_3);
  report.r_at_10 = Mean(report.per_instance, &InstanceResult::r_at_10);
  if (items.size() != dataset.size()) {
    report.notes.push_back(std::to_string(dataset.size() - items.size()) +
                           " instances without gold skipped");
  }
  return report;
}

Json ToJson(const EvalReport& report) {
  auto opt = [](const std::optional<double>& v) -> Json {
    return v ? Json(*v) : Json(nullptr);
  };
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["task"] = report.task;
  j["evaluated"] = report.evaluated;
  j["metrics"] = {{"gap", opt(report.gap)},
                  {"p_at_1", opt(report.p_at_1)},
                  {"p_at_3", opt(report.p_at_3)},
                  {"r_at_10", opt(report.r_at_10)}};
  j["notes"] = report.notes;
  Json rows = Json::array();
  for (const auto& r : report.per_instance) {
    Json row;
    row["id"] = r.id;
    Json ranked = Json::array();
    for (const auto& [w, p] : r.ranked) ranked.push_back({w, p});
    row["ranked"] = std::move(ranked);
    row["gold"] = r.gold;
    Json ranks = Json::object();
    for (const auto& [w, rk] : r.gold_ranks) {
      ranks[w] = rk ? Json(*rk) : Json(nullptr);
    }
    row["gold_ranks"] = std::move(ranks);
    row["gap"] = opt(r.gap);
    row["p_at_1"] = opt(r.p_at_1);
    row["p_at_3"] = opt(r.p_at_3);
    row["r_at_10"] = opt(r.r_at_10);
    rows.push_back(std::move(row));
  }
  j["per_instance"] = std::move(rows);
  return j;
}

GridSearchResult grid_search(
    const std::shared_ptr<const SubstituteEstimator>& estimator,
    EstimatorConfig base, const std::vector<LexSubInstance>& dev,
    const PostprocVariant& postproc, const std::vector<double>& temperatures,
    const std::vector<double>& betas) {
  if (temperatures.empty() || betas.empty()) {
    throw LexsubError(ErrorCode::kInvalidArgument, "empty search grid");
  }
  const auto pool = build_candidate_pool(dev);
  GridSearchResult result;
  bool first = true;
  for (double t : temperatures) {
    for (double b : betas) {
      EstimatorConfig config = base;
      config.temperature = t;
      config.beta = b;
      const auto report = evaluate_candidate_ranking(
          MakeModel("grid", estimator, config), dev, pool, postproc);
      const GridPoint point{t, b, report.gap.value_or(0.0)};
      result.grid.push_back(point);
      if (first || point.gap > result.best.gap) result.best = point;
      first = false;
    }
  }
  return result;
}

}  // namespace lexsub
