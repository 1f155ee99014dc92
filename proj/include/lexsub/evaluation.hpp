#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lexsub/core.hpp"
#include "lexsub/estimators.hpp"
#include "lexsub/io.hpp"
#include "lexsub/parallel.hpp"
#include "lexsub/postproc.hpp"

namespace lexsub {

inline constexpr int kReportSchemaVersion = 1;

/// Anything that maps an instance to a substitute distribution.
struct Model {
  std::string name;
  std::function<SubstituteDistribution(const LexSubInstance&)> generate;
  bool reentrant = true;
};

// Binds an estimator and its configuration into a Model.
Model MakeModel(std::string name, std::shared_ptr<const SubstituteEstimator> estimator,
                EstimatorConfig config);

using PoolKey = std::pair<std::string, Pos>;
using CandidatePool = std::map<PoolKey, std::set<std::string>>;

// Union of all gold substitutes per (lemma, pos) over the corpus.
CandidatePool build_candidate_pool(const std::vector<LexSubInstance>& dataset);

// Generalized average precision of `ranked` against annotator weights.
double gap(const std::vector<std::string>& ranked, const GoldWeights& gold);
double precision_at_k(const std::vector<std::string>& ranked,
                      const GoldWeights& gold, std::size_t k);
double recall_at_10(const std::vector<std::string>& ranked,
                    const GoldWeights& gold);

struct InstanceResult {
  std::string id;
  std::vector<WordProb> ranked;  // top entries shown in reports
  GoldWeights gold;
  // 1-based rank of each gold word in the full ranking; nullopt if unranked.
  std::map<std::string, std::optional<std::size_t>> gold_ranks;
  std::optional<double> gap;
  std::optional<double> p_at_1;
  std::optional<double> p_at_3;
  std::optional<double> r_at_10;
};

struct EvalReport {
  std::string task;  // "candidate" or "all-words"
  std::size_t evaluated = 0;
  std::optional<double> gap;
  std::optional<double> p_at_1;
  std::optional<double> p_at_3;
  std::optional<double> r_at_10;
  std::vector<InstanceResult> per_instance;
  std::vector<std::string> notes;
};

// Scores only the pooled candidates of each instance's (lemma, pos) and
// reports mean GAP. Candidates the model does not score rank last,
// alphabetically. Instances without gold are skipped.
EvalReport evaluate_candidate_ranking(const Model& model,
                                      const std::vector<LexSubInstance>& dataset,
                                      const CandidatePool& pool,
                                      const PostprocVariant& postproc,
                                      Execution exec = Execution::kParallel);

// Ranks the whole post-processed distribution and reports P@1, P@3, R@10.
EvalReport evaluate_all_words(const Model& model,
                              const std::vector<LexSubInstance>& dataset,
                              const PostprocVariant& postproc,
                              Execution exec = Execution::kParallel);

Json ToJson(const EvalReport& report);

struct GridPoint {
  double temperature;
  double beta;
  double gap;
};

struct GridSearchResult {
  GridPoint best;
  std::vector<GridPoint> grid;
};

inline const std::vector<double> kDefaultTemperatureGrid = {0.1, 0.25, 0.5, 1.0,
                                                            2.0};
inline const std::vector<double> kDefaultBetaGrid = {0.0, 0.5, 1.0, 2.0};

// Picks (temperature, beta) maximizing candidate-ranking GAP; ties go to the
// earlier grid point.
GridSearchResult grid_search(
    const std::shared_ptr<const SubstituteEstimator>& estimator,
    EstimatorConfig base, const std::vector<LexSubInstance>& dev,
    const PostprocVariant& postproc,
    const std::vector<double>& temperatures = kDefaultTemperatureGrid,
    const std::vector<double>& betas = kDefaultBetaGrid);

}  // namespace lexsub
