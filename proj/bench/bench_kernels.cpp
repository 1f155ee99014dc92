// Serial reference vs OpenMP paths of the data-parallel kernels.
// Argument 0 runs serially, 1 in parallel.

#include <benchmark/benchmark.h>

#include <memory>

#include "lexsub/augment.hpp"
#include "lexsub/backends.hpp"
#include "lexsub/evaluation.hpp"
#include "lexsub/relations.hpp"
#include "lexsub/wordnet.hpp"
#include "lexsub/wsi.hpp"
#include "synthetic_snips.hpp"

using namespace lexsub;

namespace {

Execution Mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

const Model& LmModel() {
  static const Model model = [] {
    auto lm = std::make_shared<const ForwardBackwardLmEstimator>(
        testing_support::Sentences(testing_support::SyntheticSnips(5, 1000)),
        ForwardBackwardLmEstimator::Options{});
    EstimatorConfig cfg;
    cfg.backend = BackendKind::kForwardBackwardLm;
    cfg.injection = Injection::kNoTarget;
    return MakeModel("bigram", lm, cfg);
  }();
  return model;
}

const std::vector<SubstituteVector>& Vectors() {
  static const auto vectors = [] {
    DerivedRng rng(1);
    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> bags;
    for (int i = 0; i < 800; ++i) {
      ids.push_back(std::to_string(i));
      std::vector<std::string> bag;
      for (int j = 0; j < 200; ++j) bag.push_back("w" + std::to_string(rng.Below(3000)));
      bags.push_back(std::move(bag));
    }
    return TfidfVectors(ids, bags);
  }();
  return vectors;
}

const std::vector<LexSubInstance>& CityInstances() {
  static const auto instances = [] {
    std::vector<LexSubInstance> out;
    for (const auto& u : testing_support::SyntheticSnips(8, 150)) {
      for (const auto& s : u.slots) {
        if (s.label != "city") continue;
        auto inst = SlotInstance(u, s.start, Pos::kNoun);
        inst.id = u.id;
        inst.gold = GoldWeights{{"paris", 2}, {"oslo", 1}, {"berlin", 1}, {"madrid", 1}};
        out.push_back(std::move(inst));
      }
    }
    return out;
  }();
  return instances;
}

void BM_PairwiseCosineDistances(benchmark::State& state) {
  const auto& v = Vectors();
  for (auto _ : state) benchmark::DoNotOptimize(PairwiseCosineDistances(v, Mode(state)));
}
BENCHMARK(BM_PairwiseCosineDistances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CandidateRanking(benchmark::State& state) {
  const auto& data = CityInstances();
  const auto pool = build_candidate_pool(data);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_candidate_ranking(LmModel(), data, pool,
                                                        PostprocVariant::Default(), Mode(state)));
  }
}
BENCHMARK(BM_CandidateRanking)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RelationStats(benchmark::State& state) {
  static const auto graph = SynsetGraph::FromWordNetDir(LEXSUB_TEST_DATA "/wordnet");
  const std::vector<std::string> words = {"dog", "cat", "car", "oak", "house", "bank",
                                          "animal", "tree", "zzz", "puppy", "vehicle"};
  DerivedRng rng(3);
  std::vector<RelationQuery> queries;
  for (int i = 0; i < 20000; ++i) {
    RelationQuery q{words[rng.Below(words.size())], Pos::kNoun, {}};
    for (int j = 0; j < 10; ++j) q.substitutes.push_back(words[rng.Below(words.size())]);
    queries.push_back(std::move(q));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(relation_stats(queries, graph, std::nullopt, {}, Mode(state)));
  }
}
BENCHMARK(BM_RelationStats)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AugmentDataset(benchmark::State& state) {
  static const auto data = testing_support::SyntheticSnips(9, 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(augment_dataset(data, LmModel(), 2, 1, {}, Mode(state)));
  }
}
BENCHMARK(BM_AugmentDataset)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
