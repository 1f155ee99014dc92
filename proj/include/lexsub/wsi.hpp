#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexsub/evaluation.hpp"
#include "lexsub/parallel.hpp"
#include "lexsub/postproc.hpp"

namespace lexsub {

struct WsiInstance {
  LexSubInstance context;
  std::optional<std::string> gold_sense;
};

// Canonical JSONL records plus an optional "sense" field.
std::vector<WsiInstance> ReadWsiJsonl(const std::filesystem::path& path);
std::vector<WsiInstance> ReadWsiJsonl(std::istream& in);

/// Sparse, L2-normalized TF-IDF vector of one occurrence's top substitutes.
struct SubstituteVector {
  std::string instance_id;
  std::vector<std::pair<std::string, double>> tfidf;  // sorted by lemma
};

inline constexpr std::size_t kDefaultSubstituteCount = 200;

// Binary TF over the top-n lemmatized substitutes, IDF = ln(M/df) + 1 over
// the M given instances (which must share lemma and POS).
std::vector<SubstituteVector> build_substitute_vectors(
    const std::vector<WsiInstance>& instances, const Model& model,
    std::size_t n = kDefaultSubstituteCount,
    const PostprocVariant& lemmatization = PostprocVariant::NoTargetExclusion(),
    Execution exec = Execution::kParallel);

// Same weighting applied to already generated substitute bags.
std::vector<SubstituteVector> TfidfVectors(
    const std::vector<std::string>& ids,
    const std::vector<std::vector<std::string>>& bags);

double CosineDistance(const SubstituteVector& a, const SubstituteVector& b);

// Dense n x n cosine-distance matrix, row-major.
std::vector<double> PairwiseCosineDistances(
    const std::vector<SubstituteVector>& vectors,
    Execution exec = Execution::kParallel);

struct Merge {
  std::size_t left;   // smallest member index of each merged cluster
  std::size_t right;
  double distance;
};

struct Clustering {
  std::vector<int> labels;  // aligned with input; numbered by first member
  std::size_t k = 0;
  std::vector<Merge> merges;  // full dendrogram, in merge order
  std::optional<double> silhouette;  // set in auto mode
};

// Agglomerative clustering, average linkage over cosine distance. Merge ties
// go to the smallest (left, right) pair. k == 0 selects k in [2, 8] by mean
// silhouette, preferring smaller k on ties.
Clustering cluster(const std::vector<SubstituteVector>& vectors, std::size_t k,
                   Execution exec = Execution::kParallel);
Clustering ClusterFromDistances(const std::vector<double>& distances,
                                std::size_t n, std::size_t k);

double MeanSilhouette(const std::vector<double>& distances, std::size_t n,
                      const std::vector<int>& labels);

double v_measure(const std::vector<std::string>& pred,
                 const std::vector<std::string>& gold);
double paired_fscore(const std::vector<std::string>& pred,
                     const std::vector<std::string>& gold);
// Geometric mean of V-measure and paired F-score.
double avg_2010(const std::vector<std::string>& pred,
                const std::vector<std::string>& gold);

struct WsiOptions {
  std::size_t n_substitutes = kDefaultSubstituteCount;
  std::size_t k = 0;  // 0 = auto
  PostprocVariant lemmatization = PostprocVariant::NoTargetExclusion();
};

struct WsiTargetResult {
  std::string item;  // lemma.pos
  std::size_t k = 0;
  std::vector<std::string> instance_ids;
  std::vector<int> labels;
};

struct WsiReport {
  std::vector<WsiTargetResult> targets;
  std::optional<double> v_measure;
  std::optional<double> paired_fscore;
  std::optional<double> avg;
};

// Groups by (lemma, pos), clusters each group and scores against gold senses
// when every instance has one.
WsiReport induce_senses(const std::vector<WsiInstance>& dataset,
                        const Model& model, const WsiOptions& options,
                        Execution exec = Execution::kParallel);

// "<lemma.pos> <instance_id> <lemma.pos>.<cluster>" per line.
void WriteSemevalWsi(std::ostream& out, const WsiReport& report);
Json ToJson(const WsiReport& report);

}  // namespace lexsub
