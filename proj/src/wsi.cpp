#include "lexsub/wsi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_map>

namespace lexsub {

std::vector<WsiInstance> ReadWsiJsonl(std::istream& in) {
  std::vector<WsiInstance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      WsiInstance inst;
      inst.context = InstanceFromJson(j);
      if (j.contains("sense") && !j["sense"].is_null()) {
        inst.gold_sense = j["sense"].get<std::string>();
      }
      out.push_back(std::move(inst));
    } catch (const Json::exception& e) {
      throw LexsubError(ErrorCode::kParseError,
                        "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<WsiInstance> ReadWsiJsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LexsubError(ErrorCode::kIo, "cannot open " + path.string());
  return ReadWsiJsonl(in);
}

std::vector<SubstituteVector> TfidfVectors(
    const std::vector<std::string>& ids,
    const std::vector<std::vector<std::string>>& bags) {
  if (ids.size() != bags.size()) {
    throw LexsubError(ErrorCode::kInvalidArgument, "ids and bags differ in size");
  }
  std::vector<std::vector<std::string>> sets(bags.size());
  std::map<std::string, std::size_t> df;
  for (std::size_t i = 0; i < bags.size(); ++i) {
    sets[i] = bags[i];
    std::sort(sets[i].begin(), sets[i].end());
    sets[i].erase(std::unique(sets[i].begin(), sets[i].end()), sets[i].end());
    for (const auto& w : sets[i]) ++df[w];
  }
  const double m = static_cast<double>(bags.size());
  std::vector<SubstituteVector> out(bags.size());
  for (std::size_t i = 0; i < bags.size(); ++i) {
    out[i].instance_id = ids[i];
    double norm = 0.0;
    for (const auto& w : sets[i]) {
      const double idf = std::log(m / static_cast<double>(df[w])) + 1.0;
      out[i].tfidf.emplace_back(w, idf);
      norm += idf * idf;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (auto& [w, v] : out[i].tfidf) v /= norm;
    }
  }
  return out;
}

std::vector<SubstituteVector> build_substitute_vectors(
    const std::vector<WsiInstance>& instances, const Model& model,
    std::size_t n, const PostprocVariant& lemmatization, Execution exec) {
  if (n == 0) throw LexsubError(ErrorCode::kInvalidArgument, "n must be positive");
  for (const auto& inst : instances) {
    if (inst.context.lemma != instances.front().context.lemma ||
        inst.context.pos != instances.front().context.pos) {
      throw LexsubError(ErrorCode::kInvalidArgument,
                        "instances must share lemma and pos");
    }
  }
  std::vector<std::vector<std::string>> bags(instances.size());
  std::vector<std::string> ids(instances.size());
  const Execution gen_exec = model.reentrant ? exec : Execution::kSerial;
  ForEachIndex(instances.size(), gen_exec, [&](std::size_t i) {
    const auto& inst = instances[i].context;
    ids[i] = inst.id;
    const auto lemmas = postprocess(model.generate(inst), inst, lemmatization);
    for (const auto& [w, p] : rank(lemmas, n)) bags[i].push_back(w);
  });
  return TfidfVectors(ids, bags);
}

double CosineDistance(const SubstituteVector& a, const SubstituteVector& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [w, v] : a.tfidf) na += v * v;
  for (const auto& [w, v] : b.tfidf) nb += v * v;
  auto i = a.tfidf.begin();
  auto j = b.tfidf.begin();
  while (i != a.tfidf.end() && j != b.tfidf.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      dot += i->second * j->second;
      ++i;
      ++j;
    }
  }
  if (na == 0.0 || nb == 0.0) return 1.0;
  const double sim = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(1.0 - sim, 0.0, 2.0);
}

std::vector<double> PairwiseCosineDistances(
    const std::vector<SubstituteVector>& vectors, Execution exec) {
  const std::size_t n = vectors.size();
  // Lemmas interned in sorted order keep each id list sorted.
  std::vector<std::string> lemmas;
  for (const auto& v : vectors) {
    for (const auto& [w, x] : v.tfidf) lemmas.push_back(w);
  }
  std::sort(lemmas.begin(), lemmas.end());
  lemmas.erase(std::unique(lemmas.begin(), lemmas.end()), lemmas.end());
  std::vector<std::vector<std::pair<std::size_t, double>>> sparse(n);
  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (const auto& [w, x] : vectors[i].tfidf) {
      const auto id = static_cast<std::size_t>(
          std::lower_bound(lemmas.begin(), lemmas.end(), w) - lemmas.begin());
      sparse[i].emplace_back(id, x);
      sq += x * x;
    }
    norms[i] = std::sqrt(sq);
  }

  std::vector<double> d(n * n, 0.0);
  ForEachIndex(n, exec, [&](std::size_t i) {
    const auto& a = sparse[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b = sparse[j];
      double dot = 0.0;
      std::size_t x = 0, y = 0;
      while (x < a.size() && y < b.size()) {
        if (a[x].first < b[y].first) {
          ++x;
        } else if (b[y].first < a[x].first) {
          ++y;
        } else {
          dot += a[x++].second * b[y++].second;
        }
      }
      double v = 1.0;
      if (norms[i] != 0.0 && norms[j] != 0.0) {
        v = std::clamp(1.0 - dot / (norms[i] * norms[j]), 0.0, 2.0);
      }
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  });
  return d;
}

namespace {

constexpr double kTieEpsilon = 1e-12;
constexpr std::size_t kAutoMinK = 2;
constexpr std::size_t kAutoMaxK = 8;

std::vector<int> CutDendrogram(const std::vector<Merge>& merges, std::size_t n,
                               std::size_t k) {
  std::vector<std::size_t> rep(n);
  std::iota(rep.begin(), rep.end(), 0);
  auto find = [&](std::size_t x) {
    while (rep[x] != x) x = rep[x] = rep[rep[x]];
    return x;
  };
  for (std::size_t m = 0; m < n - k; ++m) {
    const auto a = find(merges[m].left);
    const auto b = find(merges[m].right);
    rep[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> labels(n, -1);
  std::unordered_map<std::size_t, int> ids;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = ids.emplace(find(i), static_cast<int>(ids.size()));
    labels[i] = it->second;
  }
  return labels;
}

std::vector<Merge> AverageLinkage(const std::vector<double>& distances,
                                  std::size_t n) {
  std::vector<double> d = distances;
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  std::vector<Merge> merges;
  merges.reserve(n - 1);
  // Cluster ids are their smallest member index, so merging a into b < a
  // keeps slot b.
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = n;
    std::size_t bj = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (d[i * n + j] < best - kTieEpsilon) {
          best = d[i * n + j];
          bi = i;
          bj = j;
        }
      }
    }
    merges.push_back({bi, bj, best});
    const double si = static_cast<double>(size[bi]);
    const double sj = static_cast<double>(size[bj]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double v = (si * d[bi * n + k] + sj * d[bj * n + k]) / (si + sj);
      d[bi * n + k] = v;
      d[k * n + bi] = v;
    }
    size[bi] += size[bj];
    active[bj] = false;
  }
  return merges;
}

}  // namespace

double MeanSilhouette(const std::vector<double>& distances, std::size_t n,
                      const std::vector<int>& labels) {
  const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (k < 2) return 0.0;
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto own = static_cast<std::size_t>(labels[i]);
    if (counts[own] == 1) continue;  // singleton silhouette is 0
    std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sums[static_cast<std::size_t>(labels[j])] += distances[i * n + j];
    }
    const double a = sums[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(counts[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

Clustering ClusterFromDistances(const std::vector<double>& distances,
                                std::size_t n, std::size_t k) {
  if (n < 2) {
    throw LexsubError(ErrorCode::kTooFewInstances,
                      "clustering needs at least 2 instances, got " +
                          std::to_string(n));
  }
  if (distances.size() != n * n) {
    throw LexsubError(ErrorCode::kDimensionMismatch, "distance matrix is not n x n");
  }
  if (k > n) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      "k=" + std::to_string(k) + " exceeds " + std::to_string(n) +
                          " instances");
  }
  Clustering result;
  result.merges = AverageLinkage(distances, n);
  if (k != 0) {
    result.k = k;
    result.labels = CutDendrogram(result.merges, n, k);
    return result;
  }
  const std::size_t hi = std::min(kAutoMaxK, n > 2 ? n - 1 : n);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t cand = kAutoMinK; cand <= hi; ++cand) {
    auto labels = CutDendrogram(result.merges, n, cand);
    const double s = MeanSilhouette(distances, n, labels);
    if (s > best + kTieEpsilon) {
      best = s;
      result.k = cand;
      result.labels = std::move(labels);
    }
  }
  result.silhouette = best;
  return result;
}

Clustering cluster(const std::vector<SubstituteVector>& vectors, std::size_t k,
                   Execution exec) {
  if (vectors.size() < 2) {
    throw LexsubError(ErrorCode::kTooFewInstances,
                      "clustering needs at least 2 instances, got " +
                          std::to_string(vectors.size()));
  }
  return ClusterFromDistances(PairwiseCosineDistances(vectors, exec),
                              vectors.size(), k);
}

namespace {

struct Contingency {
  std::map<std::pair<std::string, std::string>, double> joint;
  std::map<std::string, double> pred;
  std::map<std::string, double> gold;
  double n = 0.0;
};

Contingency Count(const std::vector<std::string>& pred,
                  const std::vector<std::string>& gold) {
  if (pred.size() != gold.size()) {
    throw LexsubError(ErrorCode::kDimensionMismatch,
                      "prediction and gold labelings differ in length");
  }
  if (pred.empty()) {
    throw LexsubError(ErrorCode::kInvalidArgument, "empty labeling");
  }
  Contingency c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    c.joint[{pred[i], gold[i]}] += 1.0;
    c.pred[pred[i]] += 1.0;
    c.gold[gold[i]] += 1.0;
  }
  c.n = static_cast<double>(pred.size());
  return c;
}

double Entropy(const std::map<std::string, double>& counts, double n) {
  double h = 0.0;
  for (const auto& [label, c] : counts) h -= (c / n) * std::log(c / n);
  return h;
}

double Pairs(double c) { return c * (c - 1.0) / 2.0; }

}  // namespace

double v_measure(const std::vector<std::string>& pred,
                 const std::vector<std::string>& gold) {
  const auto c = Count(pred, gold);
  const double h_gold = Entropy(c.gold, c.n);
  const double h_pred = Entropy(c.pred, c.n);
  double h_gold_given_pred = 0.0;
  double h_pred_given_gold = 0.0;
  for (const auto& [key, count] : c.joint) {
    const double p = count / c.n;
    h_gold_given_pred -= p * std::log(count / c.pred.at(key.first));
    h_pred_given_gold -= p * std::log(count / c.gold.at(key.second));
  }
  const double homogeneity = h_gold == 0.0 ? 1.0 : 1.0 - h_gold_given_pred / h_gold;
  const double completeness = h_pred == 0.0 ? 1.0 : 1.0 - h_pred_given_gold / h_pred;
  if (homogeneity + completeness == 0.0) return 0.0;
  return 2.0 * homogeneity * completeness / (homogeneity + completeness);
}

double paired_fscore(const std::vector<std::string>& pred,
                     const std::vector<std::string>& gold) {
  const auto c = Count(pred, gold);
  double common = 0.0;
  double pred_pairs = 0.0;
  double gold_pairs = 0.0;
  for (const auto& [key, count] : c.joint) common += Pairs(count);
  for (const auto& [label, count] : c.pred) pred_pairs += Pairs(count);
  for (const auto& [label, count] : c.gold) gold_pairs += Pairs(count);
  if (pred_pairs == 0.0 && gold_pairs == 0.0) return 1.0;
  if (pred_pairs == 0.0 || gold_pairs == 0.0) return 0.0;
  const double precision = common / pred_pairs;
  const double recall = common / gold_pairs;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double avg_2010(const std::vector<std::string>& pred,
                const std::vector<std::string>& gold) {
  return std::sqrt(v_measure(pred, gold) * paired_fscore(pred, gold));
}

namespace {

std::string ItemName(const LexSubInstance& inst) {
  return inst.lemma + "." + PosLetter(inst.pos);
}

}  // namespace

WsiReport induce_senses(const std::vector<WsiInstance>& dataset,
                        const Model& model, const WsiOptions& options,
                        Execution exec) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    groups[ItemName(dataset[i].context)].push_back(i);
  }
  std::vector<std::vector<WsiInstance>> subsets;
  WsiReport report;
  for (const auto& [item, indices] : groups) {
    WsiTargetResult target;
    target.item = item;
    std::vector<WsiInstance> subset;
    for (auto i : indices) {
      subset.push_back(dataset[i]);
      target.instance_ids.push_back(dataset[i].context.id);
    }
    subsets.push_back(std::move(subset));
    report.targets.push_back(std::move(target));
  }
  // Vectors are built group by group (parallel inside), clustering runs one
  // target per thread.
  std::vector<std::vector<SubstituteVector>> vectors(subsets.size());
  for (std::size_t g = 0; g < subsets.size(); ++g) {
    vectors[g] = build_substitute_vectors(subsets[g], model, options.n_substitutes,
                                          options.lemmatization, exec);
  }
  ForEachIndex(subsets.size(), exec, [&](std::size_t g) {
    auto& target = report.targets[g];
    if (vectors[g].size() < 2) {
      target.k = vectors[g].size();
      target.labels.assign(vectors[g].size(), 0);
      return;
    }
    std::size_t k = options.k;
    if (k > vectors[g].size()) k = vectors[g].size();
    const auto result = cluster(vectors[g], k, Execution::kSerial);
    target.k = result.k;
    target.labels = result.labels;
  });

  const bool have_gold = !dataset.empty() &&
      std::all_of(dataset.begin(), dataset.end(),
                  [](const WsiInstance& w) { return w.gold_sense.has_value(); });
  if (have_gold) {
    // Per-target scores, averaged with instance-count weights.
    double v = 0.0;
    double f = 0.0;
    double total = 0.0;
    for (std::size_t g = 0; g < subsets.size(); ++g) {
      std::vector<std::string> pred;
      std::vector<std::string> gold;
      for (std::size_t i = 0; i < subsets[g].size(); ++i) {
        pred.push_back(std::to_string(report.targets[g].labels[i]));
        gold.push_back(*subsets[g][i].gold_sense);
      }
      const double w = static_cast<double>(pred.size());
      v += w * v_measure(pred, gold);
      f += w * paired_fscore(pred, gold);
      total += w;
    }
    report.v_measure = v / total;
    report.paired_fscore = f / total;
    report.avg = std::sqrt(*report.v_measure * *report.paired_fscore);
  }
  return report;
}

void WriteSemevalWsi(std::ostream& out, const WsiReport& report) {
  for (const auto& target : report.targets) {
    for (std::size_t i = 0; i < target.instance_ids.size(); ++i) {
      out << target.item << ' ' << target.instance_ids[i] << ' ' << target.item
          << '.' << target.labels[i] << '\n';
    }
  }
}

Json ToJson(const WsiReport& report) {
  auto opt = [](const std::optional<double>& v) -> Json {
    return v ? Json(*v) : Json(nullptr);
  };
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["metrics"] = {{"v_measure", opt(report.v_measure)},
                  {"paired_fscore", opt(report.paired_fscore)},
                  {"avg", opt(report.avg)}};
  Json targets = Json::array();
  for (const auto& t : report.targets) {
    Json row;
    row["item"] = t.item;
    row["k"] = t.k;
    Json labels = Json::object();
    for (std::size_t i = 0; i < t.instance_ids.size(); ++i) {
      labels[t.instance_ids[i]] = t.labels[i];
    }
    row["labels"] = std::move(labels);
    targets.push_back(std::move(row));
  }
  j["targets"] = std::move(targets);
  return j;
}

}  // namespace lexsub
