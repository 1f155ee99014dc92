// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lexsub/augment.hpp"
#include "lexsub/backends.hpp"
#include "lexsub/classifier.hpp"
#include "lexsub/evaluation.hpp"
#include "lexsub/relations.hpp"
#include "lexsub/wordnet.hpp"
#include "lexsub/wsi.hpp"
#include "oracles.hpp"
#include "recording_scorer.hpp"
#include "synthetic_snips.hpp"

using namespace lexsub;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

struct Criterion {
  std::string name;
  double budget_seconds;  // 0 = no runtime gate
  std::function<void(Outcome&)> run;
};

// ---------------------------------------------------------------------------

void GapOracle(Outcome& out) {
  DerivedRng rng(20240601);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f", "g", "h"};
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> pool = words;
    const std::size_t n = 1 + rng.Below(words.size());
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.Below(i)]);
    pool.resize(n);
    GoldWeights gold;
    for (const auto& w : words) {
      if (rng.Below(2) == 1) gold[w] = 1 + static_cast<int>(rng.Below(5));
    }
    if (gold.empty()) gold[words[rng.Below(words.size())]] = 1 + static_cast<int>(rng.Below(5));
    const double got = gap(pool, gold);
    const double want = boost::rational_cast<double>(oracle::ExactGap(pool, gold));
    worst = std::max(worst, std::abs(got - want));
  }
  out.Require(worst <= 1e-9, "max |gap - exact| <= 1e-9");
  out.detail << "1000 random cases, max abs error " << worst << "; ";

  const GoldWeights hand{{"a", 2}, {"b", 1}};
  const double h1 = gap({"a", "b"}, hand);
  const double h2 = gap({"b", "a"}, hand);
  const double h3 = gap({"c", "a", "b"}, hand);
  const double e2 = boost::rational_cast<double>(oracle::Rational(5, 7));
  const double e3 = boost::rational_cast<double>(oracle::Rational(4, 7));
  out.Require(h1 == 1.0, "ideal ranking gives 1");
  out.Require(std::abs(h2 - e2) <= 1e-15, "swapped ranking gives 5/7");
  out.Require(std::abs(h3 - e3) <= 1e-15, "leading miss gives 4/7");
  char buf[96];
  std::snprintf(buf, sizeof buf, "hand values %.4f %.4f %.4f", h1, h2, h3);
  out.detail << buf;
}

void CombinationMath(Outcome& out) {
  DerivedRng rng(77);
  double identity_err = 0.0;
  double scaling_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.Below(20);
    std::vector<WordProb> ctx, flat;
    std::unordered_map<std::string, double> counts;
    std::vector<std::string> vocab;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string w = "w" + std::to_string(i);
      ctx.emplace_back(w, 1e-3 + rng.Uniform());
      flat.emplace_back(w, 1.0);
      counts[w] = 1.0 + 100.0 * rng.Uniform();
      vocab.push_back(w);
    }
    const auto p_ctx = normalize(ctx);
    const auto fused =
        inject_target(p_ctx, normalize(flat), UnigramPrior::FromCounts(counts), 0.0);
    for (const auto& [w, p] : p_ctx) {
      identity_err = std::max(identity_err, std::abs(fused.prob(w) - p));
    }

    // Powers of two keep the scaled float vectors exact, so every inner
    // product is exactly c times the original.
    const std::size_t dim = 2 + rng.Below(6);
    const float c = std::ldexp(1.0f, static_cast<int>(rng.Below(9)) - 4);
    const double temperature = 0.1 + 2.0 * rng.Uniform();
    EmbeddingTable emb(dim), scaled(dim);
    std::vector<float> t(dim);
    for (auto& x : t) x = static_cast<float>(rng.Uniform() - 0.5);
    std::vector<float> tc(dim);
    for (std::size_t d = 0; d < dim; ++d) tc[d] = t[d] * c;
    emb.add("target", t);
    scaled.add("target", tc);
    std::vector<WordProb> products, scaled_products;
    const double real_c = 0.05 + 20.0 * rng.Uniform();
    for (const auto& w : vocab) {
      std::vector<float> v(dim);
      for (auto& x : v) x = static_cast<float>(rng.Uniform() - 0.5);
      emb.add(w, v);
      scaled.add(w, v);
      products.emplace_back(w, Dot(v, t));
      scaled_products.emplace_back(w, real_c * Dot(v, t));
    }
    const auto p = target_similarity("target", emb, temperature, vocab);
    const auto q = target_similarity("target", scaled, temperature * c, vocab);
    const auto ps = Softmax(products, temperature);
    const auto qs = Softmax(scaled_products, temperature * real_c);
    for (const auto& w : vocab) {
      scaling_err = std::max(scaling_err, std::abs(ps.prob(w) - qs.prob(w)));
      scaling_err = std::max(scaling_err, std::abs(p.prob(w) - q.prob(w)));
    }
  }
  out.Require(identity_err <= 1e-9, "inject_target identity within 1e-9");
  out.Require(scaling_err <= 1e-9, "temperature scaling invariance within 1e-9");

  const auto left = normalize({{"a", 0.5}, {"b", 0.5}});
  const auto right = normalize({{"a", 0.25}, {"b", 0.75}});
  const auto flat = forward_backward_combine(left, right, UnigramPrior::Uniform(), 1.0);
  const auto penal =
      forward_backward_combine(left, right, UnigramPrior({{"a", 0.2}, {"b", 0.8}}, 1e-9), 1.0);
  const bool hand = std::abs(flat.prob("a") - 0.25) <= 1e-15 &&
                    std::abs(flat.prob("b") - 0.75) <= 1e-15 &&
                    std::abs(penal.prob("a") - 4.0 / 7.0) <= 1e-15 &&
                    std::abs(penal.prob("b") - 3.0 / 7.0) <= 1e-15;
  out.Require(hand, "forward-backward hand examples");
  out.detail << "identity err " << identity_err << ", scaling err " << scaling_err
             << ", hand examples " << (hand ? "match" : "differ");
}

void TargetHiding(Outcome& out) {
  const std::vector<std::string> vocab = {"[MASK]", "<mask>", "the", "a", "dog", "cat",
                                          "ran", "home", "quickly", "bright", "##ly"};
  auto mlm_scorer = std::make_shared<testing_support::RecordingScorer>(vocab);
  auto plm_scorer = std::make_shared<testing_support::RecordingScorer>(vocab);
  MaskedLmEstimator mlm(mlm_scorer, {});
  TransformerOptions popts;
  popts.mask_token = "<mask>";
  PermutationLmEstimator plm(plm_scorer, popts);

  const std::vector<std::string> context_words = {"the", "a", "dog", "cat", "ran",
                                                  "home", "quickly", "of", "in"};
  DerivedRng rng(31337);
  std::size_t mlm_ok = 0, plm_ok = 0;
  const std::size_t trials = 100;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    LexSubInstance inst;
    inst.id = "h" + std::to_string(trial);
    const std::size_t n = 1 + rng.Below(70);
    for (std::size_t i = 0; i < n; ++i) {
      inst.tokens.push_back(context_words[rng.Below(context_words.size())]);
    }
    inst.target_index = rng.Below(n);
    // A target spelling that cannot come from the context vocabulary.
    std::string target = "tgt";
    for (int i = 0; i < 6; ++i) target += static_cast<char>('a' + rng.Below(26));
    inst.tokens[inst.target_index] = target;
    inst.lemma = target;

    EstimatorConfig cfg;
    cfg.injection = Injection::kNoTarget;
    auto absent = [&](const ScoreRequest& r) {
      return std::none_of(r.tokens.begin(), r.tokens.end(), [&](const std::string& tok) {
        return tok.find(target) != std::string::npos;
      });
    };

    mlm_scorer->clear();
    cfg.backend = BackendKind::kMaskedLm;
    generate(mlm, inst, cfg);
    const auto mreq = mlm_scorer->requests();
    if (mreq.size() == 1 && absent(mreq[0])) ++mlm_ok;

    plm_scorer->clear();
    cfg.backend = BackendKind::kPermutationLm;
    generate(plm, inst, cfg);
    const auto preq = plm_scorer->requests();
    if (preq.size() == 1 && absent(preq[0]) && preq[0].visible.size() == preq[0].tokens.size() &&
        preq[0].visible[preq[0].position] == 0) {
      ++plm_ok;
    }
  }
  out.Require(mlm_ok == trials, "masked-lm hides the target every time");
  out.Require(plm_ok == trials, "permutation-lm hides the target every time");
  out.detail << "masked-lm " << mlm_ok << "/" << trials << ", permutation-lm " << plm_ok << "/"
             << trials;
}

std::pair<SynsetGraph, oracle::TinyGraph> RandomGraph(DerivedRng& rng) {
  const std::size_t n = 1 + rng.Below(30);
  SynsetGraph g;
  oracle::TinyGraph t;
  t.parents.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.AddSynset("s" + std::to_string(i), Pos::kNoun, {});
  for (std::size_t i = 1; i < n; ++i) {
    std::set<std::size_t> ps;
    const std::size_t k = rng.Below(3);
    for (std::size_t e = 0; e < k; ++e) ps.insert(rng.Below(i));
    for (std::size_t p : ps) {
      g.AddHypernym(i, p);
      t.parents[i].push_back(static_cast<int>(p));
    }
  }
  const std::size_t words = 2 + rng.Below(8);
  for (std::size_t w = 0; w < words; ++w) {
    const std::string lemma = "w" + std::to_string(w);
    const std::size_t senses = rng.Below(3);
    for (std::size_t s = 0; s < senses; ++s) {
      const std::size_t id = rng.Below(n);
      g.AddSense(lemma, Pos::kNoun, id);
      auto& list = t.senses[lemma];
      if (std::find(list.begin(), list.end(), static_cast<int>(id)) == list.end()) {
        list.push_back(static_cast<int>(id));
      }
    }
    if (senses == 0) t.senses[lemma];
  }
  return {std::move(g), std::move(t)};
}

void Relations(Outcome& out, const std::filesystem::path& data) {
  const auto graph = SynsetGraph::FromWordNetDir(data / "wordnet");
  std::ifstream in(data / "relation_pairs.tsv");
  out.Require(static_cast<bool>(in), "fixture readable");
  std::string line;
  std::size_t pairs = 0, agree = 0;
  std::set<std::string> labels;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string target, sub, pos, label;
    std::getline(row, target, '\t');
    std::getline(row, sub, '\t');
    std::getline(row, pos, '\t');
    std::getline(row, label, '\t');
    ++pairs;
    labels.insert(label);
    if (RelationName(classify(target, sub, ParsePos(pos), graph)) == label) {
      ++agree;
    } else {
      out.detail << "{" << target << "/" << sub << "} ";
    }
  }
  out.Require(pairs >= 30, "at least 30 hand pairs");
  out.Require(labels.size() == kRelationLabelCount, "all labels covered");
  out.Require(agree == pairs, "hand pairs agree");

  DerivedRng rng(99);
  std::size_t queries = 0, oracle_agree = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto [g, t] = RandomGraph(rng);
    for (const bool total : {false, true}) {
      RelationOptions opts;
      opts.hops = total ? CoHyponymHops::kTotalPath : CoHyponymHops::kPerSide;
      for (const auto& [a, sa] : t.senses) {
        for (const auto& [b, sb] : t.senses) {
          ++queries;
          if (RelationName(classify(a, b, Pos::kNoun, g, opts)) ==
              oracle::RelationOf(t, a, b, 3, total)) {
            ++oracle_agree;
          }
        }
      }
    }
  }
  out.Require(oracle_agree == queries, "random graphs agree with the oracle");
  out.detail << "hand " << agree << "/" << pairs << " (" << labels.size() << " labels), oracle "
             << oracle_agree << "/" << queries << " on 100 graphs";
}

void Wsi(Outcome& out) {
  // Contexts of "guitar" and "carrot" merged under one pseudoword. Each
  // context yields the sense's core substitutes plus one word tied to each
  // neighbour.
  struct Sense {
    std::string name;
    std::vector<std::string> left, right, core;
  };
  const std::vector<Sense> senses = {
      {"guitar",
       {"acoustic", "electric", "bass"},
       {"solo", "strings", "riff"},
       {"instrument", "lute", "banjo", "mandolin", "ukulele"}},
      {"carrot",
       {"raw", "sliced", "grated"},
       {"soup", "cake", "salad"},
       {"vegetable", "root", "parsnip", "turnip", "radish"}},
  };
  Json table = Json::object();
  for (const auto& sense : senses) {
    for (std::size_t i = 0; i < sense.left.size(); ++i) {
      for (std::size_t j = 0; j < sense.right.size(); ++j) {
        Json row = Json::object();
        for (std::size_t c = 0; c < sense.core.size(); ++c) row[sense.core[c]] = 5 - c;
        row[sense.left[i] + "ish"] = 2;
        row[sense.right[j] + "like"] = 2;
        table[sense.left[i] + "|" + sense.right[j]] = row;
      }
    }
  }
  auto toy = std::make_shared<ToyTableEstimator>(Json{{"table", table}});
  EstimatorConfig cfg;
  cfg.injection = Injection::kNoTarget;
  const Model model = MakeModel("toy", toy, cfg);

  std::vector<WsiInstance> data;
  auto add = [&](const std::string& l, const std::string& r, const std::string& sense) {
    WsiInstance w;
    w.context.id = sense + std::to_string(data.size());
    w.context.tokens = {"the", l, "guitarcarrot", r};
    w.context.target_index = 2;
    w.context.lemma = "guitarcarrot";
    w.gold_sense = sense;
    data.push_back(std::move(w));
  };
  for (const auto& sense : senses) {
    for (const auto& l : sense.left) {
      for (const auto& r : sense.right) add(l, r, sense.name);
    }
  }
  WsiOptions opts;
  opts.k = 0;
  const auto report = induce_senses(data, model, opts);
  const double v = report.v_measure.value_or(-1.0);
  const double f = report.paired_fscore.value_or(-1.0);
  out.Require(report.targets.size() == 1 && report.targets[0].k == 2, "two clusters chosen");
  out.Require(v == 1.0, "V-measure is 1");
  out.Require(f == 1.0, "paired F-score is 1");

  const double hand = paired_fscore({"x", "x", "x", "x"}, {"s1", "s1", "s2", "s2"});
  out.Require(hand == 0.5, "one-cluster hand case gives 0.5");
  out.detail << "pseudoword k=" << (report.targets.empty() ? 0 : report.targets[0].k)
             << " V=" << v << " F=" << f << "; hand paired F=" << hand;
}

void Augmentation(Outcome& out, const Model& lm) {
  const auto dist = normalize({{"a", 0.6}, {"b", 0.4}});
  DerivedRng rng(2718);
  std::size_t a = 0;
  const std::size_t draws = 10000;
  for (std::size_t i = 0; i < draws; ++i) a += SampleSubstitute(dist, rng) == "a";
  const double freq = static_cast<double>(a) / draws;
  out.Require(std::abs(freq - 0.6) <= 0.02, "sampling within 0.02");

  DerivedRng urng(4242);
  std::size_t ok = 0, with_slots = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto src = testing_support::RandomUtterance(urng, i);
    bool good = true;
    try {
      Validate(src);
      const auto aug = augment_one(src, lm, {}, i);
      ++with_slots;
      Validate(aug);
      const auto& p = *aug.provenance;
      const bool inside = std::any_of(src.slots.begin(), src.slots.end(), [&](const SlotSpan& s) {
        return p.replaced_index >= s.start && p.replaced_index < s.end;
      });
      good = aug.tokens.size() == src.tokens.size() && aug.slots == src.slots &&
             aug.intent == src.intent && inside && p.original == src.tokens[p.replaced_index] &&
             aug.tokens[p.replaced_index] == p.substitute && p.source_id == src.id;
      for (std::size_t t = 0; t < src.tokens.size() && good; ++t) {
        if (t != p.replaced_index) good = aug.tokens[t] == src.tokens[t];
      }
    } catch (const LexsubError& e) {
      good = e.code() == ErrorCode::kNoSlotTokens && src.slots.empty();
    }
    ok += good;
  }
  out.Require(ok == 1000, "span invariants on 1000 utterances");

  const auto snips = testing_support::SyntheticSnips(11);
  const auto sub = subsample_train(snips, 0.1, 5);
  std::map<std::string, std::size_t> counts;
  for (const auto& u : sub) ++counts[u.intent];
  double worst = 0.0;
  for (const auto& [intent, n] : testing_support::SnipsTrainCounts()) {
    worst = std::max(worst, std::abs(static_cast<double>(counts[intent]) - 0.1 * n));
  }
  out.Require(worst <= 1.0, "per-intent counts within 1");
  out.detail << "freq(a)=" << freq << "; invariants " << ok << "/1000 (" << with_slots
             << " with slots); subsample of " << snips.size() << " max deviation " << worst;
}

void Trend(Outcome& out, const Model& lm) {
  const auto train = testing_support::SyntheticSnips(101);
  const auto test = testing_support::SyntheticSnips(202, 100);
  double base_sum = 0.0, aug_sum = 0.0;
  const int seeds = 5;
  for (int s = 1; s <= seeds; ++s) {
    const auto small = subsample_train(train, 0.01, s);
    BagOfWordsClassifier base;
    base.Train(small);
    const double base_acc = base.Accuracy(test);
    const auto augmented = augment_dataset(small, lm, 5, s);
    BagOfWordsClassifier aug;
    aug.Train(augmented.dataset);
    const double aug_acc = aug.Accuracy(test);
    base_sum += base_acc;
    aug_sum += aug_acc;
    out.detail << "seed " << s << ": " << small.size() << " ex " << base_acc << " -> "
               << augmented.dataset.size() << " ex " << aug_acc << "; ";
  }
  const double base_mean = base_sum / seeds;
  const double aug_mean = aug_sum / seeds;
  out.Require(aug_mean >= base_mean, "augmented mean >= plain mean");
  out.detail << "mean " << base_mean << " -> " << aug_mean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexsub acceptance checks"};
  std::string data_dir = LEXSUB_TEST_DATA;
  app.add_option("--data", data_dir, "Fixture directory");
  CLI11_PARSE(app, argc, argv);
  const std::filesystem::path data(data_dir);

  // Unlabelled utterances from an independent generator seed stand in for the
  // language model's pre-training text.
  const auto lm_estimator = std::make_shared<const ForwardBackwardLmEstimator>(
      testing_support::Sentences(testing_support::SyntheticSnips(7, 3000)),
      ForwardBackwardLmEstimator::Options{});
  EstimatorConfig lm_cfg;
  lm_cfg.backend = BackendKind::kForwardBackwardLm;
  lm_cfg.injection = Injection::kNoTarget;
  const Model lm = MakeModel("bigram+notgt", lm_estimator, lm_cfg);

  const std::vector<Criterion> criteria = {
      {"gap-oracle", 10.0, GapOracle},
      {"combination-math", 1.0, CombinationMath},
      {"target-hiding", 0.0, TargetHiding},
      {"relations", 5.0, [&](Outcome& o) { Relations(o, data); }},
      {"wsi", 0.0, Wsi},
      {"augmentation", 0.0, [&](Outcome& o) { Augmentation(o, lm); }},
      {"augmentation-trend", 300.0, [&](Outcome& o) { Trend(o, lm); }},
  };

  bool all = true;
  for (const auto& c : criteria) {
    Outcome outcome;
    const auto start = Clock::now();
    try {
      c.run(outcome);
    } catch (const std::exception& e) {
      outcome.Require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.budget_seconds > 0.0) {
      outcome.Require(secs < c.budget_seconds,
                      "runtime under " + std::to_string(c.budget_seconds) + " s");
    }
    all = all && outcome.pass;
    std::printf("%s %-20s %.3fs %s\n", outcome.pass ? "PASS" : "FAIL", c.name.c_str(), secs,
                outcome.detail.str().c_str());
  }
  std::printf("SKIP %-20s pretrained weights not provisioned\n", "real-backend-numbers");
  std::fflush(stdout);
  return all ? 0 : 1;
}
