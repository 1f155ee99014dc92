#include <doctest.h>

#include <algorithm>
#include <memory>

#include "lexsub/backends.hpp"
#include "recording_scorer.hpp"

using namespace lexsub;
using testing_support::RecordingScorer;

namespace {

LexSubInstance Sentence(std::vector<std::string> tokens, std::size_t target) {
  LexSubInstance inst;
  inst.id = "t";
  inst.lemma = tokens.at(target);
  inst.tokens = std::move(tokens);
  inst.target_index = target;
  return inst;
}

const std::vector<std::string> kCorpus = {
    "the dog ran home", "the cat ran home",  "the dog sat down",
    "a cat sat down",   "the horse ran off", "a dog barked loudly"};

}  // namespace

TEST_CASE("forward and backward bigram conditionals are normalized") {
  ForwardBackwardLmEstimator lm(kCorpus, {});
  const auto fwd = lm.Forward("the");
  const auto bwd = lm.Backward("ran");
  CHECK(fwd.total() == doctest::Approx(1.0));
  CHECK(bwd.total() == doctest::Approx(1.0));
  CHECK(fwd.prob("dog") > fwd.prob("loudly"));
  CHECK(bwd.prob("horse") > bwd.prob("down"));
  // Unseen history backs off to the unigram distribution.
  const auto unseen = lm.Forward("zebra");
  CHECK(unseen.prob("the") > unseen.prob("horse"));
}

TEST_CASE("forward-backward LM never conditions on the target") {
  ForwardBackwardLmEstimator lm(kCorpus, {});
  EstimatorConfig cfg;
  cfg.backend = BackendKind::kForwardBackwardLm;
  const auto a = lm.EstimateContext(Sentence({"the", "dog", "ran", "home"}, 1), cfg);
  const auto b = lm.EstimateContext(Sentence({"the", "xylophone", "ran", "home"}, 1), cfg);
  CHECK(a == b);
  CHECK(a.prob("cat") > a.prob("home"));
  const auto supported = lm.supported_injections();
  CHECK(std::find(supported.begin(), supported.end(), Injection::kBase) == supported.end());
}

TEST_CASE("toy table keys") {
  const auto toy = ToyTableEstimator::FromFile(LEXSUB_TEST_DATA "/toy_table.json");
  EstimatorConfig cfg;
  cfg.injection = Injection::kNoTarget;
  const auto fallback = toy.EstimateContext(Sentence({"zz", "dog", "qq"}, 1), cfg);
  CHECK(fallback.prob("thing") == 1.0);
  CHECK(LeftNeighbour(Sentence({"dog"}, 0)) == kSentenceStart);
  CHECK(RightNeighbour(Sentence({"dog"}, 0)) == kSentenceEnd);
}

TEST_CASE("vocabulary filtering by piece style") {
  const std::vector<std::string> raw = {"[CLS]", "dog", "##s", "cat", "3d", "\xE2\x96\x81" "car",
                                        "ing"};
  const auto wp = FilterVocabulary(raw, VocabStyle::kWordPiece);
  std::vector<std::string> wp_words;
  for (const auto& [i, w] : wp) wp_words.push_back(w);
  CHECK(wp_words == std::vector<std::string>{"dog", "cat", "ing"});
  const auto sp = FilterVocabulary(raw, VocabStyle::kSentencePiece);
  REQUIRE(sp.size() == 1);
  CHECK(sp[0].first == 5);
  CHECK(sp[0].second == "car");
}

TEST_CASE("masked LM hides the target under notgt and shows it under base") {
  auto scorer = std::make_shared<RecordingScorer>(
      std::vector<std::string>{"[MASK]", "dog", "cat", "puppy", "##s"});
  MaskedLmEstimator mlm(scorer, {});
  CHECK(mlm.vocabulary() == std::vector<std::string>{"cat", "dog", "puppy"});
  EstimatorConfig cfg;
  cfg.backend = BackendKind::kMaskedLm;
  const auto inst = Sentence({"the", "dog", "ran"}, 1);

  cfg.injection = Injection::kNoTarget;
  const auto d = generate(mlm, inst, cfg);
  CHECK(d.total() == doctest::Approx(1.0));
  auto reqs = scorer->requests();
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0].tokens[1] == "[MASK]");
  CHECK(std::count(reqs[0].tokens.begin(), reqs[0].tokens.end(), "dog") == 0);

  scorer->clear();
  cfg.injection = Injection::kBase;
  generate(mlm, inst, cfg);
  reqs = scorer->requests();
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0].tokens[1] == "dog");
}

TEST_CASE("permutation LM masks attention to the target and pads short contexts") {
  auto scorer = std::make_shared<RecordingScorer>(std::vector<std::string>{"dog", "cat"});
  TransformerOptions opts;
  opts.mask_token = "<mask>";
  opts.vocab_style = VocabStyle::kPlain;
  PermutationLmEstimator plm(scorer, opts);
  EstimatorConfig cfg;
  cfg.backend = BackendKind::kPermutationLm;
  cfg.injection = Injection::kNoTarget;
  generate(plm, Sentence({"the", "dog", "ran"}, 1), cfg);
  const auto reqs = scorer->requests();
  REQUIRE(reqs.size() == 1);
  const auto& r = reqs[0];
  const auto pad = PaddingTokens(cfg.padding_text);
  CHECK(r.tokens.size() == pad.size() + 3);
  CHECK(r.position == pad.size() + 1);
  CHECK(r.tokens[r.position] == "<mask>");
  REQUIRE(r.visible.size() == r.tokens.size());
  CHECK(r.visible[r.position] == 0);
  CHECK(std::count(r.visible.begin(), r.visible.end(), 0) == 1);
}

TEST_CASE("remote scorer reports an unreachable server as unavailable") {
  RemoteTokenScorer remote("http://127.0.0.1:9", {"dog"}, 2);
  try {
    remote.Score({{"a", "dog"}, 1, {}});
    FAIL("expected failure");
  } catch (const LexsubError& e) {
    CHECK(e.code() == ErrorCode::kBackendUnavailable);
  }
}

TEST_CASE("dependency and context embedding estimators") {
  EmbeddingTable words(2), ctx(2);
  words.add("bright", {1.0f, 0.0f});
  words.add("shiny", {0.9f, 0.1f});
  words.add("smart", {0.1f, 0.9f});
  ctx.add("student", {0.0f, 1.0f});
  const auto inst = Sentence({"a", "bright", "student"}, 1);
  EstimatorConfig cfg;
  cfg.backend = BackendKind::kDependencyEmbedding;
  cfg.injection = Injection::kBase;

  DependencyEmbeddingEstimator ooc(DependencyEmbeddingEstimator::Mode::kOoc, words, std::nullopt);
  DependencyEmbeddingEstimator npic(DependencyEmbeddingEstimator::Mode::kNpic, words, ctx);
  CHECK(generate(npic, inst, cfg).prob("smart") > generate(ooc, inst, cfg).prob("smart"));
  cfg.injection = Injection::kNoTarget;
  CHECK_THROWS_AS(generate(ooc, inst, cfg), LexsubError);

  auto shared_ctx = std::make_shared<const EmbeddingTable>(ctx);
  ContextEmbeddingEstimator c2v(words, WindowMeanEncoder(shared_ctx, 2));
  cfg.backend = BackendKind::kContextEmbedding;
  cfg.injection = Injection::kNoTarget;
  const auto d = generate(c2v, inst, cfg);
  CHECK(d.prob("smart") > d.prob("shiny"));
}
