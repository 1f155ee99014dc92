#include <doctest.h>

#include <cmath>

#include "lexsub/backends.hpp"
#include "lexsub/estimators.hpp"

using namespace lexsub;

namespace {

LexSubInstance Sentence(std::vector<std::string> tokens, std::size_t target,
                        std::string lemma) {
  LexSubInstance inst;
  inst.id = "t";
  inst.tokens = std::move(tokens);
  inst.target_index = target;
  inst.lemma = std::move(lemma);
  return inst;
}

}  // namespace

TEST_CASE("forward_backward_combine on hand examples") {
  const auto left = normalize({{"a", 0.5}, {"b", 0.5}});
  const auto right = normalize({{"a", 0.25}, {"b", 0.75}});

  const auto flat = forward_backward_combine(left, right, UnigramPrior::Uniform(), 1.0);
  CHECK(flat.prob("a") == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(flat.prob("b") == doctest::Approx(0.75).epsilon(1e-12));

  const UnigramPrior prior({{"a", 0.2}, {"b", 0.8}}, 1e-9);
  const auto penalized = forward_backward_combine(left, right, prior, 1.0);
  CHECK(penalized.prob("a") == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
  CHECK(penalized.prob("b") == doctest::Approx(3.0 / 7.0).epsilon(1e-12));

  const auto unpenalized = forward_backward_combine(left, right, prior, 0.0);
  CHECK(unpenalized.prob("a") == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("forward_backward_combine keeps only the shared support") {
  const auto left = normalize({{"a", 1.0}, {"b", 1.0}});
  const auto right = normalize({{"b", 1.0}, {"c", 1.0}});
  const auto d = forward_backward_combine(left, right, UnigramPrior::Uniform(), 1.0);
  CHECK(d.size() == 1);
  CHECK(d.prob("b") == doctest::Approx(1.0));
  const auto disjoint = normalize({{"z", 1.0}});
  CHECK_THROWS_AS(forward_backward_combine(left, disjoint, UnigramPrior::Uniform(), 1.0),
                  LexsubError);
}

TEST_CASE("inject_target with uniform target and beta 0 is the identity") {
  const auto ctx = normalize({{"a", 0.1}, {"b", 0.6}, {"c", 0.3}});
  const auto uniform = normalize({{"a", 1.0}, {"b", 1.0}, {"c", 1.0}});
  const auto out = inject_target(ctx, uniform, UnigramPrior::FromCounts({{"a", 9.0}}), 0.0);
  for (const auto& [w, p] : ctx) CHECK(std::abs(out.prob(w) - p) < 1e-9);
}

TEST_CASE("target_similarity is invariant to scaling vectors and temperature together") {
  EmbeddingTable emb(2), scaled(2);
  const std::vector<std::pair<std::string, std::vector<float>>> rows = {
      {"t", {1.0f, 0.5f}}, {"a", {0.2f, 0.9f}}, {"b", {0.7f, -0.3f}}, {"c", {-0.4f, 0.1f}}};
  const float c = 4.0f;
  for (const auto& [w, v] : rows) {
    emb.add(w, v);
    // Only the target is scaled, so every inner product is scaled by c.
    scaled.add(w, w == "t" ? std::vector<float>{v[0] * c, v[1] * c} : v);
  }
  const std::vector<std::string> vocab = {"a", "b", "c"};
  const auto p = target_similarity("t", emb, 0.7, vocab);
  const auto q = target_similarity("t", scaled, 0.7 * c, vocab);
  for (const auto& w : vocab) CHECK(std::abs(p.prob(w) - q.prob(w)) < 1e-9);
}

TEST_CASE("target_similarity errors and missing vectors") {
  EmbeddingTable emb(1);
  emb.add("t", {1.0f});
  emb.add("a", {2.0f});
  emb.add("b", {-1.0f});
  CHECK_THROWS_AS(target_similarity("zzz", emb, 1.0, {"a"}), LexsubError);
  CHECK_THROWS_AS(target_similarity("t", emb, 0.0, {"a"}), LexsubError);
  const auto d = target_similarity("t", emb, 1.0, {"a", "b", "nov"});
  CHECK(d.prob("nov") == doctest::Approx(d.prob("b")));
}

TEST_CASE("apply_pattern inserts the target around the blank") {
  const auto inst = Sentence({"he", "ran", "home"}, 1, "run");
  const auto out = apply_pattern(inst, "T and then _");
  CHECK(out.tokens == std::vector<std::string>{"he", "ran", "and", "then", "_", "home"});
  CHECK(out.target_index == 4);
  CHECK(apply_pattern(inst, "_").tokens == inst.tokens);
  CHECK_THROWS_AS(ValidatePattern("T and then"), LexsubError);
  CHECK_THROWS_AS(ValidatePattern("_ _"), LexsubError);
  CHECK_NOTHROW(ValidatePattern("_ (or even T)"));
}

TEST_CASE("padding round trip") {
  const auto inst = Sentence({"a", "dog", "ran"}, 1, "dog");
  const auto padded = prepend_padding(inst, kDefaultPaddingText, 50);
  const auto pad = PaddingTokens(kDefaultPaddingText);
  REQUIRE(pad.back() == kEndOfDocument);
  CHECK(padded.tokens.size() == inst.tokens.size() + pad.size());
  CHECK(padded.target() == "dog");
  const auto back = strip_padding(padded, kDefaultPaddingText);
  CHECK(back.tokens == inst.tokens);
  CHECK(back.target_index == inst.target_index);
  CHECK(prepend_padding(inst, kDefaultPaddingText, 2).tokens == inst.tokens);
}

TEST_CASE("estimator config validation") {
  EstimatorConfig cfg;
  CHECK_NOTHROW(cfg.Validate());
  cfg.temperature = 0.0;
  CHECK_THROWS_AS(cfg.Validate(), LexsubError);
  cfg.temperature = 1.0;
  cfg.beta = -1.0;
  CHECK_THROWS_AS(cfg.Validate(), LexsubError);
  CHECK(ParseInjection("pat") == Injection::kPattern);
  CHECK(ParseInjection("pattern") == Injection::kPattern);
  CHECK_THROWS_AS(ParseInjection("bogus"), LexsubError);
}

TEST_CASE("ooc, nPIC and c2v scorers") {
  EmbeddingTable words(2), contexts(2);
  words.add("bright", {1.0f, 0.0f});
  words.add("shiny", {0.9f, 0.1f});
  words.add("smart", {0.1f, 0.9f});
  contexts.add("sun", {1.0f, 0.0f});
  contexts.add("student", {0.0f, 1.0f});

  auto inst = Sentence({"the", "bright", "sun"}, 1, "bright");
  const auto ooc = ooc_scores(inst, words);
  CHECK(ooc.prob("shiny") > ooc.prob("smart"));

  CHECK(npic_uses_window_fallback(inst));
  CHECK(npic_context_elements(inst) == std::vector<std::string>{"the", "sun"});
  const auto sunny = npic_scores(inst, words, contexts);
  auto student = Sentence({"a", "bright", "student"}, 1, "bright");
  student.dependents = std::vector<std::size_t>{2};
  CHECK_FALSE(npic_uses_window_fallback(student));
  const auto clever = npic_scores(student, words, contexts);
  CHECK(clever.prob("smart") > sunny.prob("smart"));

  const std::vector<float> ctx{0.0f, 1.0f};
  const auto c2v = c2v_rank(inst, ctx, words);
  CHECK(c2v.prob("smart") > c2v.prob("shiny"));
  const std::vector<float> wrong{1.0f};
  CHECK_THROWS_AS(c2v_rank(inst, wrong, words), LexsubError);
}

TEST_CASE("generate dispatches injections through the toy backend") {
  const auto toy = ToyTableEstimator::FromFile(LEXSUB_TEST_DATA "/toy_table.json");
  const auto inst = Sentence({"the", "dog", "ran", "home"}, 1, "dog");
  EstimatorConfig cfg;
  cfg.backend = BackendKind::kToyTable;

  cfg.injection = Injection::kBase;
  CHECK(generate(toy, inst, cfg).prob("canine") == doctest::Approx(0.5));
  cfg.injection = Injection::kNoTarget;
  CHECK(generate(toy, inst, cfg).prob("cat") == doctest::Approx(0.4));
  CHECK_FALSE(generate(toy, inst, cfg).contains("canine"));

  cfg.injection = Injection::kEmbs;
  cfg.beta = 0.0;
  const auto embs = generate(toy, inst, cfg);
  // The dog vector favours canine-like words over cat and car.
  CHECK(embs.prob("puppy") / embs.prob("cat") > 0.3 / 0.4);
  CHECK(embs.prob("car") < 0.1);

  cfg.backend = BackendKind::kMaskedLm;
  CHECK_THROWS_AS(generate(toy, inst, cfg), LexsubError);
}
