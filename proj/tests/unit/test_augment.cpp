#include <doctest.h>

#include <cmath>
#include <map>

#include "lexsub/augment.hpp"
#include "lexsub/classifier.hpp"
#include "synthetic_snips.hpp"

using namespace lexsub;

namespace {

Model CityModel() {
  return Model{"cities",
               [](const LexSubInstance&) {
                 return normalize({{"rome", 2}, {"oslo", 1}, {"new york", 5}, {"x2", 5}});
               },
               true};
}

SlotUtterance Weather() {
  SlotUtterance u;
  u.id = "w1";
  u.intent = "GetWeather";
  u.tokens = {"weather", "in", "paris", "tonight"};
  u.slots = {{2, 3, "city"}, {3, 4, "timerange"}};
  return u;
}

}  // namespace

TEST_CASE("sampling follows the distribution") {
  const auto dist = normalize({{"a", 0.6}, {"b", 0.4}});
  DerivedRng rng(7);
  int a = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) a += SampleSubstitute(dist, rng) == "a";
  CHECK(std::abs(a / double(n) - 0.6) < 0.02);
}

TEST_CASE("derived streams are reproducible and distinct") {
  DerivedRng x(1, 2, 3), y(1, 2, 3), z(1, 2, 4);
  const double a = x.Uniform();
  CHECK(a == y.Uniform());
  CHECK(a != z.Uniform());
  CHECK(a >= 0.0);
  CHECK(a < 1.0);
  DerivedRng b(5);
  for (int i = 0; i < 1000; ++i) CHECK(b.Below(3) < 3u);
}

TEST_CASE("augment_one swaps one slot token and keeps spans") {
  const auto src = Weather();
  const auto out = augment_one(src, CityModel(), {}, 11);
  CHECK(out.tokens.size() == src.tokens.size());
  CHECK(out.slots == src.slots);
  CHECK(out.intent == src.intent);
  REQUIRE(out.provenance.has_value());
  const auto& p = *out.provenance;
  CHECK(p.source_id == "w1");
  CHECK((p.replaced_index == 2 || p.replaced_index == 3));
  CHECK(p.original == src.tokens[p.replaced_index]);
  CHECK(out.tokens[p.replaced_index] == p.substitute);
  CHECK((p.substitute == "rome" || p.substitute == "oslo"));
  for (std::size_t i = 0; i < src.tokens.size(); ++i) {
    if (i != p.replaced_index) CHECK(out.tokens[i] == src.tokens[i]);
  }
  CHECK(augment_one(src, CityModel(), {}, 11).tokens == out.tokens);
}

TEST_CASE("augment_one errors") {
  SlotUtterance plain = Weather();
  plain.slots.clear();
  try {
    augment_one(plain, CityModel(), {}, 1);
    FAIL("expected failure");
  } catch (const LexsubError& e) {
    CHECK(e.code() == ErrorCode::kNoSlotTokens);
  }
  const Model only_junk{"junk", [](const LexSubInstance&) { return normalize({{"x2", 1}}); }, true};
  try {
    augment_one(Weather(), only_junk, {}, 1);
    FAIL("expected failure");
  } catch (const LexsubError& e) {
    CHECK(e.code() == ErrorCode::kEmptyDistribution);
  }
  SlotUtterance broken = Weather();
  broken.slots = {{1, 3, "a"}, {2, 4, "b"}};
  CHECK_THROWS_AS(Validate(broken), LexsubError);
}

TEST_CASE("augment_dataset appends copies and counts skips") {
  SlotUtterance plain = Weather();
  plain.id = "w2";
  plain.slots.clear();
  const auto result = augment_dataset({Weather(), plain}, CityModel(), 3, 42);
  CHECK(result.generated == 3);
  CHECK(result.skipped == 3);
  REQUIRE(result.dataset.size() == 5);
  CHECK(result.dataset[0].id == "w1");
  CHECK(result.dataset[2].id == "w1-aug0");
  const auto serial =
      augment_dataset({Weather(), plain}, CityModel(), 3, 42, {}, Execution::kSerial);
  for (std::size_t i = 0; i < serial.dataset.size(); ++i) {
    CHECK(serial.dataset[i].tokens == result.dataset[i].tokens);
  }
}

TEST_CASE("multiplier counts") {
  const auto data = testing_support::SyntheticSnips(4, 2);
  REQUIRE(data.size() == 14);
  const std::vector<SlotUtterance> ten(data.begin(), data.begin() + 10);
  CHECK(augment_dataset(ten, CityModel(), 0, 1).dataset.size() == 10);
  CHECK(augment_dataset(ten, CityModel(), 2, 1).dataset.size() == 30);
}

TEST_CASE("stratified subsample keeps round(f * n) per intent") {
  const auto data = testing_support::SyntheticSnips(3, 0);
  const auto sub = subsample_train(data, 0.1, 9);
  std::map<std::string, std::size_t> counts;
  for (const auto& u : sub) ++counts[u.intent];
  for (const auto& [intent, n] : testing_support::SnipsTrainCounts()) {
    CHECK(counts[intent] == static_cast<std::size_t>(std::llround(0.1 * double(n))));
  }
  CHECK(subsample_train(data, 1.0, 9).size() == data.size());
  CHECK(subsample_train(data, 0.1, 9).front().id == sub.front().id);
  CHECK_THROWS_AS(subsample_train(data, 0.0, 9), LexsubError);
}

TEST_CASE("SNIPS json round trip") {
  const auto data = ReadSnips(LEXSUB_TEST_DATA "/snips_sample.json");
  REQUIRE(data.size() == 3);
  const SlotUtterance* jazz = nullptr;
  for (const auto& u : data) {
    if (u.intent == "PlayMusic" && !u.slots.empty()) jazz = &u;
  }
  REQUIRE(jazz != nullptr);
  CHECK(jazz->tokens == std::vector<std::string>{"play", "some", "jazz", "by", "miles", "davis"});
  REQUIRE(jazz->slots.size() == 2);
  CHECK(jazz->slots[1] == SlotSpan{4, 6, "artist"});

  const auto aug = augment_one(*jazz, CityModel(), {}, 5);
  const auto back = ReadSnipsJson(SnipsToJson({aug}));
  REQUIRE(back.size() == 1);
  CHECK(back[0].tokens == aug.tokens);
  CHECK(back[0].slots == aug.slots);
  REQUIRE(back[0].provenance.has_value());
  CHECK(back[0].provenance->substitute == aug.provenance->substitute);
}

TEST_CASE("bag-of-words classifier") {
  const auto train = testing_support::SyntheticSnips(1, 40);
  const auto test = testing_support::SyntheticSnips(2, 20);
  BagOfWordsClassifier clf;
  clf.Train(train);
  CHECK(clf.Accuracy(test) > 0.8);
  CHECK(clf.Predict({"what", "is", "the", "weather"}) == "GetWeather");
}
