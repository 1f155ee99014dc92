#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <unistd.h>

#include <httplib.h>

#include "lexsub/backends.hpp"
#include "lexsub/service.hpp"
#include "lexsub/wordnet.hpp"

using namespace lexsub;
using namespace std::chrono_literals;

namespace {

const std::filesystem::path kData = LEXSUB_TEST_DATA;

std::unique_ptr<LexsubService> FixtureService() {
  auto cfg = LoadAppConfig(kData / "config.json");
  cfg.server.augment_output_dir =
      std::filesystem::temp_directory_path() / "lexsub-test-augment";
  return LexsubService::FromConfig(cfg);
}

// Numbers equal within tol, everything else exactly.
bool SameJson(const Json& a, const Json& b, double tol) {
  if (a.is_number() && b.is_number()) {
    return std::abs(a.get<double>() - b.get<double>()) <= tol;
  }
  if (a.type() != b.type()) return false;
  if (a.is_object()) {
    if (a.size() != b.size()) return false;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key()) || !SameJson(it.value(), b[it.key()], tol)) return false;
    }
    return true;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!SameJson(a[i], b[i], tol)) return false;
    }
    return true;
  }
  return a == b;
}

Json DogRequest() {
  return {{"sentence", "the dog ran home"},
          {"target_char_span", {4, 7}},
          {"models", {"toy+base", "toy+notgt"}},
          {"top_k", 3}};
}

// Blocks inside EstimateContext until released.
class Gate {
 public:
  void Enter() {
    std::unique_lock lock(mu_);
    ++inside_;
    cv_.notify_all();
    cv_.wait(lock, [&] { return open_; });
  }
  void WaitInside(int n) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return inside_ >= n; });
  }
  void Open() {
    std::lock_guard lock(mu_);
    open_ = true;
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int inside_ = 0;
  bool open_ = false;
};

class GatedEstimator final : public SubstituteEstimator {
 public:
  explicit GatedEstimator(Gate& gate) : gate_(gate) {}
  BackendKind kind() const override { return BackendKind::kToyTable; }
  const std::vector<std::string>& vocabulary() const override { return vocab_; }
  SubstituteDistribution EstimateContext(const LexSubInstance&,
                                         const EstimatorConfig&) const override {
    gate_.Enter();
    return normalize({{"canine", 1.0}});
  }

 private:
  Gate& gate_;
  std::vector<std::string> vocab_ = {"canine"};
};

std::map<std::string, LoadedDataset> PagedDataset(std::size_t n) {
  LoadedDataset ds;
  ds.spec.name = "many";
  for (std::size_t i = 0; i < n; ++i) {
    LexSubInstance inst;
    inst.id = "i" + std::to_string(i);
    inst.tokens = {"a", i % 2 ? "dog" : "cat"};
    inst.target_index = 1;
    inst.lemma = inst.tokens[1];
    ds.instances.push_back(inst);
  }
  return {{"many", ds}};
}

}  // namespace

TEST_CASE("analyze response matches the golden file") {
  auto service = FixtureService();
  const auto r = service->Analyze(DogRequest());
  REQUIRE(r.status == 200);
  std::ifstream in(kData / "analyze_golden.json");
  const Json golden = Json::parse(in);
  CHECK_MESSAGE(SameJson(r.body, golden, 1e-12), r.body.dump(2));
}

TEST_CASE("identical requests give byte-identical bodies") {
  auto service = FixtureService();
  const auto first = service->Analyze(DogRequest()).Dump();
  for (int i = 0; i < 5; ++i) CHECK(service->Analyze(DogRequest()).Dump() == first);
}

TEST_CASE("dataset instances carry gold diagnostics") {
  auto service = FixtureService();
  const auto r = service->Analyze(
      {{"dataset", "toy"}, {"instance_id", "d1"}, {"models", {"toy+base"}}, {"top_k", 2}});
  REQUIRE(r.status == 200);
  CHECK(r.body["gold"].size() == 3);
  CHECK(r.body["gold"][0]["word"] == "canine");
  const auto& m = r.body["models"][0];
  CHECK(m["true_positives"] == 2);
  CHECK(m["gold_ranks"]["canine"] == 1);
  CHECK(m["gold_ranks"]["pooch"].is_null());
}

TEST_CASE("analyze validation errors") {
  auto service = FixtureService();
  auto req = DogRequest();
  req["target_char_span"] = {4, 6};
  CHECK(service->Analyze(req).status == 400);
  req = DogRequest();
  req["target_char_span"] = {90, 93};
  CHECK(service->Analyze(req).status == 400);
  for (int k : {0, 51}) {
    req = DogRequest();
    req["top_k"] = k;
    CHECK(service->Analyze(req).status == 400);
  }
  req = DogRequest();
  req["top_k"] = 50;
  CHECK(service->Analyze(req).status == 200);
  req = DogRequest();
  req["models"] = {"nope"};
  CHECK(service->Analyze(req).status == 404);
  req["models"] = {"bigram+base"};
  CHECK(service->Analyze(req).status == 400);
  req["models"] = {"remote-bert"};
  const auto unavailable = service->Analyze(req);
  CHECK(unavailable.status == 503);
  CHECK(unavailable.body["error"]["code"] == "BackendUnavailable");
  CHECK(service->Analyze({{"dataset", "nope"}, {"instance_id", "x"}}).status == 404);
  CHECK(service->Analyze({{"dataset", "toy"}, {"instance_id", "x"}}).status == 404);
  CHECK(service->Analyze(Json::array()).status == 400);
}

TEST_CASE("models endpoint") {
  auto service = FixtureService();
  const auto all = service->Models(std::nullopt);
  REQUIRE(all.status == 200);
  CHECK(all.body["models"].size() == 3);
  CHECK(service->Models(std::string("bogus")).status == 400);
  const auto base = service->Models(std::string("base"));
  for (const auto& m : base.body["models"]) CHECK(m["name"] != "bigram");

  ModelRegistry two;
  two.Register("a", std::make_shared<ToyTableEstimator>(
                        ToyTableEstimator::FromFile(kData / "toy_table.json")));
  two.Register("b", std::make_shared<ToyTableEstimator>(
                        ToyTableEstimator::FromFile(kData / "toy_table.json")));
  LexsubService svc2(AppConfig{}, std::move(two), {}, nullptr);
  CHECK(svc2.Models(std::nullopt).body["models"].size() == 2);
  LexsubService empty(AppConfig{}, ModelRegistry{}, {}, nullptr);
  const auto none = empty.Models(std::nullopt);
  CHECK(none.status == 200);
  CHECK(none.body["models"].is_array());
  CHECK(none.body["models"].empty());
}

TEST_CASE("instances endpoint pages") {
  LexsubService svc(AppConfig{}, ModelRegistry{}, PagedDataset(25), nullptr);
  const auto p1 = svc.Instances({{"dataset", "many"}, {"page_size", "10"}});
  REQUIRE(p1.status == 200);
  CHECK(p1.body["total"] == 25);
  CHECK(p1.body["pages"] == 3);
  CHECK(p1.body["instances"].size() == 10);
  const auto p3 = svc.Instances({{"dataset", "many"}, {"page_size", "10"}, {"page", "3"}});
  CHECK(p3.body["instances"].size() == 5);
  const auto dogs = svc.Instances({{"dataset", "many"}, {"lemma", "dog"}});
  CHECK(dogs.body["total"] == 12);
  CHECK(svc.Instances({{"dataset", "nope"}}).status == 404);
  CHECK(svc.Instances({}).status == 400);
  CHECK(svc.Instances({{"dataset", "many"}, {"page_size", "0"}}).status == 400);
  CHECK(svc.Instances({{"dataset", "many"}, {"page", "x"}}).status == 400);
}

TEST_CASE("work queue refuses work beyond capacity") {
  WorkQueue q(1, 1);
  Gate gate;
  auto running = q.Submit([&] { gate.Enter(); return 1; });
  REQUIRE(running.has_value());
  gate.WaitInside(1);
  auto queued = q.Submit([] { return 2; });
  REQUIRE(queued.has_value());
  CHECK_FALSE(q.Submit([] { return 3; }).has_value());
  gate.Open();
  CHECK(running->get() == 1);
  CHECK(queued->get() == 2);
}

TEST_CASE("slow backends time out and full queues refuse") {
  Gate gate;
  ModelRegistry reg;
  reg.Register("slow", std::make_shared<GatedEstimator>(gate));
  AppConfig cfg;
  cfg.server.workers = 1;
  cfg.server.queue_capacity = 1;
  cfg.server.timeout_seconds = 1;
  LexsubService svc(cfg, std::move(reg), {}, nullptr);
  Json req = {{"sentence", "the dog ran"}, {"target_char_span", {4, 7}}, {"models", {"slow+base"}}};

  ApiResponse first;
  std::thread t1([&] { first = svc.Analyze(req); });
  gate.WaitInside(1);
  ApiResponse second;
  std::thread t2([&] { second = svc.Analyze(req); });
  std::this_thread::sleep_for(200ms);
  const auto third = svc.Analyze(req);
  CHECK(third.status == 503);
  t1.join();
  t2.join();
  CHECK(first.status == 503);
  CHECK(first.body["error"]["message"].get<std::string>().find("timed out") != std::string::npos);
  CHECK(second.status == 503);
  gate.Open();
}

TEST_CASE("augment jobs run asynchronously") {
  auto service = FixtureService();
  const auto submitted = service->SubmitAugment(
      {{"dataset", "snips-sample"}, {"backend", "toy"}, {"multiplier", 2}, {"seed", 3}});
  REQUIRE(submitted.status == 202);
  const auto id = submitted.body["id"].get<std::string>();
  ApiResponse status;
  for (int i = 0; i < 100; ++i) {
    status = service->AugmentStatus(id);
    if (status.body["status"] != "running") break;
    std::this_thread::sleep_for(20ms);
  }
  REQUIRE(status.status == 200);
  CHECK(status.body["status"] == "done");
  CHECK(std::filesystem::exists(status.body["output"].get<std::string>()));
  CHECK(service->AugmentStatus("job-999").status == 404);
  CHECK(service->SubmitAugment({{"dataset", "toy"}, {"backend", "toy"}}).status == 400);
  CHECK(service->SubmitAugment({{"dataset", "snips-sample"}, {"backend", "nope"}}).status == 404);
}

TEST_CASE("HTTP routes") {
  auto cfg = LoadAppConfig(kData / "config.json");
  cfg.server.port = 18000 + static_cast<int>(::getpid() % 2000);
  cfg.server.augment_output_dir = std::filesystem::temp_directory_path() / "lexsub-test-augment";
  static auto service = LexsubService::FromConfig(cfg);
  std::thread([] { Serve(*service); }).detach();

  httplib::Client client(cfg.server.host, cfg.server.port);
  httplib::Result models;
  for (int i = 0; i < 100 && !models; ++i) {
    models = client.Get("/api/models");
    if (!models) std::this_thread::sleep_for(20ms);
  }
  REQUIRE(models);
  CHECK(models->status == 200);
  CHECK(Json::parse(models->body)["models"].size() == 3);

  const auto analyze = client.Post("/api/analyze", DogRequest().dump(), "application/json");
  REQUIRE(analyze);
  CHECK(analyze->status == 200);
  CHECK(analyze->body == service->Analyze(DogRequest()).Dump());

  const auto bad = client.Post("/api/analyze", "{not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  const auto page = client.Get("/api/instances?dataset=toy&page_size=2");
  REQUIRE(page);
  CHECK(Json::parse(page->body)["pages"] == 2);
  const auto job = client.Get("/api/augment/job-12345");
  REQUIRE(job);
  CHECK(job->status == 404);
}
