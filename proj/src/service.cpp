#include "lexsub/service.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>

#include <httplib.h>

namespace lexsub {

WorkQueue::WorkQueue(std::size_t workers, std::size_t capacity)
    : capacity_(capacity) {
  if (workers == 0 || capacity == 0) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      "work queue needs at least one worker and one slot");
  }
  for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { Loop(); });
}

WorkQueue::~WorkQueue() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& t : threads_) t.join();
}

bool WorkQueue::Push(std::function<void()> job) {
  {
    std::lock_guard lock(mu_);
    if (stopping_ || jobs_.size() >= capacity_) return false;
    jobs_.push_back(std::move(job));
  }
  cv_.notify_one();
  return true;
}

void WorkQueue::Loop() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
      if (jobs_.empty()) return;
      job = std::move(jobs_.front());
      jobs_.pop_front();
    }
    job();
  }
}

std::vector<TokenSpan> TokenizeWithOffsets(std::string_view sentence) {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    const std::size_t start = i;
    while (i < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    if (i > start) out.push_back({std::string(sentence.substr(start, i - start)), start, i});
  }
  return out;
}

ApiResponse ErrorResponse(int status, ErrorCode code, const std::string& message) {
  return {status,
          {{"schema_version", kApiSchemaVersion},
           {"error", {{"code", std::string(ErrorCodeName(code))}, {"message", message}}}}};
}

namespace {

// Request-level failure that maps straight onto an HTTP status.
struct ApiError {
  int status;
  ErrorCode code;
  std::string message;
};

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kBackendUnavailable: return 503;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
    case ErrorCode::kUnknownPos:
    case ErrorCode::kMalformedPattern:
    case ErrorCode::kTargetOutOfRange:
      return 400;
    default:
      return 422;
  }
}

struct ModelRequest {
  const ModelRegistry::Entry* entry;
  Injection injection;
};

struct AnalyzeJob {
  LexSubInstance instance;
  std::vector<Model> models;
  std::vector<ModelRequest> requests;
  PostprocVariant postproc;
  std::size_t top_k;
};

Json GoldJson(const GoldWeights& gold) {
  std::vector<std::pair<std::string, int>> sorted(gold.begin(), gold.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Json out = Json::array();
  for (const auto& [w, c] : sorted) out.push_back({{"word", w}, {"weight", c}});
  return out;
}

std::size_t ParseSize(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j[key];
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ApiError{400, ErrorCode::kInvalidArgument,
                   std::string(key) + " must be a non-negative integer"};
  }
  return v.get<std::size_t>();
}

}  // namespace

LexsubService::LexsubService(AppConfig config, ModelRegistry registry,
                             std::map<std::string, LoadedDataset> datasets,
                             std::shared_ptr<const SynsetGraph> graph)
    : config_(std::move(config)),
      registry_(std::move(registry)),
      datasets_(std::move(datasets)),
      graph_(std::move(graph)),
      queue_(std::make_unique<WorkQueue>(config_.server.workers,
                                         config_.server.queue_capacity)) {}

LexsubService::~LexsubService() {
  queue_.reset();
  std::vector<std::shared_ptr<Job>> pending;
  {
    std::lock_guard lock(jobs_mu_);
    for (auto& [id, job] : jobs_) pending.push_back(job);
  }
  // Jobs take jobs_mu_ when they finish, so wait without holding it.
  for (auto& job : pending) {
    if (job->done.valid()) job->done.wait();
  }
}

std::unique_ptr<LexsubService> LexsubService::FromConfig(const AppConfig& config) {
  std::map<std::string, LoadedDataset> datasets;
  for (const auto& spec : config.datasets) datasets.emplace(spec.name, LoadDataset(spec));
  std::shared_ptr<const SynsetGraph> graph;
  if (!config.wordnet.empty()) {
    graph = std::make_shared<const SynsetGraph>(SynsetGraph::FromWordNetDir(config.wordnet));
  }
  return std::make_unique<LexsubService>(config, LoadRegistry(config),
                                         std::move(datasets), std::move(graph));
}

ApiResponse LexsubService::Analyze(const Json& request) {
  AnalyzeJob job;
  try {
    if (!request.is_object()) {
      throw ApiError{400, ErrorCode::kInvalidArgument, "request must be an object"};
    }
    job.top_k = ParseSize(request, "top_k", config_.defaults.top_k);
    if (job.top_k < 1 || job.top_k > kMaxTopK) {
      throw ApiError{400, ErrorCode::kInvalidArgument,
                     "top_k must be in [1, " + std::to_string(kMaxTopK) + "]"};
    }
    job.postproc = PostprocVariant::Named(
        request.value("postproc", config_.defaults.postproc));

    if (request.contains("dataset") || request.contains("instance_id")) {
      const auto name = request.at("dataset").get<std::string>();
      const auto id = request.at("instance_id").get<std::string>();
      auto it = datasets_.find(name);
      if (it == datasets_.end()) {
        throw ApiError{404, ErrorCode::kNotFound, "unknown dataset '" + name + "'"};
      }
      const auto& instances = it->second.instances;
      auto inst = std::find_if(instances.begin(), instances.end(),
                               [&](const LexSubInstance& x) { return x.id == id; });
      if (inst == instances.end()) {
        throw ApiError{404, ErrorCode::kNotFound, "unknown instance '" + id + "'"};
      }
      job.instance = *inst;
    } else {
      const auto sentence = request.at("sentence").get<std::string>();
      const auto& span = request.at("target_char_span");
      if (!span.is_array() || span.size() != 2 || !span[0].is_number_integer() ||
          !span[1].is_number_integer()) {
        throw ApiError{400, ErrorCode::kInvalidArgument,
                       "target_char_span must be [start, end]"};
      }
      const auto start = span[0].get<long long>();
      const auto end = span[1].get<long long>();
      const auto tokens = TokenizeWithOffsets(sentence);
      auto hit = std::find_if(tokens.begin(), tokens.end(), [&](const TokenSpan& t) {
        return static_cast<long long>(t.start) == start &&
               static_cast<long long>(t.end) == end;
      });
      if (hit == tokens.end()) {
        throw ApiError{400, ErrorCode::kInvalidArgument,
                       "target_char_span does not cover exactly one token"};
      }
      for (const auto& t : tokens) job.instance.tokens.push_back(t.text);
      job.instance.target_index = static_cast<std::size_t>(hit - tokens.begin());
      job.instance.id = "input";
      job.instance.pos = ParsePos(request.value("pos", std::string("noun")));
      job.instance.lemma =
          request.contains("lemma")
              ? ToLower(request["lemma"].get<std::string>())
              : DefaultLemmatizer()->Lemmatize(ToLower(hit->text), job.instance.pos);
    }

    for (const auto& m : request.value("models", Json::array())) {
      std::string name;
      std::optional<Injection> requested;
      if (m.is_string()) {
        name = m.get<std::string>();
        if (auto plus = name.find('+'); plus != std::string::npos) {
          requested = ParseInjection(name.substr(plus + 1));
          name.resize(plus);
        }
      } else {
        name = m.at("backend").get<std::string>();
        if (m.contains("injection")) requested = ParseInjection(m["injection"].get<std::string>());
      }
      const Injection injection = registry_.ResolveInjection(name, requested, config_.defaults);
      const auto* entry = registry_.Find(name);
      if (entry == nullptr) {
        throw ApiError{404, ErrorCode::kNotFound, "unknown model '" + name + "'"};
      }
      if (!entry->estimator) {
        throw ApiError{503, ErrorCode::kBackendUnavailable, name + ": " + entry->error};
      }
      const auto supported = entry->estimator->supported_injections();
      if (std::find(supported.begin(), supported.end(), injection) == supported.end()) {
        throw ApiError{400, ErrorCode::kInvalidArgument,
                       name + " does not support injection '" +
                           std::string(InjectionName(injection)) + "'"};
      }
      job.requests.push_back({entry, injection});
      job.models.push_back(registry_.MakeModel(name, injection, config_.defaults));
    }
  } catch (const ApiError& e) {
    return ErrorResponse(e.status, e.code, e.message);
  } catch (const LexsubError& e) {
    return ErrorResponse(StatusFor(e.code()), e.code(), e.what());
  } catch (const Json::exception& e) {
    return ErrorResponse(400, ErrorCode::kParseError, e.what());
  }

  auto graph = graph_;
  auto work = [job = std::move(job), graph]() -> ApiResponse {
    const auto& inst = job.instance;
    Json models = Json::array();
    for (std::size_t i = 0; i < job.models.size(); ++i) {
      const auto& model = job.models[i];
      std::vector<WordProb> ranked;
      try {
        const auto dist = postprocess(model.generate(inst), inst, job.postproc);
        ranked = rank(dist, dist.size());
      } catch (const LexsubError& e) {
        if (e.code() != ErrorCode::kEmptyAfterFiltering &&
            e.code() != ErrorCode::kEmptyDistribution) {
          return ErrorResponse(StatusFor(e.code()), e.code(), model.name + ": " + e.what());
        }
      }
      Json subs = Json::array();
      std::size_t tp = 0;
      for (std::size_t r = 0; r < std::min(job.top_k, ranked.size()); ++r) {
        const auto& [word, prob] = ranked[r];
        Json s{{"word", word}, {"prob", prob}};
        s["relation"] = graph ? Json(std::string(RelationName(
                                    classify(inst.lemma, word, inst.pos, *graph))))
                              : Json(nullptr);
        if (inst.gold && inst.gold->count(word) != 0) ++tp;
        subs.push_back(std::move(s));
      }
      Json row{{"name", model.name},
               {"backend", job.requests[i].entry->name},
               {"injection", std::string(InjectionName(job.requests[i].injection))},
               {"substitutes", std::move(subs)}};
      if (inst.gold) {
        row["true_positives"] = tp;
        Json ranks = Json::object();
        for (const auto& [word, weight] : *inst.gold) ranks[word] = nullptr;
        for (std::size_t r = 0; r < ranked.size(); ++r) {
          auto it = ranks.find(ranked[r].first);
          if (it != ranks.end() && it->is_null()) *it = r + 1;
        }
        row["gold_ranks"] = std::move(ranks);
      }
      models.push_back(std::move(row));
    }
    Json body{{"schema_version", kApiSchemaVersion},
              {"instance_id", inst.id},
              {"tokens", inst.tokens},
              {"target_index", inst.target_index},
              {"target", inst.target()},
              {"lemma", inst.lemma},
              {"pos", std::string(1, PosLetter(inst.pos))},
              {"top_k", job.top_k},
              {"postproc", job.postproc.name},
              {"gold", inst.gold ? GoldJson(*inst.gold) : Json(nullptr)},
              {"models", std::move(models)}};
    return {200, std::move(body)};
  };

  auto future = queue_->Submit(std::move(work));
  if (!future) {
    return ErrorResponse(503, ErrorCode::kBackendUnavailable, "work queue is full");
  }
  if (future->wait_for(std::chrono::seconds(config_.server.timeout_seconds)) !=
      std::future_status::ready) {
    return ErrorResponse(503, ErrorCode::kBackendUnavailable, "request timed out");
  }
  try {
    return future->get();
  } catch (const LexsubError& e) {
    return ErrorResponse(StatusFor(e.code()), e.code(), e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, ErrorCode::kInvalidArgument, e.what());
  }
}

ApiResponse LexsubService::Models(const std::optional<std::string>& injection) const {
  std::optional<Injection> filter;
  if (injection) {
    try {
      filter = ParseInjection(*injection);
    } catch (const LexsubError& e) {
      return ErrorResponse(400, e.code(), e.what());
    }
  }
  Json models = Json::array();
  for (const auto* entry : registry_.entries()) {
    Json injections = Json::array();
    bool matches = !filter;
    if (entry->estimator) {
      for (auto inj : entry->estimator->supported_injections()) {
        injections.push_back(std::string(InjectionName(inj)));
        if (filter && inj == *filter) matches = true;
      }
    }
    if (!matches) continue;
    Json row{{"name", entry->name},
             {"kind", std::string(BackendKindName(entry->kind))},
             {"available", entry->estimator != nullptr},
             {"injections", std::move(injections)}};
    if (entry->estimator) {
      row["default_injection"] =
          std::string(InjectionName(entry->estimator->default_injection()));
      row["reentrant"] = entry->estimator->reentrant();
    } else {
      row["error"] = entry->error;
    }
    models.push_back(std::move(row));
  }
  return {200, {{"schema_version", kApiSchemaVersion}, {"models", std::move(models)}}};
}

ApiResponse LexsubService::Instances(
    const std::map<std::string, std::string>& params) const {
  auto param = [&](const char* key) -> std::optional<std::string> {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
  };
  auto number = [&](const char* key, std::size_t fallback, std::size_t lo,
                    std::size_t hi) -> std::size_t {
    const auto v = param(key);
    if (!v) return fallback;
    std::size_t n = 0;
    if (v->empty() || !std::all_of(v->begin(), v->end(), ::isdigit) || v->size() > 9 ||
        (n = std::stoul(*v)) < lo || n > hi) {
      throw ApiError{400, ErrorCode::kInvalidArgument,
                     std::string(key) + " must be an integer in [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]"};
    }
    return n;
  };
  try {
    const auto name = param("dataset");
    if (!name) throw ApiError{400, ErrorCode::kInvalidArgument, "dataset is required"};
    auto it = datasets_.find(*name);
    if (it == datasets_.end()) {
      throw ApiError{404, ErrorCode::kNotFound, "unknown dataset '" + *name + "'"};
    }
    const auto& ds = it->second;
    if (!ds.error.empty()) {
      throw ApiError{503, ErrorCode::kIo, *name + ": " + ds.error};
    }
    if (ds.spec.format == DatasetFormat::kSnips) {
      throw ApiError{400, ErrorCode::kInvalidArgument,
                     *name + " is not a lexical substitution dataset"};
    }
    const std::size_t page = number("page", 1, 1, 1000000);
    const std::size_t page_size = number("page_size", 10, 1, 100);
    const auto lemma = param("lemma");
    std::vector<const LexSubInstance*> matched;
    for (const auto& inst : ds.instances) {
      if (!lemma || inst.lemma == *lemma) matched.push_back(&inst);
    }
    Json rows = Json::array();
    const std::size_t first = (page - 1) * page_size;
    for (std::size_t i = first; i < std::min(matched.size(), first + page_size); ++i) {
      rows.push_back(ToJson(*matched[i]));
    }
    Json body{{"schema_version", kApiSchemaVersion},
              {"dataset", *name},
              {"lemma", lemma ? Json(*lemma) : Json(nullptr)},
              {"total", matched.size()},
              {"page", page},
              {"page_size", page_size},
              {"pages", (matched.size() + page_size - 1) / page_size},
              {"instances", std::move(rows)}};
    return {200, std::move(body)};
  } catch (const ApiError& e) {
    return ErrorResponse(e.status, e.code, e.message);
  }
}

ApiResponse LexsubService::SubmitAugment(const Json& request) {
  std::vector<SlotUtterance> data;
  Model model;
  std::size_t multiplier = 1;
  std::uint64_t seed = 0;
  try {
    const auto name = request.at("dataset").get<std::string>();
    auto it = datasets_.find(name);
    if (it == datasets_.end()) {
      throw ApiError{404, ErrorCode::kNotFound, "unknown dataset '" + name + "'"};
    }
    if (it->second.spec.format != DatasetFormat::kSnips) {
      throw ApiError{400, ErrorCode::kInvalidArgument, name + " is not a SNIPS dataset"};
    }
    if (!it->second.error.empty()) {
      throw ApiError{503, ErrorCode::kIo, name + ": " + it->second.error};
    }
    multiplier = ParseSize(request, "multiplier", 1);
    seed = ParseSize(request, "seed", 0);
    data = it->second.utterances;
    if (request.contains("fraction")) {
      data = subsample_train(data, request["fraction"].get<double>(), seed);
    }
    const auto backend = request.at("backend").get<std::string>();
    const Injection injection = registry_.ResolveInjection(
        backend, request.contains("injection")
                     ? std::optional(ParseInjection(request["injection"].get<std::string>()))
                     : std::nullopt,
        config_.defaults);
    model = registry_.MakeModel(backend, injection, config_.defaults);
  } catch (const ApiError& e) {
    return ErrorResponse(e.status, e.code, e.message);
  } catch (const LexsubError& e) {
    return ErrorResponse(StatusFor(e.code()), e.code(), e.what());
  } catch (const Json::exception& e) {
    return ErrorResponse(400, ErrorCode::kParseError, e.what());
  }

  auto job = std::make_shared<Job>();
  std::string id;
  {
    std::lock_guard lock(jobs_mu_);
    id = "job-" + std::to_string(next_job_++);
    jobs_[id] = job;
  }
  const auto out_path = config_.server.augment_output_dir / (id + ".json");
  job->done = std::async(std::launch::async, [job, data = std::move(data),
                                              model = std::move(model), multiplier,
                                              seed, out_path, this] {
    Json result;
    std::string status;
    try {
      const auto r = augment_dataset(data, model, multiplier, seed);
      WriteTextFile(out_path, SnipsToJson(r.dataset).dump(2));
      result = {{"output", out_path.string()},
                {"generated", r.generated},
                {"skipped", r.skipped}};
      status = "done";
    } catch (const std::exception& e) {
      result = {{"error", e.what()}};
      status = "failed";
    }
    std::lock_guard lock(jobs_mu_);
    job->result = std::move(result);
    job->status = status;
  });
  return {202, {{"schema_version", kApiSchemaVersion}, {"id", id}, {"status", "running"}}};
}

ApiResponse LexsubService::AugmentStatus(const std::string& id) {
  std::lock_guard lock(jobs_mu_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) {
    return ErrorResponse(404, ErrorCode::kNotFound, "unknown job '" + id + "'");
  }
  Json body = it->second->result.is_null() ? Json::object() : it->second->result;
  body["schema_version"] = kApiSchemaVersion;
  body["id"] = id;
  body["status"] = it->second->status;
  return {200, std::move(body)};
}

namespace {

void Reply(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_content(api.Dump(), "application/json");
}

Json ParseBody(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::exception&) {
    return Json();  // null -> rejected as malformed by the handlers
  }
}

}  // namespace

void Serve(LexsubService& service) {
  const auto& settings = service.config().server;
  httplib::Server server;
  server.new_task_queue = [n = settings.workers] {
    return new httplib::ThreadPool(std::max<std::size_t>(n, 2));
  };
  server.Get("/api/models", [&](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> filter;
    if (req.has_param("injection")) filter = req.get_param_value("injection");
    Reply(res, service.Models(filter));
  });
  server.Get("/api/instances", [&](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> params;
    for (const auto& [k, v] : req.params) params[k] = v;
    Reply(res, service.Instances(params));
  });
  server.Post("/api/analyze", [&](const httplib::Request& req, httplib::Response& res) {
    Reply(res, service.Analyze(ParseBody(req)));
  });
  server.Post("/api/augment", [&](const httplib::Request& req, httplib::Response& res) {
    Reply(res, service.SubmitAugment(ParseBody(req)));
  });
  server.Get(R"(/api/augment/([A-Za-z0-9-]+))",
             [&](const httplib::Request& req, httplib::Response& res) {
               Reply(res, service.AugmentStatus(req.matches[1]));
             });
  if (!settings.static_dir.empty()) {
    server.set_mount_point("/", settings.static_dir.string());
  }
  std::cerr << "listening on " << settings.host << ":" << settings.port << "\n";
  if (!server.listen(settings.host, settings.port)) {
    throw LexsubError(ErrorCode::kIo, "cannot bind " + settings.host + ":" +
                                          std::to_string(settings.port));
  }
}

}  // namespace lexsub
