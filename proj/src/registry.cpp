#include "lexsub/registry.hpp"

#include <algorithm>

#include <cctype>
#include <cstdlib>

#include "lexsub/backends.hpp"
#include "lexsub/datasets.hpp"

namespace lexsub {

namespace {

constexpr const char* kBackendPathKeys[] = {"path", "corpus", "vocab", "embeddings",
                                            "counts", "context_embeddings"};

std::optional<std::string> Env(const std::string& key) {
  const char* v = std::getenv(key.c_str());
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

DatasetFormat ParseDatasetFormat(std::string_view text) {
  if (text == "jsonl") return DatasetFormat::kJsonl;
  if (text == "semeval") return DatasetFormat::kSemeval;
  if (text == "coinco") return DatasetFormat::kCoinco;
  if (text == "snips") return DatasetFormat::kSnips;
  throw LexsubError(ErrorCode::kInvalidArgument,
                    "unknown dataset format '" + std::string(text) + "'");
}

template <typename T>
T Get(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? j[key].get<T>() : fallback;
}

}  // namespace

std::string EnvKey(std::string_view name) {
  std::string out;
  for (char c : name) {
    out += std::isalnum(static_cast<unsigned char>(c))
               ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
               : '_';
  }
  return out;
}

AppConfig ParseAppConfig(const Json& j, const std::filesystem::path& base_dir) {
  AppConfig config;
  try {
    for (const auto& b : j.value("backends", Json::array())) {
      BackendSpec spec;
      spec.name = b.at("name").get<std::string>();
      spec.kind = ParseBackendKind(b.at("kind").get<std::string>());
      spec.options = b;
      for (const char* key : kBackendPathKeys) {
        const auto env = Env("LEXSUB_BACKEND_" + EnvKey(spec.name) + "_" + EnvKey(key));
        if (env) {
          spec.options[key] = *env;
        } else if (b.contains(key)) {
          spec.options[key] = Resolve(base_dir, b[key].get<std::string>()).string();
        }
      }
      config.backends.push_back(std::move(spec));
    }
    for (const auto& d : j.value("datasets", Json::array())) {
      DatasetSpec spec;
      spec.name = d.at("name").get<std::string>();
      spec.format = ParseDatasetFormat(Get<std::string>(d, "format", "jsonl"));
      const std::string env = "LEXSUB_DATASET_" + EnvKey(spec.name);
      spec.path = Env(env).value_or(
          Resolve(base_dir, d.at("path").get<std::string>()).string());
      if (auto xml = Env(env + "_XML")) {
        spec.xml = *xml;
      } else if (d.contains("xml")) {
        spec.xml = Resolve(base_dir, d["xml"].get<std::string>());
      }
      if (d.contains("split")) spec.split = ParseCoincoSplit(d["split"].get<std::string>());
      config.datasets.push_back(std::move(spec));
    }
    if (auto env = Env("LEXSUB_WORDNET")) {
      config.wordnet = *env;
    } else if (j.contains("wordnet") && !j["wordnet"].is_null()) {
      config.wordnet = Resolve(base_dir, j["wordnet"].get<std::string>());
    }
    if (j.contains("defaults")) {
      const auto& d = j["defaults"];
      auto& out = config.defaults;
      out.temperature = Get(d, "temperature", out.temperature);
      out.beta = Get(d, "beta", out.beta);
      out.pattern = Get(d, "pattern", out.pattern);
      out.top_k = Get(d, "top_k", out.top_k);
      out.postproc = Get(d, "postproc", out.postproc);
      if (d.contains("injection")) {
        out.injection = ParseInjection(d["injection"].get<std::string>());
      }
    }
    auto& server = config.server;
    if (j.contains("server")) {
      const auto& s = j["server"];
      server.host = Get(s, "host", server.host);
      server.port = Get(s, "port", server.port);
      server.workers = Get(s, "workers", server.workers);
      server.queue_capacity = Get(s, "queue_capacity", server.queue_capacity);
      server.timeout_seconds = Get(s, "timeout_seconds", server.timeout_seconds);
      if (s.contains("augment_output_dir")) {
        server.augment_output_dir =
            Resolve(base_dir, s["augment_output_dir"].get<std::string>());
      }
      if (s.contains("static_dir")) {
        server.static_dir = Resolve(base_dir, s["static_dir"].get<std::string>());
      }
    }
    if (auto env = Env("LEXSUB_AUGMENT_OUT")) server.augment_output_dir = *env;
    if (auto env = Env("LEXSUB_STATIC_DIR")) server.static_dir = *env;
  } catch (const Json::exception& e) {
    throw LexsubError(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  // Validates pattern and numeric ranges once, up front.
  EstimatorConfig probe;
  probe.temperature = config.defaults.temperature;
  probe.beta = config.defaults.beta;
  probe.pattern = config.defaults.pattern;
  probe.Validate();
  if (config.defaults.top_k == 0) {
    throw LexsubError(ErrorCode::kInvalidArgument, "defaults.top_k must be positive");
  }
  return config;
}

AppConfig LoadAppConfig(const std::filesystem::path& path) {
  return ParseAppConfig(ReadJsonFile(path), path.parent_path());
}

EstimatorConfig MakeEstimatorConfig(const Defaults& defaults, BackendKind kind,
                                    Injection injection) {
  EstimatorConfig config;
  config.backend = kind;
  config.injection = injection;
  config.temperature = defaults.temperature;
  config.beta = defaults.beta;
  config.pattern = defaults.pattern;
  return config;
}

void ModelRegistry::Register(std::string name,
                             std::shared_ptr<const SubstituteEstimator> estimator) {
  const auto kind = estimator->kind();
  Entry entry{name, kind, std::move(estimator), "", std::make_shared<std::mutex>()};
  entries_.insert_or_assign(std::move(name), std::move(entry));
}

void ModelRegistry::RegisterUnavailable(std::string name, BackendKind kind,
                                        std::string error) {
  Entry entry{name, kind, nullptr, std::move(error), std::make_shared<std::mutex>()};
  entries_.insert_or_assign(std::move(name), std::move(entry));
}

const ModelRegistry::Entry* ModelRegistry::Find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<const ModelRegistry::Entry*> ModelRegistry::entries() const {
  std::vector<const Entry*> out;
  for (const auto& [name, entry] : entries_) out.push_back(&entry);
  return out;
}

Injection ModelRegistry::ResolveInjection(std::string_view name,
                                          std::optional<Injection> requested,
                                          const Defaults& defaults) const {
  if (requested) return *requested;
  const Entry* entry = Find(name);
  if (entry == nullptr || !entry->estimator) return defaults.injection;
  const auto supported = entry->estimator->supported_injections();
  if (std::find(supported.begin(), supported.end(), defaults.injection) != supported.end()) {
    return defaults.injection;
  }
  return entry->estimator->default_injection();
}

Model ModelRegistry::MakeModel(std::string_view name, Injection injection,
                               const Defaults& defaults) const {
  const Entry* entry = Find(name);
  if (entry == nullptr) {
    throw LexsubError(ErrorCode::kNotFound, "unknown model '" + std::string(name) + "'");
  }
  if (!entry->estimator) {
    throw LexsubError(ErrorCode::kBackendUnavailable, entry->name + ": " + entry->error);
  }
  const auto supported = entry->estimator->supported_injections();
  if (std::find(supported.begin(), supported.end(), injection) == supported.end()) {
    throw LexsubError(ErrorCode::kInvalidArgument,
                      entry->name + " does not support injection '" +
                          std::string(InjectionName(injection)) + "'");
  }
  Model model = lexsub::MakeModel(
      entry->name + "+" + std::string(InjectionName(injection)), entry->estimator,
      MakeEstimatorConfig(defaults, entry->kind, injection));
  if (!model.reentrant) {
    model.generate = [inner = std::move(model.generate),
                      guard = entry->guard](const LexSubInstance& inst) {
      std::lock_guard lock(*guard);
      return inner(inst);
    };
  }
  return model;
}

namespace {

std::optional<EmbeddingTable> OptionalEmbeddings(const Json& o, const char* key) {
  if (!o.contains(key)) return std::nullopt;
  return ReadEmbeddingsText(std::filesystem::path(o[key].get<std::string>()));
}

UnigramPrior PriorFrom(const Json& o) {
  if (!o.contains("counts")) return UnigramPrior::Uniform();
  return UnigramPrior::FromCounts(
      ReadCounts(std::filesystem::path(o["counts"].get<std::string>())));
}

std::shared_ptr<const TokenScorer> RemoteScorer(const Json& o) {
  return std::make_shared<RemoteTokenScorer>(
      o.at("endpoint").get<std::string>(),
      ReadLines(std::filesystem::path(o.at("vocab").get<std::string>())),
      Get(o, "timeout_seconds", 30));
}

TransformerOptions TransformerFrom(const Json& o, const char* default_mask) {
  TransformerOptions t;
  t.mask_token = Get<std::string>(o, "mask_token", default_mask);
  if (o.contains("vocab_style")) {
    t.vocab_style = ParseVocabStyle(o["vocab_style"].get<std::string>());
  }
  t.reentrant = Get(o, "reentrant", true);
  return t;
}

}  // namespace

std::shared_ptr<const SubstituteEstimator> LoadBackend(const BackendSpec& spec) {
  const Json& o = spec.options;
  try {
    switch (spec.kind) {
      case BackendKind::kToyTable:
        if (o.contains("table")) return std::make_shared<ToyTableEstimator>(o);
        return std::make_shared<ToyTableEstimator>(ToyTableEstimator::FromFile(
            std::filesystem::path(o.at("path").get<std::string>())));
      case BackendKind::kForwardBackwardLm: {
        ForwardBackwardLmEstimator::Options opts;
        opts.min_count = Get(o, "min_count", opts.min_count);
        opts.lowercase = Get(o, "lowercase", opts.lowercase);
        auto lm = std::make_shared<ForwardBackwardLmEstimator>(
            ForwardBackwardLmEstimator::FromCorpusFile(
                std::filesystem::path(o.at("corpus").get<std::string>()), opts));
        if (auto emb = OptionalEmbeddings(o, "embeddings")) {
          lm->set_embeddings(std::move(*emb));
        }
        return lm;
      }
      case BackendKind::kMaskedLm:
        return std::make_shared<MaskedLmEstimator>(
            RemoteScorer(o), TransformerFrom(o, "[MASK]"),
            OptionalEmbeddings(o, "embeddings"), PriorFrom(o));
      case BackendKind::kPermutationLm:
        return std::make_shared<PermutationLmEstimator>(
            RemoteScorer(o), TransformerFrom(o, "<mask>"),
            OptionalEmbeddings(o, "embeddings"), PriorFrom(o));
      case BackendKind::kDependencyEmbedding: {
        const auto mode = Get<std::string>(o, "mode", "ooc");
        if (mode != "ooc" && mode != "npic") {
          throw LexsubError(ErrorCode::kInvalidArgument, "mode must be ooc or npic");
        }
        return std::make_shared<DependencyEmbeddingEstimator>(
            mode == "ooc" ? DependencyEmbeddingEstimator::Mode::kOoc
                          : DependencyEmbeddingEstimator::Mode::kNpic,
            ReadEmbeddingsText(std::filesystem::path(o.at("embeddings").get<std::string>())),
            OptionalEmbeddings(o, "context_embeddings"));
      }
      case BackendKind::kContextEmbedding: {
        auto candidates = ReadEmbeddingsText(
            std::filesystem::path(o.at("embeddings").get<std::string>()));
        auto ctx = o.contains("context_embeddings")
                       ? std::make_shared<const EmbeddingTable>(ReadEmbeddingsText(
                             std::filesystem::path(o["context_embeddings"].get<std::string>())))
                       : std::make_shared<const EmbeddingTable>(candidates);
        return std::make_shared<ContextEmbeddingEstimator>(
            std::move(candidates),
            WindowMeanEncoder(std::move(ctx), Get<std::size_t>(o, "window", 2)));
      }
    }
  } catch (const Json::exception& e) {
    throw LexsubError(ErrorCode::kParseError,
                      "backend " + spec.name + ": " + e.what());
  }
  throw LexsubError(ErrorCode::kInvalidArgument, "unhandled backend kind");
}

ModelRegistry LoadRegistry(const AppConfig& config) {
  ModelRegistry registry;
  for (const auto& spec : config.backends) {
    try {
      registry.Register(spec.name, LoadBackend(spec));
    } catch (const LexsubError& e) {
      registry.RegisterUnavailable(spec.name, spec.kind, e.what());
    }
  }
  return registry;
}

LoadedDataset LoadDataset(const DatasetSpec& spec) {
  LoadedDataset out;
  out.spec = spec;
  try {
    switch (spec.format) {
      case DatasetFormat::kJsonl:
        out.instances = ReadInstancesJsonl(spec.path);
        break;
      case DatasetFormat::kSemeval:
        out.instances = load_semeval_gold(spec.path);
        if (!spec.xml.empty()) {
          out.instances = AttachSemevalContexts(std::move(out.instances), spec.xml);
        }
        break;
      case DatasetFormat::kCoinco:
        out.instances = ConvertCoinco(spec.path, spec.split);
        break;
      case DatasetFormat::kSnips:
        out.utterances = ReadSnips(spec.path);
        break;
    }
  } catch (const LexsubError& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace lexsub
