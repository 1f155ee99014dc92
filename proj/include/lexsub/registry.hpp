#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lexsub/augment.hpp"
#include "lexsub/datasets.hpp"
#include "lexsub/estimators.hpp"
#include "lexsub/evaluation.hpp"
#include "lexsub/io.hpp"
#include "lexsub/wordnet.hpp"

namespace lexsub {

/// One backend entry of the app config. `options` keeps the raw JSON object
/// so kind-specific keys (corpus, endpoint, vocab, mode, ...) stay together.
struct BackendSpec {
  std::string name;
  BackendKind kind = BackendKind::kToyTable;
  Json options = Json::object();
};

enum class DatasetFormat { kJsonl, kSemeval, kCoinco, kSnips };

struct DatasetSpec {
  std::string name;
  DatasetFormat format = DatasetFormat::kJsonl;
  std::filesystem::path path;  // jsonl / gold file / CoInCo XML / SNIPS json
  std::filesystem::path xml;   // SemEval contexts
  CoincoSplit split = CoincoSplit::kAll;
};

struct Defaults {
  double temperature = 1.0;
  double beta = 1.0;
  std::string pattern = "T and then _";
  std::size_t top_k = 10;
  std::string postproc = "default";
  Injection injection = Injection::kBase;
};

struct ServerSettings {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t workers = 4;
  std::size_t queue_capacity = 64;
  int timeout_seconds = 30;
  std::filesystem::path augment_output_dir = "augment-out";
  std::filesystem::path static_dir;  // optional built web UI
};

struct AppConfig {
  std::vector<BackendSpec> backends;
  std::vector<DatasetSpec> datasets;
  std::filesystem::path wordnet;
  Defaults defaults;
  ServerSettings server;
};

// Relative paths resolve against `base_dir`. Path-valued settings may be
// overridden from the environment:
//   LEXSUB_WORDNET, LEXSUB_AUGMENT_OUT, LEXSUB_STATIC_DIR,
//   LEXSUB_DATASET_<NAME>, LEXSUB_DATASET_<NAME>_XML,
//   LEXSUB_BACKEND_<NAME>_<KEY>  (any path key of that backend)
// where <NAME> is upper-cased with non-alphanumerics mapped to '_'.
AppConfig ParseAppConfig(const Json& j, const std::filesystem::path& base_dir);
AppConfig LoadAppConfig(const std::filesystem::path& path);
std::string EnvKey(std::string_view name);

EstimatorConfig MakeEstimatorConfig(const Defaults& defaults, BackendKind kind,
                                    Injection injection);

/// Backends by name. Entries that failed to load are kept with their error so
/// callers can report them as unavailable.
class ModelRegistry {
 public:
  struct Entry {
    std::string name;
    BackendKind kind;
    std::shared_ptr<const SubstituteEstimator> estimator;  // null if failed
    std::string error;
    std::shared_ptr<std::mutex> guard;  // serializes non-reentrant backends
  };

  void Register(std::string name, std::shared_ptr<const SubstituteEstimator> estimator);
  void RegisterUnavailable(std::string name, BackendKind kind, std::string error);

  const Entry* Find(std::string_view name) const;
  std::vector<const Entry*> entries() const;  // name order
  bool empty() const { return entries_.empty(); }

  // Explicit choice if given, else the configured default when the backend
  // supports it, else the backend's own default.
  Injection ResolveInjection(std::string_view name, std::optional<Injection> requested,
                             const Defaults& defaults) const;

  // Throws kNotFound / kBackendUnavailable, kInvalidArgument for an injection
  // the backend does not support.
  Model MakeModel(std::string_view name, Injection injection,
                  const Defaults& defaults) const;

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

std::shared_ptr<const SubstituteEstimator> LoadBackend(const BackendSpec& spec);
ModelRegistry LoadRegistry(const AppConfig& config);

struct LoadedDataset {
  DatasetSpec spec;
  std::vector<LexSubInstance> instances;  // lexsub formats
  std::vector<SlotUtterance> utterances;  // snips
  std::string error;
};

LoadedDataset LoadDataset(const DatasetSpec& spec);

}  // namespace lexsub
