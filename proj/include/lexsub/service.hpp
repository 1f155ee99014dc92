#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lexsub/io.hpp"
#include "lexsub/registry.hpp"
#include "lexsub/relations.hpp"
#include "lexsub/wordnet.hpp"

namespace lexsub {

inline constexpr int kApiSchemaVersion = 1;
inline constexpr std::size_t kMaxTopK = 50;

/// Fixed worker pool with a bounded backlog. Submit refuses work instead of
/// blocking when the backlog is full.
class WorkQueue {
 public:
  WorkQueue(std::size_t workers, std::size_t capacity);
  ~WorkQueue();
  WorkQueue(const WorkQueue&) = delete;
  WorkQueue& operator=(const WorkQueue&) = delete;

  template <typename Fn>
  auto Submit(Fn fn) -> std::optional<std::future<decltype(fn())>> {
    using R = decltype(fn());
    auto task = std::make_shared<std::packaged_task<R()>>(std::move(fn));
    auto future = task->get_future();
    if (!Push([task] { (*task)(); })) return std::nullopt;
    return future;
  }

  std::size_t capacity() const { return capacity_; }

 private:
  bool Push(std::function<void()> job);
  void Loop();

  std::size_t capacity_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> jobs_;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

struct ApiResponse {
  int status = 200;
  Json body;
  // Compact dump; keys come out sorted, so equal bodies are byte-identical.
  std::string Dump() const { return body.dump(); }
};

// Whitespace tokens with their [start, end) byte offsets.
struct TokenSpan {
  std::string text;
  std::size_t start;
  std::size_t end;
};
std::vector<TokenSpan> TokenizeWithOffsets(std::string_view sentence);

class LexsubService {
 public:
  LexsubService(AppConfig config, ModelRegistry registry,
                std::map<std::string, LoadedDataset> datasets,
                std::shared_ptr<const SynsetGraph> graph);
  ~LexsubService();

  // Loads backends, datasets and the WordNet graph named in `config`.
  static std::unique_ptr<LexsubService> FromConfig(const AppConfig& config);

  ApiResponse Analyze(const Json& request);
  ApiResponse Models(const std::optional<std::string>& injection) const;
  ApiResponse Instances(const std::map<std::string, std::string>& params) const;
  ApiResponse SubmitAugment(const Json& request);
  ApiResponse AugmentStatus(const std::string& id);

  const AppConfig& config() const { return config_; }

 private:
  struct Job {
    std::string status = "running";
    Json result;
    std::future<void> done;
  };

  AppConfig config_;
  ModelRegistry registry_;
  std::map<std::string, LoadedDataset> datasets_;
  std::shared_ptr<const SynsetGraph> graph_;
  std::mutex jobs_mu_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::size_t next_job_ = 1;
  std::unique_ptr<WorkQueue> queue_;
};

ApiResponse ErrorResponse(int status, ErrorCode code, const std::string& message);

// Blocks serving HTTP until the process is stopped.
void Serve(LexsubService& service);

}  // namespace lexsub
