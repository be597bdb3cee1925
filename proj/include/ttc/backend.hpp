#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ttc/error.hpp"
#include "ttc/prompt.hpp"

namespace ttc {

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct CompletionRequest {
  PromptBundle bundle;
  double temperature = 0.0;  // [0, 2]
  int max_tokens = 1024;
  std::string model_id;
};

struct Completion {
  std::string text;
  std::string backend_id;
  std::chrono::milliseconds latency{0};
  std::optional<TokenUsage> usage;
  int retries = 0;  // transient-failure retries consumed by this call
};

struct BackendLogEntry {
  std::string prompt_hash;
  std::string event;  // "request", "retry", "response", "error"
  std::string detail;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Completion complete(const CompletionRequest& request) = 0;
  virtual std::string id() const = 0;
};

// Offline oracle: answers with the majority label of the bundle's positive
// examples (ties: the tied label whose earliest rank is smallest), or the
// first class in dataset order when the bundle has no positive examples.
// Deterministic, temperature-independent; makes the whole pipeline equal a
// kNN-majority classifier.
class MockBackend : public Backend {
 public:
  explicit MockBackend(std::vector<std::string> classes_in_order);

  Completion complete(const CompletionRequest& request) override;
  std::string id() const override { return "mock"; }

  static std::string vote_label(const PromptBundle& bundle,
                                const std::vector<std::string>& classes_in_order);

 private:
  std::vector<std::string> classes_;
};

struct HttpBackendConfig {
  std::string url;     // full chat-completion endpoint URL
  std::string api_key;
  std::string model_id;
  int max_attempts = 3;  // total attempts for transient failures
  std::chrono::milliseconds backoff_base{1000};
  std::chrono::milliseconds timeout{120000};
  int max_in_flight = 4;
  std::size_t context_budget_tokens = 128000;  // estimate-based warning only

  // Reads TT_API_URL, TT_API_KEY, TT_MODEL; unset variables leave the
  // corresponding fields untouched.
  static HttpBackendConfig from_env();
};

// De-facto chat-completion JSON wire protocol: one system message carrying the
// context block, one user message carrying the rest of the prompt.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  Completion complete(const CompletionRequest& request) override;
  std::string id() const override { return "http:" + config_.model_id; }

  std::vector<BackendLogEntry> log_snapshot() const;

 private:
  void log(const std::string& hash, const std::string& event, const std::string& detail);

  HttpBackendConfig config_;
  mutable std::mutex log_mutex_;
  std::vector<BackendLogEntry> log_;

  class Gate;
  std::shared_ptr<Gate> gate_;
};

// "mock" needs the dataset's class order; "http" reads the environment on top
// of the given config.
std::unique_ptr<Backend> make_backend(const std::string& spec,
                                      const std::vector<std::string>& classes_in_order,
                                      const HttpBackendConfig& http_config);

}  // namespace ttc
