#include "ttc/backend.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ttc/table.hpp"
#include "ttc/util.hpp"

namespace ttc {
namespace {

using nlohmann::json;

void check_temperature(double temperature) {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error("temperature " + double_to_string(temperature) + " outside [0, 2]");
  }
}

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw BackendError(BackendErrorKind::Config, "endpoint URL must include a scheme: " + url);
  }
  const std::size_t path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

}  // namespace

MockBackend::MockBackend(std::vector<std::string> classes_in_order)
    : classes_(std::move(classes_in_order)) {
  if (classes_.empty()) throw Error("mock backend requires the dataset's class list");
}

std::string MockBackend::vote_label(const PromptBundle& bundle,
                                    const std::vector<std::string>& classes_in_order) {
  const auto& positives = bundle.provenance.positives;
  if (positives.empty()) return classes_in_order.front();

  std::map<std::string, int> counts;
  for (const auto& hit : positives) ++counts[hit.label];
  int best = 0;
  for (const auto& [_, c] : counts) best = std::max(best, c);
  // Earliest rank among the tied labels; reduces to the rank-1 label whenever
  // that label is part of the tie.
  for (const auto& hit : positives) {
    if (counts[hit.label] == best) return hit.label;
  }
  return positives.front().label;
}

Completion MockBackend::complete(const CompletionRequest& request) {
  check_temperature(request.temperature);
  Completion completion;
  completion.text = "Label: " + vote_label(request.bundle, classes_);
  completion.backend_id = id();
  return completion;
}

HttpBackendConfig HttpBackendConfig::from_env() {
  HttpBackendConfig config;
  if (const char* url = std::getenv("TT_API_URL")) config.url = url;
  if (const char* key = std::getenv("TT_API_KEY")) config.api_key = key;
  if (const char* model = std::getenv("TT_MODEL")) config.model_id = model;
  return config;
}

// Bounded in-flight gate shared by all requests on this backend.
class HttpBackend::Gate {
 public:
  explicit Gate(int limit) : available_(limit) {}

  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }

  void release() {
    {
      std::lock_guard lock(mutex_);
      ++available_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int available_;
};

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.url.empty()) {
    throw BackendError(BackendErrorKind::Config, "no endpoint URL (set TT_API_URL)");
  }
  if (config_.model_id.empty()) {
    throw BackendError(BackendErrorKind::Config, "no model id (set TT_MODEL)");
  }
  if (config_.max_attempts < 1) {
    throw BackendError(BackendErrorKind::Config, "max_attempts must be at least 1");
  }
  gate_ = std::make_shared<Gate>(std::max(1, config_.max_in_flight));
}

void HttpBackend::log(const std::string& hash, const std::string& event,
                      const std::string& detail) {
  std::lock_guard lock(log_mutex_);
  log_.push_back({hash, event, detail});
}

std::vector<BackendLogEntry> HttpBackend::log_snapshot() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

Completion HttpBackend::complete(const CompletionRequest& request) {
  check_temperature(request.temperature);
  if (config_.api_key.empty()) {
    throw BackendError(BackendErrorKind::Auth, "no API key (set TT_API_KEY)");
  }

  const std::string hash = request.bundle.prompt_hash();
  const std::size_t estimated = estimate_tokens(request.bundle.rendered);
  if (estimated > config_.context_budget_tokens) {
    log(hash, "warning",
        "estimated " + std::to_string(estimated) + " tokens exceeds budget " +
            std::to_string(config_.context_budget_tokens));
  }

  const ParsedUrl url = split_url(config_.url);
  json body;
  body["model"] = request.model_id.empty() ? config_.model_id : request.model_id;
  body["messages"] = json::array({
      json{{"role", "system"}, {"content", request.bundle.system_text}},
      json{{"role", "user"}, {"content", request.bundle.user_text}},
  });
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  const std::string payload = body.dump();

  gate_->acquire();
  struct Release {
    Gate* gate;
    ~Release() { gate->release(); }
  } release{gate_.get()};

  const auto started = std::chrono::steady_clock::now();
  log(hash, "request", "model=" + body["model"].get<std::string>());

  std::string last_error;
  for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
    if (attempt > 0) {
      const auto delay = config_.backoff_base * (1 << (attempt - 1));
      std::this_thread::sleep_for(delay);
      log(hash, "retry", "attempt " + std::to_string(attempt + 1) + ": " + last_error);
    }

    httplib::Client client(url.base);
    const auto seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(config_.timeout).count();
    client.set_connection_timeout(seconds);
    client.set_read_timeout(seconds);
    client.set_write_timeout(seconds);
    client.set_bearer_token_auth(config_.api_key);

    auto result = client.Post(url.path, payload, "application/json");
    if (!result) {
      const bool timed_out = result.error() == httplib::Error::ConnectionTimeout ||
                             result.error() == httplib::Error::Read ||
                             result.error() == httplib::Error::Write;
      last_error = "transport: " + httplib::to_string(result.error());
      if (attempt + 1 == config_.max_attempts) {
        log(hash, "error", last_error);
        throw BackendError(timed_out ? BackendErrorKind::Timeout : BackendErrorKind::Network,
                           "request failed after " + std::to_string(config_.max_attempts) +
                               " attempts: " + last_error);
      }
      continue;
    }

    const int status = result->status;
    if (status == 401 || status == 403) {
      log(hash, "error", "auth " + std::to_string(status));
      throw BackendError(BackendErrorKind::Auth,
                         "authentication rejected (HTTP " + std::to_string(status) + ")");
    }
    if (status == 429 || status == 408 || status >= 500) {
      last_error = "HTTP " + std::to_string(status);
      if (attempt + 1 == config_.max_attempts) {
        log(hash, "error", last_error);
        throw BackendError(BackendErrorKind::Network,
                           "request failed after " + std::to_string(config_.max_attempts) +
                               " attempts: " + last_error);
      }
      continue;
    }
    if (status >= 400) {
      const bool too_long = result->body.find("context_length") != std::string::npos ||
                            result->body.find("maximum context") != std::string::npos;
      log(hash, "error", "HTTP " + std::to_string(status));
      throw BackendError(too_long ? BackendErrorKind::ContextLength : BackendErrorKind::Network,
                         "HTTP " + std::to_string(status) + ": " + result->body);
    }

    json parsed;
    try {
      parsed = json::parse(result->body);
    } catch (const json::exception& ex) {
      log(hash, "error", "bad json");
      throw BackendError(BackendErrorKind::BadResponse,
                         std::string("unparseable response body: ") + ex.what());
    }
    std::string text;
    try {
      text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      log(hash, "error", "missing choices[0].message.content");
      throw BackendError(BackendErrorKind::BadResponse,
                         "response lacks choices[0].message.content");
    }
    if (text.empty()) {
      log(hash, "error", "empty completion");
      throw BackendError(BackendErrorKind::BadResponse, "empty completion text");
    }

    Completion completion;
    completion.text = std::move(text);
    completion.backend_id = id();
    completion.retries = attempt;
    completion.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    if (parsed.contains("usage") && parsed["usage"].is_object()) {
      TokenUsage usage;
      usage.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
      usage.completion_tokens = parsed["usage"].value("completion_tokens", 0);
      completion.usage = usage;
    }
    log(hash, "response",
        "HTTP 200 after " + std::to_string(attempt + 1) + " attempt(s)");
    return completion;
  }
  throw BackendError(BackendErrorKind::Network, "retry loop exhausted");
}

std::unique_ptr<Backend> make_backend(const std::string& spec,
                                      const std::vector<std::string>& classes_in_order,
                                      const HttpBackendConfig& http_config) {
  if (spec == "mock") return std::make_unique<MockBackend>(classes_in_order);
  if (spec == "http") return std::make_unique<HttpBackend>(http_config);
  throw ConfigError("unknown backend '" + spec + "' (expected mock or http)");
}

}  // namespace ttc
