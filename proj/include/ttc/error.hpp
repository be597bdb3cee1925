#pragma once

#include <stdexcept>
#include <string>

namespace ttc {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error(message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error(message) {}
};

enum class BackendErrorKind {
  Config,         // missing key/url/model before any network call
  Auth,           // 401/403
  ContextLength,  // request rejected as too long
  Timeout,
  Network,        // transport failure or retryable status after all retries
  BadResponse,    // 2xx with an unusable body
};

class BackendError : public Error {
 public:
  BackendError(BackendErrorKind kind, const std::string& message)
      : Error(message), kind_(kind) {}

  BackendErrorKind kind() const { return kind_; }

 private:
  BackendErrorKind kind_;
};

}  // namespace ttc
