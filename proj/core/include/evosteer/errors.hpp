#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evosteer {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

/// Syntax error in a reward program. Carries the byte offset into the source.
class DslParseError : public Error {
 public:
  DslParseError(std::size_t offset, const std::string& detail)
      : Error("syntax error at offset " + std::to_string(offset) + ": " + detail),
        offset_(offset),
        detail_(detail) {}

  std::size_t offset() const { return offset_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

class DslEvalError : public Error {
 public:
  using Error::Error;
};

/// Failure talking to a critic backend. Remote failures never crash the
/// steering loop; callers convert these into aborted episodes.
class CriticError : public Error {
 public:
  enum class Kind { timeout, transport, http_status, unparseable };

  CriticError(Kind kind, const std::string& message, int status = 0,
              std::string last_response = {})
      : Error(message),
        kind_(kind),
        status_(status),
        last_response_(std::move(last_response)) {}

  Kind kind() const { return kind_; }
  int status() const { return status_; }
  const std::string& last_response() const { return last_response_; }

 private:
  Kind kind_;
  int status_;
  std::string last_response_;
};

}  // namespace evosteer
