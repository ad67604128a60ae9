#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scorekeeping {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or option combination (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated file, bad magic/version (exit code 2).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Cross-references between records do not line up.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class MissingKeyError : public Error {
 public:
  explicit MissingKeyError(const std::string& key)
      : Error("missing key: " + key), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class SidecarError : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class EmptySubsetError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

/// NaN/inf encountered during optimisation (exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Rule DSL parse failure with a 1-based source location.
class DslError : public Error {
 public:
  DslError(std::size_t line, std::size_t column, const std::string& what)
      : Error("rules:" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace scorekeeping
