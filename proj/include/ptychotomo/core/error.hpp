#pragma once

#include <stdexcept>
#include <string>

namespace ptychotomo {

/// Failure categories. The numeric values are the CLI exit codes.
enum class ErrorKind : int {
  Config = 2,
  Data = 3,
  Solver = 4,
  Denoiser = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// Raised when an iterative solver produces non-finite values.
class SolverAbort : public Error {
 public:
  explicit SolverAbort(const std::string& what) : Error(ErrorKind::Solver, what) {}
};

}  // namespace ptychotomo
