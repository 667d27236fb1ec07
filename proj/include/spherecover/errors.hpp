#pragma once

#include <stdexcept>
#include <string>

namespace spherecover {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind {
  usage = 1,
  validation = 2,
  non_convergence = 3,
  cap_exceeded = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

inline Error validation_error(const std::string& what) { return {ErrorKind::validation, what}; }
inline Error usage_error(const std::string& what) { return {ErrorKind::usage, what}; }
inline Error convergence_error(const std::string& what) { return {ErrorKind::non_convergence, what}; }
inline Error cap_error(const std::string& what) { return {ErrorKind::cap_exceeded, what}; }

}  // namespace spherecover
