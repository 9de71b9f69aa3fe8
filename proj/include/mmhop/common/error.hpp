#pragma once

#include <stdexcept>
#include <string>

namespace mmhop {

// Exit-code aligned failure categories surfaced by the CLI.
enum class ErrorCategory { kValidation = 2, kSolver = 3, kIo = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCategory::kValidation, what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what)
      : Error(ErrorCategory::kSolver, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::kIo, what) {}
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kValidation: return "validation";
    case ErrorCategory::kSolver: return "solver";
    case ErrorCategory::kIo: return "io";
  }
  return "unknown";
}

}  // namespace mmhop
