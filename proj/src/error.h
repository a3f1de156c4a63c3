#pragma once

#include <stdexcept>
#include <string>

namespace defembed {

// Status codes shared by the C API and the CLI exit status.
enum class StatusCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kNumeric = 3,
};

class Error : public std::runtime_error {
 public:
  Error(StatusCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  StatusCode code() const { return code_; }

 private:
  StatusCode code_;
};

// Invalid arguments, dimension mismatches, unknown words/roles.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& msg) : Error(StatusCode::kUsage, msg) {}
};

// Malformed or inconsistent input data and files.
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(StatusCode::kData, msg) {}
};

// Non-finite losses, undefined correlations, numerical breakdown.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(StatusCode::kNumeric, msg) {}
};

}  // namespace defembed
