#pragma once

#include <stdexcept>
#include <string>

namespace fockpulse {

enum class ErrorCode {
  config,
  parameter,
  index,
  shape,
  contract,
  layout,
  numerical,
  ill_conditioned,
  io,
  optimization,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the core library; the C API maps `code()` onto
// its status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class IllConditionedError : public Error {
 public:
  IllConditionedError(double condition, const std::string& message)
      : Error(ErrorCode::ill_conditioned, message), condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace fockpulse
