#pragma once

#include <stdexcept>
#include <string>

namespace bmatch {

enum class ErrorCode {
  invalid_argument,
  parse_error,
  validation,
  cyclic_instance,
  guard_exceeded,
  generation_failed,
  internal_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bmatch
