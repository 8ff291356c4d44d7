#pragma once

#include <stdexcept>
#include <string>

namespace aswt {

enum class ErrorCode {
  invalid_argument,  // bad input: unsupported field, malformed spec, etc.
  parse,             // text that could not be parsed
  domain,            // mathematically undefined request (division by zero, p | d, ...)
  consistency,       // an internal invariant failed; results cannot be trusted
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void check_consistency(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::consistency, what);
}

}  // namespace aswt
