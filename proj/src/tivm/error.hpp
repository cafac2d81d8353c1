#pragma once

#include <stdexcept>
#include <string>

namespace tivm {

enum class ErrorCode {
  InvalidArgument,
  InvalidCapacity,
  InvalidRate,
  ShapeMismatch,
  DegenerateNorm,
  EmptySequence,
  Io,
  Format,
  NonFiniteData,
  LabelMismatch,
  ShapeInconsistent,
  ImageTooSmall,
  IndexOutOfRange,
  LengthMismatch,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure inside the core surfaces as this one exception type; the
// C layer maps `code()` onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace tivm
