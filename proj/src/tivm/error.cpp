#include "tivm/error.hpp"

namespace tivm {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidCapacity: return "InvalidCapacity";
    case ErrorCode::InvalidRate: return "InvalidRate";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateNorm: return "DegenerateNorm";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Format: return "FormatError";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::ShapeInconsistent: return "ShapeInconsistent";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
  }
  return "Unknown";
}

}  // namespace tivm
