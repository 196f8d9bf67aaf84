#include "lagom/error.hpp"

namespace lagom {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Overflow: return "dyadic overflow";
    case ErrorKind::EnumerationTooLarge: return "enumeration too large";
    case ErrorKind::UnalignedCube: return "unaligned cube";
    case ErrorKind::SpecMismatch: return "grid spec mismatch";
    case ErrorKind::BoxTooSmall: return "box too small";
    case ErrorKind::OutOfRange: return "out of range";
    case ErrorKind::EmptyFamily: return "empty family";
    case ErrorKind::EmptyRegion: return "empty region";
    case ErrorKind::MissingDerivative: return "missing derivative oracle";
    case ErrorKind::MemoryGuard: return "memory guard";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::DegenerateSweep: return "degenerate sweep";
    case ErrorKind::NonFinite: return "non-finite value";
    case ErrorKind::Io: return "i/o failure";
    case ErrorKind::Parse: return "parse error";
  }
  return "error";
}

}  // namespace lagom
