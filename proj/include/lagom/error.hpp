#pragma once

#include <stdexcept>
#include <string>

namespace lagom {

enum class ErrorKind {
  DimensionMismatch,
  InvalidArgument,
  Overflow,
  EnumerationTooLarge,
  UnalignedCube,
  SpecMismatch,
  BoxTooSmall,
  OutOfRange,
  EmptyFamily,
  EmptyRegion,
  MissingDerivative,
  MemoryGuard,
  NonConvergence,
  DegenerateSweep,
  NonFinite,
  Io,
  Parse,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lagom
