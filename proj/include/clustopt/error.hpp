#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clustopt {

enum class Errc {
  DuplicateEdge,
  SelfLoop,
  NonPositiveWeight,
  IndexOutOfRange,
  InvalidRange,
  PreconditionViolated,
  InsufficientData,
  InvalidParams,
  Disconnected,
  NotSymmetric,
  ConvergenceFailure,
  SizeLimitExceeded,
  DimensionMismatch,
  AllZero,
  SamplerFailure,
  BracketFailure,
  NumericalDivergence,
  MalformedLine,
  EmptyGraph,
  ParseError,
  VersionMismatch,
  InvalidConfig,
  IoError,
};

std::string_view to_string(Errc code);

// Every domain failure in the library is reported through this type. The
// message never contains a newline so the CLI can print it on one line.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace clustopt
