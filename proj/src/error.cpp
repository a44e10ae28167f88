#include "clustopt/error.hpp"

namespace clustopt {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::InvalidRange: return "InvalidRange";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::Disconnected: return "Disconnected";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::SizeLimitExceeded: return "SizeLimitExceeded";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::AllZero: return "AllZero";
    case Errc::SamplerFailure: return "SamplerFailure";
    case Errc::BracketFailure: return "BracketFailure";
    case Errc::NumericalDivergence: return "NumericalDivergence";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::ParseError: return "ParseError";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace clustopt
