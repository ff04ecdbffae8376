#include "wbary/error.hpp"

namespace wbary {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::WeightSumOutOfTolerance: return "WeightSumOutOfTolerance";
    case ErrorKind::UnsupportedSpace: return "UnsupportedSpace";
    case ErrorKind::InvalidSpace: return "InvalidSpace";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InfeasibleWeights: return "InfeasibleWeights";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::ProductSizeExceeded: return "ProductSizeExceeded";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace wbary
