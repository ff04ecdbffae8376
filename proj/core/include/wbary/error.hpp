#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wbary {

enum class ErrorKind {
  NegativeWeight,
  DimensionMismatch,
  WeightSumOutOfTolerance,
  UnsupportedSpace,
  InvalidSpace,
  InvalidArgument,
  InfeasibleWeights,
  NumericalFailure,
  ProductSizeExceeded,
  InvalidConfig,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every library failure is reported as an Error carrying its kind; the
/// message names the offending field and, where relevant, the tolerance.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace wbary
