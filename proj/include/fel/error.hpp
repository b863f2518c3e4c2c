#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fel {

enum class ErrorCode {
  InvalidArgument,
  NonPositiveMass,
  NegativeDensity,
  MassMismatch,
  DuplicateAtom,
  OrderTooHigh,
  ZeroScale,
  AtomDetected,
  MassLoss,
  AtomicUnsupported,
  NoConvergence,
  DegenerateCoefficient,
  DensityTooSmall,
  DimensionTooSmall,
  UnrealizableSpec,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace fel
