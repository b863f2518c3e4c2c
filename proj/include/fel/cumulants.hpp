#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fel/measure.hpp"

namespace fel {

inline constexpr std::size_t kMaxCumulantOrder = 16;

/// Free cumulants kappa_1..kappa_K.
struct CumulantVector {
  std::vector<double> kappa;

  std::size_t order() const noexcept { return kappa.size(); }
  double at(std::size_t n) const { return kappa.at(n - 1); }
};

CumulantVector moments_to_free_cumulants(const MomentVector& m);
MomentVector free_cumulants_to_moments(const CumulantVector& k);

/// Moments 1..K of sum a_i X_i for free X_i with the given moments; each
/// input must carry at least K moments.
MomentVector weighted_sum_moments_oracle(std::span<const MomentVector> moment_vectors, std::span<const double> a,
                                         std::size_t K);

}  // namespace fel
