#pragma once

#include <cstddef>
#include <span>

#include "fel/measure.hpp"
#include "fel/transforms.hpp"

namespace fel {

struct SubordinationConfig {
  int max_iter = 2000;
  double tol = 1e-10;      // |T(w) - w| at every probe point
  double damping = 0.5;    // weight of T(w) in a fallback fixed-point step
  std::size_t n_points = kDefaultGridPoints;  // nodes of the output grid
};

void validate(const SubordinationConfig& cfg);

/// Cauchy transform of mu (+) nu, evaluated by solving for the subordination
/// function at each requested point.
CauchyEvaluator free_convolution_transform(const Measure& mu, const Measure& nu,
                                           const SubordinationConfig& cfg = {});
/// Cauchy transform of mu (+) semicircle of variance t.
CauchyEvaluator semicircular_smoothing_transform(const Measure& mu, double t, const SubordinationConfig& cfg = {});

Measure free_add_convolve(const Measure& mu, const Measure& nu, const SubordinationConfig& cfg = {});
Measure semicircular_smooth(const Measure& mu, double t, const SubordinationConfig& cfg = {});
/// Law of sum a_i X_i for free X_i ~ mus[i]; zero weights are skipped.
Measure weighted_free_sum(std::span<const Measure> mus, std::span<const double> a,
                          const SubordinationConfig& cfg = {});

}  // namespace fel
