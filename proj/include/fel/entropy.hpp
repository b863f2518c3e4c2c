#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include "fel/free_conv.hpp"
#include "fel/measure.hpp"
#include "fel/transforms.hpp"

namespace fel {

/// Multiplier in Phi = c * int f^3; it makes Phi(standard semicircle) = 1.
inline constexpr double kFisherConstant = 4.0 * std::numbers::pi * std::numbers::pi / 3.0;
/// 3/4 + log(2 pi)/2, added to the logarithmic energy.
inline const double kChiOffset = 0.75 + 0.5 * std::log(2.0 * std::numbers::pi);
/// chi of the standard semicircle, log(2 pi e)/2.
inline const double kSemicircleChi = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);

enum class ChiMethod { LogEnergy, FisherFlow };

std::string_view to_string(ChiMethod m) noexcept;

struct ChiValue {
  double value = 0.0;  // -inf for measures with atoms
  ChiMethod method = ChiMethod::LogEnergy;
  double estimated_error = 0.0;

  bool is_neg_infinity() const noexcept { return std::isinf(value) && value < 0.0; }
};

struct FlowQuadratureConfig {
  double t_cut = 50.0;
  int n_t = 41;         // log-spaced nodes on [t_min, t_cut]
  double t_min = 1e-4;
  SubordinationConfig sub;
};

void validate(const FlowQuadratureConfig& cfg);

/// int int log|s - t| dmu(s) dmu(t), exact for the piecewise-linear density.
double log_energy(const Measure& mu);
ChiValue chi_log_energy(const Measure& mu);

/// +inf for atomic measures.
double fisher_from_density(const Measure& mu);

/// J = 2 pi H f.
GridFunction conjugate_variable(const Measure& mu);
/// ||J||^2 in L^2(mu).
double fisher_from_conjugate(const Measure& mu);

/// |<J, p> - <1 (x) 1, dp>| / (1 + |<1 (x) 1, dp>|) for p = sum c_k x^k, deg p <= 8.
double conjugate_relation_residual(const Measure& mu, std::span<const double> poly_coeffs);

struct FlowNode {
  double t;
  double fisher;     // Phi(X + sqrt(t) S)
  double integrand;  // (1/(1+t) - Phi)/2
};

struct FlowResult {
  ChiValue chi;
  std::vector<FlowNode> nodes;
};

/// chi from the semicircular flow of the Fisher information. For atomic
/// measures the integral starts at t_min, which gives the entropy of the
/// flow started from mu smoothed by t_min.
FlowResult fisher_flow(const Measure& mu, const FlowQuadratureConfig& cfg = {});
ChiValue chi_via_fisher_flow(const Measure& mu, const FlowQuadratureConfig& cfg = {});

}  // namespace fel
