#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fel/entropy.hpp"
#include "fel/free_conv.hpp"
#include "fel/json_io.hpp"
#include "fel/measure.hpp"

namespace fel {

struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // >= 0 when the inequality holds
  double tol = 0.0;
  bool pass = false;
  bool vacuous = false;  // decided by an infinite term rather than by numbers
  Json inputs_digest;
};

/// Weights a (sum a_j^2 = 1) and optional b (sum b_j sqrt(1 - a_j^2) = 1).
struct CoefficientVector {
  std::vector<double> a;
  std::optional<std::vector<double>> b;

  static CoefficientVector equal(std::size_t count);
  /// b if given, else b_j = sqrt(1 - a_j^2) / n.
  std::vector<double> b_or_default() const;
  void validate() const;
};

struct CheckConfig {
  SubordinationConfig sub;
  double fisher_tol = 1e-3;
  double chi_tol = 5e-3;
  double epi_relative_tol = 1e-3;  // entropy-power tolerance as a fraction of exp(2 chi(sum))
  double bound_tol = 1e-3;         // chi_n <= chi(semicircle) + bound_tol in the CLT check
};

InequalityReport check_fisher_inequality(std::span<const Measure> mus, const CoefficientVector& coeffs,
                                         const CheckConfig& cfg = {});
InequalityReport check_free_stam(std::span<const Measure> mus, const CheckConfig& cfg = {});
InequalityReport check_chi_superadditivity(std::span<const Measure> mus, std::span<const double> a,
                                           const CheckConfig& cfg = {});

struct CltMonotonicity {
  std::vector<std::pair<int, ChiValue>> chi;  // (n, chi of the normalised n-fold sum)
  InequalityReport report;
};

CltMonotonicity check_clt_monotonicity(const Measure& mu, int n_max, const CheckConfig& cfg = {});
InequalityReport check_entropy_power(std::span<const Measure> mus, const CheckConfig& cfg = {});

Json to_json(const InequalityReport& r);
Json to_json(const ChiValue& c);
std::string csv_header();
std::string to_csv_row(const InequalityReport& r);

/// Shared by the sequence checks: pass iff every step is non-decreasing
/// within tol and the last value stays below bound + bound_tol. The slack is
/// the smallest step margin, with the bound margin rescaled by tol/bound_tol
/// so both conditions share one threshold.
InequalityReport sequence_report(std::string name, std::span<const double> values, double bound, double tol,
                                 double bound_tol);

}  // namespace fel
