#pragma once

#include <span>
#include <utility>
#include <vector>

#include "fel/inequalities.hpp"
#include "fel/measure.hpp"
#include "fel/transforms.hpp"

namespace fel {

/// A probability density on a uniform grid; classical routines reject atoms.
using ClassicalDensity = Measure;

/// Samples below this are treated as zero by the score.
inline constexpr double kScoreThreshold = 1e-12;
/// The score satisfies int j p f = kScoreSign * int p' f.
inline constexpr double kScoreSign = -1.0;

/// Density of X + Y for independent X ~ f, Y ~ g, on the finer of the two steps.
ClassicalDensity classical_convolve(const ClassicalDensity& f, const ClassicalDensity& g);
/// Density of X + sqrt(t) Z with Z standard normal.
ClassicalDensity gaussian_smooth(const ClassicalDensity& f, double t);

struct ClassicalScore {
  GridFunction j;              // f'/f on the admissible sub-grid
  std::size_t first_node = 0;  // index of j.lo in the density grid
  double truncated_mass = 0.0;  // mass outside the admissible window
};

ClassicalScore classical_score(const ClassicalDensity& f);

struct ClassicalFisher {
  double value = 0.0;
  double truncated_mass = 0.0;
};

ClassicalFisher classical_fisher(const ClassicalDensity& f);
double shannon_entropy(const ClassicalDensity& f);

/// |int j p f - sign * int p' f| for p = sum c_k x^k, deg p <= 6.
double score_relation_residual(const ClassicalDensity& f, std::span<const double> poly_coeffs,
                               double sign = kScoreSign);

struct ClassicalMonotonicity {
  std::vector<std::pair<int, double>> entropy;  // (n, H of the normalised n-fold sum)
  InequalityReport report;
};

ClassicalMonotonicity check_classical_monotonicity(const ClassicalDensity& f, int n_max, double tol = 5e-3,
                                                   double bound_tol = 1e-3);

}  // namespace fel
