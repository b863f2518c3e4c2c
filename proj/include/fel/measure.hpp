#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fel {

inline constexpr double kMassTolerance = 1e-9;
inline constexpr std::size_t kDefaultGridPoints = 8192;
inline constexpr double kDefaultPadFraction = 0.01;
inline constexpr std::size_t kMinGridPoints = 16;
inline constexpr int kMaxMomentOrder = 32;

struct Atom {
  double location;
  double mass;
};

struct Interval {
  double lo;
  double hi;

  double width() const { return hi - lo; }
};

/// A compactly supported probability law on the real line.
///
/// Atomic measures hold a sorted list of atoms. Grid measures hold density
/// samples at the nodes lo + i*step; the density between nodes is the linear
/// interpolant, so the trapezoid sum of the samples is the exact mass.
class Measure {
 public:
  enum class Kind { Atomic, Grid };

  Kind kind() const noexcept { return kind_; }
  bool is_atomic() const noexcept { return kind_ == Kind::Atomic; }
  bool is_grid() const noexcept { return kind_ == Kind::Grid; }

  std::span<const Atom> atoms() const noexcept { return atoms_; }

  double grid_lo() const noexcept { return lo_; }
  double grid_hi() const noexcept { return hi_; }
  double step() const noexcept { return step_; }
  std::size_t n_points() const noexcept { return density_.size(); }
  std::span<const double> density() const noexcept { return density_; }
  double node(std::size_t i) const noexcept { return lo_ + static_cast<double>(i) * step_; }

  /// Factor the raw samples were multiplied by to reach unit mass.
  double rescale_factor() const noexcept { return rescale_; }

  /// Smallest interval carrying all of the mass: the atom range, or the grid
  /// window trimmed to the first and last cell with positive density.
  Interval support() const noexcept;

 private:
  friend Measure make_grid_measure(double lo, double hi, std::vector<double> samples);
  friend Measure make_atomic_measure(std::vector<Atom> atoms);

  Kind kind_ = Kind::Atomic;
  std::vector<Atom> atoms_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double step_ = 0.0;
  std::vector<double> density_;
  double rescale_ = 1.0;
};

/// Moments of orders 1..K; `values[k-1]` is the k-th moment.
struct MomentVector {
  std::vector<double> values;

  std::size_t order() const noexcept { return values.size(); }
  double at(std::size_t k) const { return values.at(k - 1); }
};

struct GridOptions {
  std::size_t n_points = kDefaultGridPoints;
  double pad_fraction = kDefaultPadFraction;
};

/// Trapezoid integral of uniformly spaced samples.
double trapezoid(std::span<const double> samples, double step) noexcept;

Measure make_grid_measure(double lo, double hi, std::vector<double> samples);
Measure make_atomic_measure(std::vector<Atom> atoms);

double moment(const Measure& mu, int k);
MomentVector moments(const Measure& mu, int max_order);
double mean(const Measure& mu);
double variance(const Measure& mu);

/// Law of c*X.
Measure dilate(const Measure& mu, double c);
/// Law of X + c.
Measure shift(const Measure& mu, double c);

// Named laws. Grid versions sample the hat-function averages of the exact
// density, which keeps integrable edge singularities finite and the mass exact.
Measure semicircle(double variance, const GridOptions& opts = {});
Measure uniform(double variance, const GridOptions& opts = {});
Measure arcsine(double variance, const GridOptions& opts = {});
Measure bernoulli(double variance = 1.0);
Measure point_mass(double location);
Measure gaussian_grid(double variance, const GridOptions& opts = {}, double half_width_sigmas = 10.0);

/// Builds a grid measure on the padded window of `window` from the second
/// antiderivative of a CDF, i.e. F2(x) = \int_{-inf}^x F(s) ds.
template <class F2>
Measure grid_from_second_antiderivative(Interval window, const GridOptions& opts, F2 f2);

/// L1 distance between two measures after linear interpolation onto the finer
/// of the two grids (grid measures only).
double l1_distance(const Measure& a, const Measure& b);

/// Density of a grid measure at an arbitrary point (linear interpolation, zero
/// outside the window).
double density_at(const Measure& mu, double x);

}  // namespace fel

#include "fel/measure_impl.hpp"
