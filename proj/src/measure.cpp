#include "fel/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fel/error.hpp"

namespace fel {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveMass: return "NonPositiveMass";
    case ErrorCode::NegativeDensity: return "NegativeDensity";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::DuplicateAtom: return "DuplicateAtom";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::ZeroScale: return "ZeroScale";
    case ErrorCode::AtomDetected: return "AtomDetected";
    case ErrorCode::MassLoss: return "MassLoss";
    case ErrorCode::AtomicUnsupported: return "AtomicUnsupported";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateCoefficient: return "DegenerateCoefficient";
    case ErrorCode::DensityTooSmall: return "DensityTooSmall";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::UnrealizableSpec: return "UnrealizableSpec";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

double trapezoid(std::span<const double> samples, double step) noexcept {
  if (samples.size() < 2) return 0.0;
  double sum = 0.0;
  for (double v : samples) sum += v;
  sum -= 0.5 * (samples.front() + samples.back());
  return sum * step;
}

Interval Measure::support() const noexcept {
  if (is_atomic()) return {atoms_.front().location, atoms_.back().location};
  std::size_t first = 0;
  while (first < density_.size() && density_[first] <= 0.0) ++first;
  std::size_t last = density_.size() - 1;
  while (last > first && density_[last] <= 0.0) --last;
  // the interpolant is positive on the cells adjacent to the extreme nonzero nodes
  const std::size_t a = first > 0 ? first - 1 : 0;
  const std::size_t b = std::min(last + 1, density_.size() - 1);
  return {node(a), node(b)};
}

Measure make_grid_measure(double lo, double hi, std::vector<double> samples) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::InvalidArgument, "grid window requires finite lo < hi");
  }
  if (samples.size() < kMinGridPoints) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least 16 samples");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite density sample");
    if (v < 0.0) throw Error(ErrorCode::NegativeDensity, "density sample " + std::to_string(v));
  }
  const double step = (hi - lo) / static_cast<double>(samples.size() - 1);
  const double mass = trapezoid(samples, step);
  if (!(mass > 0.0)) throw Error(ErrorCode::NonPositiveMass, "trapezoid mass is zero");
  const double scale = 1.0 / mass;
  for (double& v : samples) v *= scale;

  Measure mu;
  mu.kind_ = Measure::Kind::Grid;
  mu.lo_ = lo;
  mu.hi_ = hi;
  mu.step_ = step;
  mu.density_ = std::move(samples);
  mu.rescale_ = scale;
  return mu;
}

Measure make_atomic_measure(std::vector<Atom> atoms) {
  if (atoms.empty()) throw Error(ErrorCode::MassMismatch, "no atoms");
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.location) || !std::isfinite(a.mass)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite atom");
    }
    if (!(a.mass > 0.0) || a.mass > 1.0 + kMassTolerance) {
      throw Error(ErrorCode::MassMismatch, "atom mass must lie in (0, 1]");
    }
    total += a.mass;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorCode::MassMismatch, "atom masses sum to " + std::to_string(total));
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.location < y.location; });
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (atoms[i].location == atoms[i - 1].location) {
      throw Error(ErrorCode::DuplicateAtom, "duplicate location " + std::to_string(atoms[i].location));
    }
  }
  Measure mu;
  mu.kind_ = Measure::Kind::Atomic;
  mu.atoms_ = std::move(atoms);
  return mu;
}

double moment(const Measure& mu, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "negative moment order");
  if (k > kMaxMomentOrder) throw Error(ErrorCode::OrderTooHigh, "moment order " + std::to_string(k));
  if (k == 0) return 1.0;
  if (mu.is_atomic()) {
    double s = 0.0;
    for (const Atom& a : mu.atoms()) s += a.mass * std::pow(a.location, k);
    return s;
  }
  const auto f = mu.density();
  const std::size_t n = f.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    s += w * f[i] * std::pow(mu.node(i), k);
  }
  return s * mu.step();
}

MomentVector moments(const Measure& mu, int max_order) {
  MomentVector mv;
  mv.values.reserve(static_cast<std::size_t>(std::max(max_order, 0)));
  for (int k = 1; k <= max_order; ++k) mv.values.push_back(moment(mu, k));
  return mv;
}

double mean(const Measure& mu) { return moment(mu, 1); }

double variance(const Measure& mu) {
  const double m1 = moment(mu, 1);
  return moment(mu, 2) - m1 * m1;
}

Measure dilate(const Measure& mu, double c) {
  if (c == 0.0) throw Error(ErrorCode::ZeroScale, "dilation by zero");
  if (c == 1.0) return mu;
  if (mu.is_atomic()) {
    std::vector<Atom> atoms(mu.atoms().begin(), mu.atoms().end());
    for (Atom& a : atoms) a.location *= c;
    return make_atomic_measure(std::move(atoms));
  }
  std::vector<double> f(mu.density().begin(), mu.density().end());
  double lo = c * mu.grid_lo();
  double hi = c * mu.grid_hi();
  if (c < 0.0) {
    std::reverse(f.begin(), f.end());
    std::swap(lo, hi);
  }
  return make_grid_measure(lo, hi, std::move(f));
}

Measure shift(const Measure& mu, double c) {
  if (mu.is_atomic()) {
    std::vector<Atom> atoms(mu.atoms().begin(), mu.atoms().end());
    for (Atom& a : atoms) a.location += c;
    return make_atomic_measure(std::move(atoms));
  }
  std::vector<double> f(mu.density().begin(), mu.density().end());
  return make_grid_measure(mu.grid_lo() + c, mu.grid_hi() + c, std::move(f));
}

namespace {

void require_variance(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "variance must be positive");
}

}  // namespace

// The second antiderivatives are evaluated in extended precision: the hat
// averages are second differences of O(1) values divided by h^2.
using Wide = long double;

Measure semicircle(double var, const GridOptions& opts) {
  require_variance(var);
  const Wide r = 2.0L * std::sqrt(static_cast<Wide>(var));
  const Wide inv_pi = std::numbers::inv_pi_v<Wide>;
  auto anti = [r](Wide x) {
    const Wide q = std::sqrt(std::max(r * r - x * x, Wide(0)));
    return x * std::asin(x / r) + q - q * q * q / (3.0L * r * r);
  };
  const Wide base = anti(-r);
  auto f2 = [&](Wide x) -> Wide {
    if (x <= -r) return 0.0L;
    if (x >= r) return (anti(r) - base) * inv_pi + r + (x - r);
    return 0.5L * (x + r) + (anti(x) - base) * inv_pi;
  };
  return grid_from_second_antiderivative({-2.0 * std::sqrt(var), 2.0 * std::sqrt(var)}, opts, f2);
}

Measure uniform(double var, const GridOptions& opts) {
  require_variance(var);
  const Wide a = std::sqrt(3.0L * static_cast<Wide>(var));
  auto f2 = [a](Wide x) -> Wide {
    if (x <= -a) return 0.0L;
    if (x >= a) return a + (x - a);
    return (x + a) * (x + a) / (4.0L * a);
  };
  const double ad = std::sqrt(3.0 * var);
  return grid_from_second_antiderivative({-ad, ad}, opts, f2);
}

Measure arcsine(double var, const GridOptions& opts) {
  require_variance(var);
  const Wide r = std::sqrt(2.0L * static_cast<Wide>(var));
  const Wide inv_pi = std::numbers::inv_pi_v<Wide>;
  auto f2 = [r, inv_pi](Wide x) -> Wide {
    if (x <= -r) return 0.0L;
    if (x >= r) return r + (x - r);
    return 0.5L * (x + r) + inv_pi * (x * std::asin(x / r) + std::sqrt(std::max(r * r - x * x, Wide(0)))) - 0.5L * r;
  };
  const double rd = std::sqrt(2.0 * var);
  return grid_from_second_antiderivative({-rd, rd}, opts, f2);
}

Measure bernoulli(double var) {
  require_variance(var);
  const double s = std::sqrt(var);
  return make_atomic_measure({{-s, 0.5}, {s, 0.5}});
}

Measure point_mass(double location) { return make_atomic_measure({{location, 1.0}}); }

Measure gaussian_grid(double var, const GridOptions& opts, double half_width_sigmas) {
  require_variance(var);
  const double sigma = std::sqrt(var);
  const double lo = -half_width_sigmas * sigma;
  const double hi = half_width_sigmas * sigma;
  const std::size_t n = opts.n_points;
  if (n < kMinGridPoints) throw Error(ErrorCode::InvalidArgument, "grid needs at least 16 points");
  const double h = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> f(n);
  const double c = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + static_cast<double>(i) * h;
    f[i] = c * std::exp(-0.5 * x * x / var);
  }
  return make_grid_measure(lo, hi, std::move(f));
}

double density_at(const Measure& mu, double x) {
  if (!mu.is_grid()) throw Error(ErrorCode::AtomicUnsupported, "density of an atomic measure");
  if (x < mu.grid_lo() || x > mu.grid_hi()) return 0.0;
  const double u = (x - mu.grid_lo()) / mu.step();
  const auto n = mu.n_points();
  std::size_t i = static_cast<std::size_t>(u);
  if (i >= n - 1) return mu.density()[n - 1];
  const double t = u - static_cast<double>(i);
  return (1.0 - t) * mu.density()[i] + t * mu.density()[i + 1];
}

double l1_distance(const Measure& a, const Measure& b) {
  if (!a.is_grid() || !b.is_grid()) throw Error(ErrorCode::AtomicUnsupported, "L1 distance needs grid measures");
  const double lo = std::min(a.grid_lo(), b.grid_lo());
  const double hi = std::max(a.grid_hi(), b.grid_hi());
  const double h = std::min(a.step(), b.step());
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 1;
  const double step = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    diff[i] = std::abs(density_at(a, x) - density_at(b, x));
  }
  return trapezoid(diff, step);
}

}  // namespace fel
