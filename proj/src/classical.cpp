#include "fel/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fel/entropy.hpp"
#include "fel/error.hpp"
#include "fel/kernels.hpp"

namespace fel {

namespace {

void require_density(const ClassicalDensity& f) {
  if (!f.is_grid()) throw Error(ErrorCode::AtomicUnsupported, "classical routines need a density");
}

// Samples of the interpolant on lo + i*h, continued past hi by zero.
std::vector<double> resample(const ClassicalDensity& f, double h) {
  if (f.step() == h) return {f.density().begin(), f.density().end()};
  const auto n = static_cast<std::size_t>(std::ceil((f.grid_hi() - f.grid_lo()) / h - 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = density_at(f, f.grid_lo() + static_cast<double>(i) * h);
  return out;
}

double poly_eval(std::span<const double> c, double x) {
  double p = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) p = p * x + c[k];
  return p;
}

double poly_derivative(std::span<const double> c, double x) {
  double p = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) p = p * x + static_cast<double>(k) * c[k];
  return p;
}

ClassicalDensity convolve_on_step(const ClassicalDensity& f, const ClassicalDensity& g, double h) {
  const std::vector<double> a = resample(f, h);
  const std::vector<double> b = resample(g, h);
  const std::vector<double> c = kernels::convolve_fft(a, b);
  const std::size_t n = c.size();
  // exact convolution of two piecewise-linear functions at the nodes
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double left = k > 0 ? c[k - 1] : 0.0;
    const double right = k + 1 < n ? c[k + 1] : 0.0;
    out[k] = std::max(0.0, h * (4.0 * c[k] + left + right) / 6.0);
  }
  const double lo = f.grid_lo() + g.grid_lo();
  return make_grid_measure(lo, lo + static_cast<double>(n - 1) * h, std::move(out));
}

}  // namespace

ClassicalDensity classical_convolve(const ClassicalDensity& f, const ClassicalDensity& g) {
  require_density(f);
  require_density(g);
  return convolve_on_step(f, g, std::min(f.step(), g.step()));
}

ClassicalDensity gaussian_smooth(const ClassicalDensity& f, double t) {
  require_density(f);
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "smoothing variance must be positive");
  const double sigma = std::sqrt(t);
  const double h = std::min(f.step(), sigma / 8.0);
  const double half = 10.0 * sigma;
  const auto m = static_cast<std::size_t>(std::ceil(half / h));
  std::vector<double> kernel(2 * m + 1);
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    const double x = (static_cast<double>(i) - static_cast<double>(m)) * h;
    kernel[i] = std::exp(-0.5 * x * x / t);
  }
  const double reach = static_cast<double>(m) * h;
  const ClassicalDensity g = make_grid_measure(-reach, reach, std::move(kernel));
  return convolve_on_step(f, g, h);
}

ClassicalScore classical_score(const ClassicalDensity& f) {
  require_density(f);
  const auto d = f.density();
  const std::size_t n = d.size();
  std::size_t best_begin = 0, best_len = 0;
  std::size_t run_begin = 0, run_len = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i] > kScoreThreshold) {
      if (run_len == 0) run_begin = i;
      ++run_len;
      if (run_len > best_len) {
        best_len = run_len;
        best_begin = run_begin;
      }
    } else {
      run_len = 0;
    }
  }
  if (best_len < 2) throw Error(ErrorCode::DensityTooSmall, "density exceeds the score threshold nowhere");
  ClassicalScore s;
  s.first_node = best_begin;
  s.j.lo = f.node(best_begin);
  s.j.step = f.step();
  s.j.values.resize(best_len);
  const double inv = 0.5 / f.step();
  for (std::size_t k = 0; k < best_len; ++k) {
    const std::size_t i = best_begin + k;
    s.j.values[k] = (d[i + 1] - d[i - 1]) * inv / d[i];
  }
  s.truncated_mass = std::max(0.0, 1.0 - trapezoid(d.subspan(best_begin, best_len), f.step()));
  return s;
}

ClassicalFisher classical_fisher(const ClassicalDensity& f) {
  const ClassicalScore s = classical_score(f);
  const auto d = f.density();
  std::vector<double> w(s.j.values.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = s.j.values[k] * s.j.values[k] * d[s.first_node + k];
  return {trapezoid(w, f.step()), s.truncated_mass};
}

double shannon_entropy(const ClassicalDensity& f) {
  require_density(f);
  auto phi = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
  const auto d = f.density();
  double s = 0.0;
  for (std::size_t c = 0; c + 1 < d.size(); ++c) {
    s += phi(d[c]) + 4.0 * phi(0.5 * (d[c] + d[c + 1])) + phi(d[c + 1]);
  }
  return -s * f.step() / 6.0;
}

double score_relation_residual(const ClassicalDensity& f, std::span<const double> poly_coeffs, double sign) {
  if (poly_coeffs.size() > 7) throw Error(ErrorCode::InvalidArgument, "polynomial degree exceeds 6");
  const ClassicalScore s = classical_score(f);
  const auto d = f.density();
  std::vector<double> w(s.j.values.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const std::size_t i = s.first_node + k;
    w[k] = s.j.values[k] * poly_eval(poly_coeffs, f.node(i)) * d[i];
  }
  const double lhs = trapezoid(w, f.step());
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) v[i] = poly_derivative(poly_coeffs, f.node(i)) * d[i];
  const double rhs = trapezoid(v, f.step());
  return std::abs(lhs - sign * rhs);
}

ClassicalMonotonicity check_classical_monotonicity(const ClassicalDensity& f, int n_max, double tol,
                                                   double bound_tol) {
  require_density(f);
  if (n_max < 2 || n_max > 12) throw Error(ErrorCode::InvalidArgument, "n_max must lie in [2, 12]");
  ClassicalMonotonicity out;
  std::vector<double> values;
  ClassicalDensity sum = f;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) sum = classical_convolve(sum, f);
    const double h = shannon_entropy(dilate(sum, 1.0 / std::sqrt(static_cast<double>(n))));
    out.entropy.emplace_back(n, h);
    values.push_back(h);
  }
  out.report = sequence_report("classical_monotonicity", values, kSemicircleChi, tol, bound_tol);
  out.report.inputs_digest["density"] = describe(f);
  return out;
}

}  // namespace fel
