#include "fel/kernels.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <string>

#include "fel/error.hpp"

namespace fel::kernels {

int max_threads() noexcept { return omp_get_max_threads(); }

void configure_threads_from_env() {
  const char* env = std::getenv("FEL_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || n < 1) throw Error(ErrorCode::InvalidArgument, std::string("bad FEL_THREADS: ") + env);
  omp_set_num_threads(static_cast<int>(std::min(n, static_cast<long>(omp_get_num_procs()) * 4)));
}

namespace {

// FFTW planning is not thread-safe; execution with new-array functions is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

std::size_t fft_size(std::size_t n) {
  std::size_t s = 1;
  while (s < n) s <<= 1;
  return s;
}

void check_toeplitz_shape(std::span<const double> kernel, std::span<const double> v, std::span<double> out) {
  if (v.empty() || out.empty() || kernel.size() != out.size() + v.size() - 1) {
    throw Error(ErrorCode::InvalidArgument, "toeplitz kernel length must be rows + cols - 1");
  }
}

}  // namespace

void toeplitz_apply_serial(std::span<const double> kernel, std::span<const double> v, std::span<double> out) {
  check_toeplitz_shape(kernel, v, out);
  const std::size_t cols = v.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += kernel[i + cols - 1 - j] * v[j];
    out[i] = s;
  }
}

void toeplitz_apply_parallel(std::span<const double> kernel, std::span<const double> v, std::span<double> out) {
  check_toeplitz_shape(kernel, v, out);
  const std::size_t cols = v.size();
  const auto rows = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double* k = kernel.data() + i + cols - 1;
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += k[-static_cast<std::ptrdiff_t>(j)] * v[j];
    out[i] = s;
  }
}

std::vector<double> convolve_serial(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> convolve_fft(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t n_out = a.size() + b.size() - 1;
  const std::size_t n = fft_size(n_out);
  const std::size_t nc = n / 2 + 1;

  double* ra = fftw_alloc_real(n);
  double* rb = fftw_alloc_real(n);
  fftw_complex* ca = fftw_alloc_complex(nc);
  fftw_complex* cb = fftw_alloc_complex(nc);
  std::fill(ra, ra + n, 0.0);
  std::fill(rb, rb + n, 0.0);
  std::copy(a.begin(), a.end(), ra);
  std::copy(b.begin(), b.end(), rb);

  fftw_plan fwd_a, fwd_b, inv;
  {
    std::lock_guard lock(fftw_mutex());
    fwd_a = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra, ca, FFTW_ESTIMATE);
    fwd_b = fftw_plan_dft_r2c_1d(static_cast<int>(n), rb, cb, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), ca, ra, FFTW_ESTIMATE);
  }
  fftw_execute(fwd_a);
  fftw_execute(fwd_b);
  for (std::size_t k = 0; k < nc; ++k) {
    const double re = ca[k][0] * cb[k][0] - ca[k][1] * cb[k][1];
    const double im = ca[k][0] * cb[k][1] + ca[k][1] * cb[k][0];
    ca[k][0] = re;
    ca[k][1] = im;
  }
  fftw_execute(inv);

  std::vector<double> out(ra, ra + n_out);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& x : out) x *= scale;
  {
    std::lock_guard lock(fftw_mutex());
    fftw_destroy_plan(fwd_a);
    fftw_destroy_plan(fwd_b);
    fftw_destroy_plan(inv);
  }
  fftw_free(ra);
  fftw_free(rb);
  fftw_free(ca);
  fftw_free(cb);
  return out;
}

void toeplitz_apply_fft(std::span<const double> kernel, std::span<const double> v, std::span<double> out) {
  check_toeplitz_shape(kernel, v, out);
  const auto full = convolve_fft(kernel, v);
  const std::size_t cols = v.size();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = full[i + cols - 1];
}

void toeplitz_apply(std::span<const double> kernel, std::span<const double> v, std::span<double> out) {
  if (out.size() * v.size() > (1u << 16)) {
    toeplitz_apply_fft(kernel, v, out);
  } else {
    toeplitz_apply_serial(kernel, v, out);
  }
}

namespace {

// Principal complex logarithm without the overflow-safe hypot of std::log;
// the arguments here are cell offsets of moderate size.
inline Complex fast_log(Complex w) noexcept {
  return {0.5 * std::log(std::norm(w)), std::atan2(w.imag(), w.real())};
}

}  // namespace

CauchyJet cauchy_cells(std::span<const double> f, double lo, double step, std::size_t c_begin, std::size_t c_end,
                       Complex z) noexcept {
  if (c_begin >= c_end) return {Complex(0.0), Complex(0.0)};
  const double inv_h = 1.0 / step;
  Complex zeta = (z - (lo + static_cast<double>(c_begin) * step)) * inv_h;
  Complex log_zeta = fast_log(zeta);
  Complex value(0.0);
  Complex deriv(0.0);
  for (std::size_t c = c_begin; c < c_end; ++c) {
    const double a = f[c];
    const double b = f[c + 1];
    const Complex zeta_next = zeta - 1.0;
    const Complex log_next = fast_log(zeta_next);
    const Complex ell = log_zeta - log_next;
    value += (a + (b - a) * zeta) * ell;
    deriv += (b - a) * ell;
    zeta = zeta_next;
    log_zeta = log_next;
  }
  // telescoped pieces: sum (a - b) and sum (a/zeta_c - b/zeta_{c+1})
  const Complex zeta0 = (z - (lo + static_cast<double>(c_begin) * step)) * inv_h;
  value += f[c_begin] - f[c_end];
  deriv += f[c_begin] / zeta0 - f[c_end] / zeta;
  return {value, deriv * inv_h};
}

void cauchy_batch_serial(std::span<const double> f, double lo, double step, std::span<const Complex> z,
                         std::span<CauchyJet> out) {
  if (z.size() != out.size()) throw Error(ErrorCode::InvalidArgument, "output size mismatch");
  const std::size_t cells = f.size() - 1;
  for (std::size_t k = 0; k < z.size(); ++k) out[k] = cauchy_cells(f, lo, step, 0, cells, z[k]);
}

void cauchy_batch_parallel(std::span<const double> f, double lo, double step, std::span<const Complex> z,
                           std::span<CauchyJet> out) {
  if (z.size() != out.size()) throw Error(ErrorCode::InvalidArgument, "output size mismatch");
  const std::size_t cells = f.size() - 1;
  const auto n = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = cauchy_cells(f, lo, step, 0, cells, z[static_cast<std::size_t>(k)]);
  }
}

double hilbert_ramp_left(long m) noexcept {
  if (m == 0 || m == 1) return 1.0;
  const double x = static_cast<double>(m);
  if (std::abs(m) >= 16) {
    double s = 0.0;
    double p = 1.0 / x;
    for (int k = 1; k <= 16; ++k) {
      s += p / (k * (k + 1.0));
      p /= x;
    }
    return s;
  }
  return 1.0 - (1.0 - x) * std::log1p(-1.0 / x);
}

double hilbert_ramp_right(long m) noexcept {
  if (m == 0 || m == 1) return -1.0;
  const double x = static_cast<double>(m);
  if (std::abs(m) >= 16) {
    double s = 0.0;
    double p = 1.0 / x;
    for (int k = 1; k <= 16; ++k) {
      s += p / (k + 1.0);
      p /= x;
    }
    return s;
  }
  return -x * std::log1p(-1.0 / x) - 1.0;
}

namespace {

using Poly = std::array<long double, 8>;  // coefficients in s, degree <= 7

long double binom(int n, int k) {
  long double r = 1.0L;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Weight w(s) = int A(u) B(u - s) du on the two halves s in [-1, 0] and [0, 1].
void ramp_weights(bool left_a, bool left_b, Poly& neg, Poly& pos) {
  const long double a0 = left_a ? 1.0L : 0.0L;
  const long double a1 = left_a ? -1.0L : 1.0L;
  const long double b0 = left_b ? 1.0L : 0.0L;
  const long double b1 = left_b ? -1.0L : 1.0L;
  // integrand in u: c0(s) + c1(s) u + c2 u^2, each c_k linear in s
  const std::array<std::array<long double, 2>, 3> c = {{
      {a0 * b0, -a0 * b1},
      {a0 * b1 + a1 * b0, -a1 * b1},
      {a1 * b1, 0.0L},
  }};
  neg.fill(0.0L);
  pos.fill(0.0L);
  for (int k = 0; k < 3; ++k) {
    const long double inv = 1.0L / (k + 1);
    // s in [0,1]: int_s^1 u^k du = (1 - s^{k+1}) / (k+1)
    // s in [-1,0]: int_0^{1+s} u^k du = (1+s)^{k+1} / (k+1)
    for (int e = 0; e < 2; ++e) {
      const long double ce = c[k][e] * inv;
      if (ce == 0.0L) continue;
      pos[e] += ce;
      pos[e + k + 1] -= ce;
      for (int j = 0; j <= k + 1; ++j) neg[e + j] += ce * binom(k + 1, j);
    }
  }
}

// Antiderivative of y^i log|y|, vanishing at y = 0.
long double ylog_anti(int i, long double y) {
  if (y == 0.0L) return 0.0L;
  const long double p = std::pow(y, i + 1) / (i + 1);
  return p * (std::log(std::abs(y)) - 1.0L / (i + 1));
}

// int_{s0}^{s1} poly(s) log|m + s| ds, exact.
long double poly_log_exact(const Poly& poly, long double m, long double s0, long double s1) {
  long double total = 0.0L;
  for (int j = 0; j < static_cast<int>(poly.size()); ++j) {
    if (poly[j] == 0.0L) continue;
    long double term = 0.0L;
    for (int i = 0; i <= j; ++i) {
      const long double coeff = binom(j, i) * std::pow(-m, j - i);
      term += coeff * (ylog_anti(i, m + s1) - ylog_anti(i, m + s0));
    }
    total += poly[j] * term;
  }
  return total;
}

// int_{s0}^{s1} s^k ds
long double mono_int(int k, long double s0, long double s1) {
  return (std::pow(s1, k + 1) - std::pow(s0, k + 1)) / (k + 1);
}

constexpr int kSeriesTerms = 24;

// Moments int w(s) s^k ds of the piecewise weight on [-1, 1].
using WeightMoments = std::array<long double, kSeriesTerms + 1>;

WeightMoments weight_moments(const Poly& neg, const Poly& pos) {
  WeightMoments mu{};
  for (int k = 0; k <= kSeriesTerms; ++k) {
    for (int j = 0; j < static_cast<int>(neg.size()); ++j) {
      mu[k] += neg[j] * mono_int(j + k, -1.0L, 0.0L) + pos[j] * mono_int(j + k, 0.0L, 1.0L);
    }
  }
  return mu;
}

// Far-field expansion log|m + s| = log|m| + sum_k (-1)^{k+1} (s/m)^k / k.
long double log_series(const WeightMoments& mu, long double m) {
  const long double x = -1.0L / m;
  long double acc = 0.0L;
  for (int k = kSeriesTerms; k >= 1; --k) acc = acc * x - mu[k] / k;
  return mu[0] * std::log(std::abs(m)) + acc * x;
}

const WeightMoments& cached_moments(bool left_a, bool left_b) {
  static const std::array<WeightMoments, 4> table = [] {
    std::array<WeightMoments, 4> t{};
    for (int c = 0; c < 4; ++c) {
      Poly neg, pos;
      ramp_weights(c & 2, c & 1, neg, pos);
      t[c] = weight_moments(neg, pos);
    }
    return t;
  }();
  return table[(left_a ? 2 : 0) + (left_b ? 1 : 0)];
}

}  // namespace

double log_ramp_kernel(long m, bool left_a, bool left_b) noexcept {
  const auto mm = static_cast<long double>(m);
  if (std::abs(m) > 24) return static_cast<double>(log_series(cached_moments(left_a, left_b), mm));
  Poly neg, pos;
  ramp_weights(left_a, left_b, neg, pos);
  return static_cast<double>(poly_log_exact(neg, mm, -1.0L, 0.0L) + poly_log_exact(pos, mm, 0.0L, 1.0L));
}

}  // namespace fel::kernels
