#pragma once

// Data-parallel inner loops. Each kernel has a serial reference version that
// the tests compare against and a parallel (OpenMP or FFT) version used by the
// library. bench/ times them against each other.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fel {

using Complex = std::complex<double>;

struct CauchyJet {
  Complex value;
  Complex derivative;
};

namespace kernels {

/// Number of threads the parallel kernels may use (FEL_THREADS caps it).
int max_threads() noexcept;
/// Reads FEL_THREADS and applies it to the OpenMP runtime.
void configure_threads_from_env();

/// Toeplitz product out[i] = sum_j kernel[i - j + cols - 1] * v[j] with
/// i < rows and j < cols; `kernel` has rows + cols - 1 entries.
void toeplitz_apply_serial(std::span<const double> kernel, std::span<const double> v, std::span<double> out);
void toeplitz_apply_parallel(std::span<const double> kernel, std::span<const double> v, std::span<double> out);
void toeplitz_apply_fft(std::span<const double> kernel, std::span<const double> v, std::span<double> out);
/// Picks the FFT path for large problems and the direct loop otherwise.
void toeplitz_apply(std::span<const double> kernel, std::span<const double> v, std::span<double> out);

/// Full linear convolution out[k] = sum_i a[i] b[k - i], size |a| + |b| - 1.
std::vector<double> convolve_serial(std::span<const double> a, std::span<const double> b);
std::vector<double> convolve_fft(std::span<const double> a, std::span<const double> b);

/// Cauchy transform (value and derivative) of the piecewise-linear density
/// with node values f on lo + i*step, summed exactly over the cells
/// [c_begin, c_end). Im z > 0 is assumed.
CauchyJet cauchy_cells(std::span<const double> f, double lo, double step, std::size_t c_begin,
                       std::size_t c_end, Complex z) noexcept;

/// Exact Cauchy transform of a piecewise-linear density at many points.
void cauchy_batch_serial(std::span<const double> f, double lo, double step, std::span<const Complex> z,
                         std::span<CauchyJet> out);
void cauchy_batch_parallel(std::span<const double> f, double lo, double step, std::span<const Complex> z,
                           std::span<CauchyJet> out);

/// Principal-value kernels of a linear ramp over one cell, seen from a node
/// at integer offset m (finite parts at the two singular offsets):
/// left(m) = pv int_0^1 (1-u)/(m-u) du, right(m) = pv int_0^1 u/(m-u) du.
double hilbert_ramp_left(long m) noexcept;
double hilbert_ramp_right(long m) noexcept;

/// Log-interaction of two linear ramps in cells m apart, in cell units:
/// int_0^1 int_0^1 A(u) B(v) log|m + u - v| du dv for A, B in {1-u, u}.
/// `left_a`/`left_b` select the 1-u ramp.
double log_ramp_kernel(long m, bool left_a, bool left_b) noexcept;

}  // namespace kernels
}  // namespace fel
