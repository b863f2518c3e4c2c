#include "fel/rmt_oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "fel/error.hpp"

namespace fel {

namespace {

using CMatrix = Eigen::MatrixXcd;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CMatrix haar_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix g(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) g(i, j) = {normal(rng), normal(rng)};
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const std::complex<double> d = r(j, j);
    const double m = std::abs(d);
    q.col(j) *= m > 0.0 ? d / m : std::complex<double>(1.0);
  }
  return q;
}

// Re Tr(A B) for Hermitian A, B.
double trace_product(const CMatrix& a, const CMatrix& b) {
  return (a.cwiseProduct(b.transpose())).sum().real();
}

}  // namespace

std::vector<double> diagonal_realization(const Measure& mu, int dim) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(dim));
  if (mu.is_atomic()) {
    const auto atoms = mu.atoms();
    // largest-remainder rounding of mass * dim
    std::vector<int> count(atoms.size());
    std::vector<std::pair<double, std::size_t>> remainder;
    int used = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double exact = atoms[i].mass * dim;
      count[i] = static_cast<int>(std::floor(exact));
      used += count[i];
      remainder.emplace_back(exact - count[i], i);
    }
    std::stable_sort(remainder.begin(), remainder.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (std::size_t r = 0; used < dim; ++r, ++used) ++count[remainder[r].second];
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (count[i] == 0) {
        throw Error(ErrorCode::UnrealizableSpec, "atom at " + std::to_string(atoms[i].location) +
                                                     " has no diagonal entry at dim " + std::to_string(dim));
      }
      out.insert(out.end(), static_cast<std::size_t>(count[i]), atoms[i].location);
    }
    return out;
  }
  const auto f = mu.density();
  const double h = mu.step();
  std::size_t cell = 0;
  double below = 0.0;  // mass left of the current cell
  for (int i = 0; i < dim; ++i) {
    const double q = (i + 0.5) / dim;
    double cell_mass = 0.5 * h * (f[cell] + f[cell + 1]);
    while (below + cell_mass < q && cell + 2 < f.size()) {
      below += cell_mass;
      ++cell;
      cell_mass = 0.5 * h * (f[cell] + f[cell + 1]);
    }
    // solve a u + (b - a) u^2 / 2 = (q - below) / h for u in [0, 1]
    const double a = f[cell];
    const double b = f[cell + 1];
    const double r = std::clamp((q - below) / h, 0.0, 0.5 * (a + b));
    double u;
    const double c = b - a;
    if (std::abs(c) < 1e-14 * std::max(a, b)) {
      u = a > 0.0 ? r / a : 0.5;
    } else {
      u = 2.0 * r / (a + std::sqrt(std::max(0.0, a * a + 2.0 * c * r)));
    }
    out.push_back(mu.node(cell) + std::clamp(u, 0.0, 1.0) * h);
  }
  return out;
}

std::vector<MomentEstimate> sample_free_sum_moments(std::span<const Measure> specs, std::span<const double> a,
                                                    int dim, int trials, int max_order, std::uint64_t seed) {
  if (dim < 64) throw Error(ErrorCode::DimensionTooSmall, "dim must be at least 64");
  if (trials < 8) throw Error(ErrorCode::InvalidArgument, "need at least 8 trials");
  if (max_order < 1) throw Error(ErrorCode::InvalidArgument, "max_order must be positive");
  if (max_order > 8) throw Error(ErrorCode::OrderTooHigh, "max_order exceeds 8");
  if (specs.empty() || specs.size() != a.size()) throw Error(ErrorCode::InvalidArgument, "one weight per spec");

  std::vector<Eigen::VectorXd> diagonals;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const std::vector<double> d = diagonal_realization(specs[i], dim);
    diagonals.push_back(a[i] * Eigen::Map<const Eigen::VectorXd>(d.data(), dim));
  }

  std::vector<std::vector<double>> samples(static_cast<std::size_t>(trials),
                                           std::vector<double>(static_cast<std::size_t>(max_order)));
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(splitmix64(seed + splitmix64(static_cast<std::uint64_t>(t))));
    CMatrix m = CMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < diagonals.size(); ++i) {
      // the first term is left unrotated; conjugating the sum by its rotation changes no trace
      if (i == 0) {
        m.diagonal() += diagonals[i].cast<std::complex<double>>();
        continue;
      }
      const CMatrix u = haar_unitary(dim, rng);
      m.noalias() += (u * diagonals[i].cast<std::complex<double>>().asDiagonal()) * u.adjoint();
    }
    m = 0.5 * (m + m.adjoint()).eval();
    std::vector<double>& s = samples[static_cast<std::size_t>(t)];
    const double inv = 1.0 / dim;
    s[0] = m.trace().real() * inv;
    if (max_order >= 2) {
      const CMatrix m2 = m * m;
      s[1] = m2.trace().real() * inv;
      if (max_order >= 3) s[2] = trace_product(m2, m) * inv;
      if (max_order >= 4) s[3] = trace_product(m2, m2) * inv;
      if (max_order >= 5) {
        const CMatrix m3 = m2 * m;
        s[4] = trace_product(m3, m2) * inv;
        if (max_order >= 6) s[5] = trace_product(m3, m3) * inv;
        if (max_order >= 7) {
          const CMatrix m4 = m2 * m2;
          s[6] = trace_product(m4, m3) * inv;
          if (max_order >= 8) s[7] = trace_product(m4, m4) * inv;
        }
      }
    }
  }

  std::vector<MomentEstimate> out;
  for (int k = 1; k <= max_order; ++k) {
    double sum = 0.0;
    for (const auto& s : samples) sum += s[static_cast<std::size_t>(k - 1)];
    const double avg = sum / trials;
    double ss = 0.0;
    for (const auto& s : samples) {
      const double d = s[static_cast<std::size_t>(k - 1)] - avg;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (trials - 1));
    out.push_back({k, avg, sd / std::sqrt(static_cast<double>(trials)), trials, dim});
  }
  return out;
}

}  // namespace fel
