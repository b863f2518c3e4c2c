#include "fel/cumulants.hpp"

#include <cmath>
#include <string>

#include "fel/error.hpp"

namespace fel {

namespace {

void require_order(std::size_t k) {
  if (k > kMaxCumulantOrder) throw Error(ErrorCode::OrderTooHigh, "order " + std::to_string(k) + " exceeds 16");
}

using Wide = long double;

// [x^d] (sum_{j<=d} m_j x^j)^s with m_0 = 1; only m_1..m_d are read.
Wide power_coefficient(const std::vector<Wide>& m, std::size_t s, std::size_t d) {
  std::vector<Wide> series(d + 1, 0.0);
  series[0] = 1.0;
  for (std::size_t j = 1; j <= d; ++j) series[j] = m[j];
  std::vector<Wide> acc(d + 1, 0.0);
  acc[0] = 1.0;
  std::vector<Wide> next(d + 1);
  for (std::size_t p = 0; p < s; ++p) {
    for (std::size_t i = 0; i <= d; ++i) {
      Wide v = 0.0;
      for (std::size_t j = 0; j <= i; ++j) v += acc[j] * series[i - j];
      next[i] = v;
    }
    acc.swap(next);
  }
  return acc[d];
}

}  // namespace

// m_n = sum_{s=1}^n kappa_s [x^{n-s}] M(x)^s, M the ordinary moment series.
CumulantVector moments_to_free_cumulants(const MomentVector& mv) {
  const std::size_t K = mv.order();
  require_order(K);
  std::vector<Wide> m(K + 1, 0.0);
  m[0] = 1.0;
  for (std::size_t n = 1; n <= K; ++n) m[n] = mv.at(n);
  std::vector<Wide> kappa(K);
  for (std::size_t n = 1; n <= K; ++n) {
    Wide rest = 0.0;
    for (std::size_t s = 1; s < n; ++s) rest += kappa[s - 1] * power_coefficient(m, s, n - s);
    kappa[n - 1] = m[n] - rest;
  }
  return CumulantVector{std::vector<double>(kappa.begin(), kappa.end())};
}

MomentVector free_cumulants_to_moments(const CumulantVector& k) {
  const std::size_t K = k.order();
  require_order(K);
  std::vector<Wide> m(K + 1, 0.0);
  m[0] = 1.0;
  for (std::size_t n = 1; n <= K; ++n) {
    Wide v = k.kappa[n - 1];
    for (std::size_t s = 1; s < n; ++s) v += k.kappa[s - 1] * power_coefficient(m, s, n - s);
    m[n] = v;
  }
  return MomentVector{std::vector<double>(m.begin() + 1, m.end())};
}

MomentVector weighted_sum_moments_oracle(std::span<const MomentVector> moment_vectors, std::span<const double> a,
                                         std::size_t K) {
  require_order(K);
  if (moment_vectors.size() != a.size()) throw Error(ErrorCode::InvalidArgument, "moments and weights differ in length");
  CumulantVector total{std::vector<double>(K, 0.0)};
  for (std::size_t i = 0; i < moment_vectors.size(); ++i) {
    const MomentVector& mv = moment_vectors[i];
    if (mv.order() < K) throw Error(ErrorCode::InvalidArgument, "moment vector shorter than requested order");
    const MomentVector head{std::vector<double>(mv.values.begin(), mv.values.begin() + static_cast<std::ptrdiff_t>(K))};
    const CumulantVector kappa = moments_to_free_cumulants(head);
    double scale = 1.0;
    for (std::size_t n = 1; n <= K; ++n) {
      scale *= a[i];
      total.kappa[n - 1] += scale * kappa.kappa[n - 1];
    }
  }
  return free_cumulants_to_moments(total);
}

}  // namespace fel
