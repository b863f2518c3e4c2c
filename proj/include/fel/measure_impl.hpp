#pragma once

#include <cmath>

#include "fel/error.hpp"

namespace fel {

template <class F2>
Measure grid_from_second_antiderivative(Interval window, const GridOptions& opts, F2 f2) {
  if (opts.n_points < kMinGridPoints) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least 16 points");
  }
  const double pad = opts.pad_fraction * window.width();
  const double lo = window.lo - pad;
  const double hi = window.hi + pad;
  const std::size_t n = opts.n_points;
  const double h = (hi - lo) / static_cast<double>(n - 1);
  using R = decltype(f2(0.0L));
  const R hw = static_cast<R>(h);
  std::vector<R> anti(n + 2);
  for (std::size_t i = 0; i < n + 2; ++i) {
    anti[i] = f2(static_cast<R>(lo) + (static_cast<R>(i) - 1) * hw);
  }
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + static_cast<double>(i) * h;
    // the hat around x misses the support entirely
    if (x + h <= window.lo || x - h >= window.hi) {
      samples[i] = 0.0;
      continue;
    }
    const R d = (anti[i + 2] - 2 * anti[i + 1] + anti[i]) / (hw * hw);
    samples[i] = d > 0 ? static_cast<double>(d) : 0.0;
  }
  return make_grid_measure(lo, hi, std::move(samples));
}

}  // namespace fel
