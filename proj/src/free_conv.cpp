#include "fel/free_conv.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>

#include "fel/error.hpp"

namespace fel {

void validate(const SubordinationConfig& cfg) {
  if (cfg.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be positive");
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) throw Error(ErrorCode::InvalidArgument, "damping must lie in (0, 1]");
  if (cfg.n_points < kMinGridPoints) throw Error(ErrorCode::InvalidArgument, "n_points must be at least 16");
}

namespace {

struct MapValue {
  Complex T;     // T(w; z)
  Complex dT;    // dT/dw
  Complex dTdz;  // dT/dz
  CauchyJet g;   // G_mu(w) and its derivative
};

// w = z + h_nu(z + h_mu(w)) with h = 1/G - id.
struct PairMap {
  CauchyEvaluator mu;
  CauchyEvaluator nu;

  MapValue operator()(Complex w, Complex z) const {
    const CauchyJet gm = mu.jet(w);
    const Complex fm = 1.0 / gm.value;
    const Complex hm = fm - w;
    const Complex dhm = -gm.derivative * fm * fm - 1.0;
    const Complex u = z + hm;
    const CauchyJet gn = nu.jet(u);
    const Complex fn = 1.0 / gn.value;
    const Complex dhn = -gn.derivative * fn * fn - 1.0;
    return {z + fn - u, dhn * dhm, 1.0 + dhn, gm};
  }
};

// w = z - t G_mu(w)
struct SemicircleMap {
  CauchyEvaluator mu;
  double t;

  MapValue operator()(Complex w, Complex z) const {
    const CauchyJet gm = mu.jet(w);
    return {z - t * gm.value, -t * gm.derivative, Complex(1.0), gm};
  }
};

struct Solution {
  Complex w;
  CauchyJet g;        // transform of the sum at z
  Complex dw;         // derivative of the subordination function
};

template <class Map>
bool newton_solve(const Map& map, Complex z, Complex& w, MapValue& m, const SubordinationConfig& cfg) {
  m = map(w, z);
  double r = std::abs(m.T - w);
  for (int it = 0; it < cfg.max_iter && r > cfg.tol; ++it) {
    bool accepted = false;
    const Complex denom = m.dT - 1.0;
    if (std::abs(denom) > 0.0) {
      Complex step = -(m.T - w) / denom;
      for (int half = 0; half < 4 && !accepted; ++half, step *= 0.5) {
        const Complex wn = w + step;
        if (!(wn.imag() > 0.0) || !std::isfinite(wn.real())) continue;
        const MapValue mn = map(wn, z);
        const double rn = std::abs(mn.T - wn);
        if (rn < r) {
          w = wn;
          m = mn;
          r = rn;
          accepted = true;
        }
      }
    }
    if (!accepted) {
      const Complex wn = (1.0 - cfg.damping) * w + cfg.damping * m.T;
      if (!(wn.imag() > 0.0)) return false;
      w = wn;
      m = map(w, z);
      r = std::abs(m.T - w);
    }
  }
  return r <= cfg.tol;
}

template <class Map>
Solution finish(const MapValue& m, Complex w) {
  const Complex dw = m.dTdz / (1.0 - m.dT);
  return {w, {m.g.value, m.g.derivative * dw}, dw};
}

// Continuation in Im z from a height where w = z is a good start.
template <class Map>
bool cold_solve(const Map& map, Complex z, double start_height, const SubordinationConfig& cfg, Solution& out) {
  double eta = std::max(start_height, z.imag());
  Complex w(z.real(), eta);
  MapValue m;
  while (true) {
    const Complex zl(z.real(), eta);
    if (!newton_solve(map, zl, w, m, cfg)) return false;
    if (eta <= z.imag()) break;
    eta = std::max(0.5 * eta, z.imag());
  }
  out = finish<Map>(m, w);
  return true;
}

template <class Map>
class SubordinatedSource final : public CauchySource {
 public:
  SubordinatedSource(Map map, Interval support, double start_height, double accuracy, SubordinationConfig cfg)
      : map_(std::move(map)), support_(support), start_height_(start_height), accuracy_(accuracy), cfg_(cfg) {}

  CauchyJet jet(Complex z) const override {
    Solution s;
    if (!cold_solve(map_, z, start_height_, cfg_, s)) throw no_convergence(z);
    return s.g;
  }

  void evaluate(std::span<const Complex> z, std::span<Complex> out) const override {
    if (z.size() != out.size()) throw Error(ErrorCode::InvalidArgument, "output size mismatch");
    constexpr std::size_t kChunk = 256;
    const std::size_t n = z.size();
    const auto chunks = static_cast<std::ptrdiff_t>((n + kChunk - 1) / kChunk);
    std::mutex failure_lock;
    bool failed = false;
    Complex failed_at;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < chunks; ++c) {
      const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
      const std::size_t end = std::min(n, begin + kChunk);
      Solution prev;
      bool have_prev = false;
      for (std::size_t k = begin; k < end; ++k) {
        Solution s;
        bool ok = false;
        if (have_prev) {
          const Complex dz = z[k] - z[k - 1];
          if (std::abs(dz) <= 10.0 * z[k].imag()) {
            Complex w = prev.w + prev.dw * dz;
            if (!(w.imag() > 0.0)) w = prev.w;
            MapValue m;
            if (newton_solve(map_, z[k], w, m, cfg_)) {
              s = finish<Map>(m, w);
              ok = true;
            }
          }
        }
        if (!ok) ok = cold_solve(map_, z[k], start_height_, cfg_, s);
        if (!ok) {
          std::lock_guard<std::mutex> lock(failure_lock);
          if (!failed) failed_at = z[k];
          failed = true;
          break;
        }
        out[k] = s.g.value;
        prev = s;
        have_prev = true;
      }
    }
    if (failed) throw no_convergence(failed_at);
  }

  Interval support() const override { return support_; }
  double accuracy() const override { return accuracy_; }

 private:
  Error no_convergence(Complex z) const {
    return Error(ErrorCode::NoConvergence, "subordination did not reach tol " + std::to_string(cfg_.tol) +
                                               " at z = " + std::to_string(z.real()) + " + " +
                                               std::to_string(z.imag()) + "i");
  }

  Map map_;
  Interval support_;
  double start_height_;
  double accuracy_;
  SubordinationConfig cfg_;
};

Interval padded(Interval s) {
  double pad = kDefaultPadFraction * s.width();
  if (!(pad > 0.0)) pad = kDefaultPadFraction;
  return {s.lo - pad, s.hi + pad};
}

Measure invert_onto_support(const CauchyEvaluator& g, const SubordinationConfig& cfg) {
  const Interval window = padded(g.support());
  return stieltjes_invert(g, window.lo, window.hi, cfg.n_points);
}

}  // namespace

CauchyEvaluator free_convolution_transform(const Measure& mu, const Measure& nu, const SubordinationConfig& cfg) {
  validate(cfg);
  const CauchyEvaluator gm = cauchy_transform(mu);
  const CauchyEvaluator gn = cauchy_transform(nu);
  const Interval a = mu.support();
  const Interval b = nu.support();
  const Interval sum{a.lo + b.lo, a.hi + b.hi};
  const double height = std::max(1.0, 2.0 * (sum.width() + std::abs(sum.lo) + std::abs(sum.hi)));
  const double accuracy = gm.accuracy() + gn.accuracy() + cfg.tol;
  return CauchyEvaluator(
      std::make_shared<SubordinatedSource<PairMap>>(PairMap{gm, gn}, sum, height, accuracy, cfg));
}

CauchyEvaluator semicircular_smoothing_transform(const Measure& mu, double t, const SubordinationConfig& cfg) {
  validate(cfg);
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "smoothing time must be positive");
  const CauchyEvaluator gm = cauchy_transform(mu);
  const Interval a = mu.support();
  const double r = 2.0 * std::sqrt(t);
  const Interval sum{a.lo - r, a.hi + r};
  const double height = std::max(1.0, 2.0 * (sum.width() + std::abs(sum.lo) + std::abs(sum.hi)));
  return CauchyEvaluator(std::make_shared<SubordinatedSource<SemicircleMap>>(SemicircleMap{gm, t}, sum, height,
                                                                             gm.accuracy() + cfg.tol, cfg));
}

Measure free_add_convolve(const Measure& mu, const Measure& nu, const SubordinationConfig& cfg) {
  return invert_onto_support(free_convolution_transform(mu, nu, cfg), cfg);
}

Measure semicircular_smooth(const Measure& mu, double t, const SubordinationConfig& cfg) {
  return invert_onto_support(semicircular_smoothing_transform(mu, t, cfg), cfg);
}

Measure weighted_free_sum(std::span<const Measure> mus, std::span<const double> a, const SubordinationConfig& cfg) {
  if (mus.size() != a.size()) throw Error(ErrorCode::InvalidArgument, "measures and weights differ in length");
  if (mus.empty()) throw Error(ErrorCode::InvalidArgument, "empty sum");
  validate(cfg);
  std::optional<Measure> acc;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    if (a[i] == 0.0) continue;
    Measure term = a[i] == 1.0 ? mus[i] : dilate(mus[i], a[i]);
    acc = acc ? free_add_convolve(*acc, term, cfg) : std::move(term);
  }
  if (!acc) throw Error(ErrorCode::InvalidArgument, "all weights are zero");
  return *acc;
}

}  // namespace fel
