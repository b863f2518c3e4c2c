#include "fel/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fel/error.hpp"

namespace fel {

void CauchySource::evaluate(std::span<const Complex> z, std::span<Complex> out) const {
  if (z.size() != out.size()) throw Error(ErrorCode::InvalidArgument, "output size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = value(z[static_cast<std::size_t>(k)]);
  }
}

CauchyEvaluator::CauchyEvaluator(std::shared_ptr<const CauchySource> source) : source_(std::move(source)) {
  if (!source_) throw Error(ErrorCode::InvalidArgument, "null Cauchy source");
}

std::vector<Complex> CauchyEvaluator::evaluate(std::span<const Complex> z) const {
  std::vector<Complex> out(z.size());
  source_->evaluate(z, out);
  return out;
}

namespace {

class ClosedFormSource final : public CauchySource {
 public:
  ClosedFormSource(std::function<Complex(Complex)> g, std::function<Complex(Complex)> dg, Interval support,
                   double accuracy)
      : g_(std::move(g)), dg_(std::move(dg)), support_(support), accuracy_(accuracy) {}

  CauchyJet jet(Complex z) const override {
    if (dg_) return {g_(z), dg_(z)};
    const double d = 1e-5 * (1.0 + std::abs(z));
    return {g_(z), (g_(z + d) - g_(z - d)) / (2.0 * d)};
  }
  Complex value(Complex z) const override { return g_(z); }
  Interval support() const override { return support_; }
  double accuracy() const override { return accuracy_; }

 private:
  std::function<Complex(Complex)> g_;
  std::function<Complex(Complex)> dg_;
  Interval support_;
  double accuracy_;
};

class AtomicSource final : public CauchySource {
 public:
  explicit AtomicSource(const Measure& mu) : atoms_(mu.atoms().begin(), mu.atoms().end()), support_(mu.support()) {}

  CauchyJet jet(Complex z) const override {
    Complex g(0.0), dg(0.0);
    for (const Atom& a : atoms_) {
      const Complex r = 1.0 / (z - a.location);
      g += a.mass * r;
      dg -= a.mass * r * r;
    }
    return {g, dg};
  }
  Interval support() const override { return support_; }
  double accuracy() const override { return 1e-15; }

 private:
  std::vector<Atom> atoms_;
  Interval support_;
};

constexpr int kGaussPoints = 17;

struct GaussRule {
  std::array<double, kGaussPoints> x{};
  std::array<double, kGaussPoints> w{};
};

// Gauss-Legendre nodes on [0, 1] by Newton iteration on P_n.
const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule r;
    const int n = kGaussPoints;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.x[i] = 0.5 * (1.0 - x);
      r.w[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

}  // namespace

CauchyEvaluator CauchyEvaluator::closed_form(std::function<Complex(Complex)> g, Interval support,
                                             std::function<Complex(Complex)> dg, double accuracy) {
  return CauchyEvaluator(std::make_shared<ClosedFormSource>(std::move(g), std::move(dg), support, accuracy));
}

GridCauchyTree::GridCauchyTree(const Measure& mu) {
  if (!mu.is_grid()) throw Error(ErrorCode::AtomicUnsupported, "tree evaluator needs a grid measure");
  f_.assign(mu.density().begin(), mu.density().end());
  lo_ = mu.grid_lo();
  step_ = mu.step();
  support_ = mu.support();
  nodes_.reserve(4 * (f_.size() / kLeafCells + 1));
  build(0, f_.size() - 1);
}

int GridCauchyTree::build(std::size_t c_begin, std::size_t c_end) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Node node;
  node.c_begin = c_begin;
  node.c_end = c_end;
  node.centre = lo_ + 0.5 * static_cast<double>(c_begin + c_end) * step_;
  node.radius = 0.5 * static_cast<double>(c_end - c_begin) * step_;
  bool empty = true;
  for (std::size_t i = c_begin; i <= c_end; ++i) {
    if (f_[i] != 0.0) {
      empty = false;
      break;
    }
  }
  node.empty = empty;
  if (c_end - c_begin <= kLeafCells) {
    if (!empty) leaf_moments(node);
    else node.moments.fill(0.0);
  } else {
    const std::size_t mid = c_begin + (c_end - c_begin) / 2;
    node.left = build(c_begin, mid);
    node.right = build(mid, c_end);
    if (!empty) merge_moments(node);
    else node.moments.fill(0.0);
  }
  nodes_[static_cast<std::size_t>(index)] = node;
  return index;
}

void GridCauchyTree::leaf_moments(Node& node) const {
  const GaussRule& g = gauss_rule();
  node.moments.fill(0.0);
  const double inv_r = 1.0 / node.radius;
  for (std::size_t c = node.c_begin; c < node.c_end; ++c) {
    const double a = f_[c];
    const double b = f_[c + 1];
    if (a == 0.0 && b == 0.0) continue;
    const double x0 = lo_ + static_cast<double>(c) * step_;
    for (int q = 0; q < kGaussPoints; ++q) {
      const double u = g.x[q];
      const double weight = g.w[q] * step_ * (a + (b - a) * u);
      const double tau = (x0 + step_ * u - node.centre) * inv_r;
      double p = weight;
      for (int k = 0; k < kTerms; ++k) {
        node.moments[k] += p;
        p *= tau;
      }
    }
  }
}

void GridCauchyTree::merge_moments(Node& parent) const {
  static const auto binomials = [] {
    std::array<std::array<double, kTerms>, kTerms> b{};
    for (int n = 0; n < kTerms; ++n) {
      b[n][0] = 1.0;
      for (int k = 1; k <= n; ++k) b[n][k] = b[n - 1][k - 1] + (k < n ? b[n - 1][k] : 0.0);
    }
    return b;
  }();
  parent.moments.fill(0.0);
  for (int child_index : {parent.left, parent.right}) {
    const Node& child = nodes_[static_cast<std::size_t>(child_index)];
    if (child.empty) continue;
    const double alpha = child.radius / parent.radius;
    const double beta = (child.centre - parent.centre) / parent.radius;
    std::array<double, kTerms> apow{}, bpow{};
    apow[0] = bpow[0] = 1.0;
    for (int k = 1; k < kTerms; ++k) {
      apow[k] = apow[k - 1] * alpha;
      bpow[k] = bpow[k - 1] * beta;
    }
    for (int p = 0; p < kTerms; ++p) {
      double s = 0.0;
      for (int j = 0; j <= p; ++j) s += binomials[p][j] * apow[j] * bpow[p - j] * child.moments[j];
      parent.moments[p] += s;
    }
  }
}

namespace {

// rho_limit[t] is the largest rho with rho^(t-1) <= 1e-16, so t terms suffice
// for a block seen at ratio rho.
const std::array<double, GridCauchyTree::kTerms + 1>& rho_limits() {
  static const auto table = [] {
    std::array<double, GridCauchyTree::kTerms + 1> t{};
    t[0] = t[1] = 0.0;
    for (int k = 2; k <= GridCauchyTree::kTerms; ++k) t[k] = std::exp(std::log(1e-16) / (k - 1));
    return t;
  }();
  return table;
}

}  // namespace

CauchyJet GridCauchyTree::jet(Complex z) const {
  const auto& limits = rho_limits();
  double v_re = 0.0, v_im = 0.0, d_re = 0.0, d_im = 0.0;
  Complex near_value(0.0), near_deriv(0.0);
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
    if (node.empty) continue;
    const double dx = z.real() - node.centre;
    const double dy = z.imag();
    const double norm = dx * dx + dy * dy;
    const double dist = std::sqrt(norm);
    if (node.radius < kSeparation * dist) {
      const double rho = node.radius / dist;
      int terms = 2;
      while (terms < kTerms && rho > limits[terms]) ++terms;
      // inv = 1/d and q = radius/d in real arithmetic
      const double i_re = dx / norm, i_im = -dy / norm;
      const double q_re = node.radius * i_re, q_im = node.radius * i_im;
      double s0_re = 0.0, s0_im = 0.0, s1_re = 0.0, s1_im = 0.0;
      for (int p = terms - 1; p >= 0; --p) {
        const double m = node.moments[static_cast<std::size_t>(p)];
        const double a = s0_re * q_re - s0_im * q_im + m;
        s0_im = s0_re * q_im + s0_im * q_re;
        s0_re = a;
        const double b = s1_re * q_re - s1_im * q_im + static_cast<double>(p + 1) * m;
        s1_im = s1_re * q_im + s1_im * q_re;
        s1_re = b;
      }
      v_re += s0_re * i_re - s0_im * i_im;
      v_im += s0_re * i_im + s0_im * i_re;
      const double ii_re = i_re * i_re - i_im * i_im, ii_im = 2.0 * i_re * i_im;
      d_re -= s1_re * ii_re - s1_im * ii_im;
      d_im -= s1_re * ii_im + s1_im * ii_re;
    } else if (node.left < 0) {
      const CauchyJet j = kernels::cauchy_cells(f_, lo_, step_, node.c_begin, node.c_end, z);
      near_value += j.value;
      near_deriv += j.derivative;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return {near_value + Complex(v_re, v_im), near_deriv + Complex(d_re, d_im)};
}

void GridCauchyTree::evaluate(std::span<const Complex> z, std::span<Complex> out) const {
  if (z.size() != out.size()) throw Error(ErrorCode::InvalidArgument, "output size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = jet(z[static_cast<std::size_t>(k)]).value;
  }
}

CauchyEvaluator cauchy_transform(const Measure& mu) {
  if (mu.is_atomic()) return CauchyEvaluator(std::make_shared<AtomicSource>(mu));
  return CauchyEvaluator(std::make_shared<GridCauchyTree>(mu));
}

namespace {

// Zeroes negative runs and removes the same mass from the adjacent positive
// samples, so total mass and the location of the mass are preserved.
void absorb_negative_runs(std::vector<double>& f) {
  const std::size_t n = f.size();
  std::size_t i = 0;
  while (i < n) {
    if (f[i] >= 0.0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double deficit = 0.0;
    while (j < n && f[j] < 0.0) {
      deficit -= f[j];
      f[j] = 0.0;
      ++j;
    }
    const double left = i > 0 ? f[i - 1] : -1.0;
    const double right = j < n ? f[j] : -1.0;
    auto drain = [&](std::ptrdiff_t k, std::ptrdiff_t dir) {
      while (deficit > 0.0 && k >= 0 && k < static_cast<std::ptrdiff_t>(n)) {
        double& v = f[static_cast<std::size_t>(k)];
        if (dir > 0 && static_cast<std::size_t>(k) >= i && static_cast<std::size_t>(k) < j) break;
        const double take = std::min(deficit, v);
        v -= take;
        deficit -= take;
        k += dir;
      }
    };
    if (left >= right) {
      drain(static_cast<std::ptrdiff_t>(i) - 1, -1);
      drain(static_cast<std::ptrdiff_t>(j), +1);
    } else {
      drain(static_cast<std::ptrdiff_t>(j), +1);
      drain(static_cast<std::ptrdiff_t>(i) - 1, -1);
    }
    i = j;
  }
}

}  // namespace

Measure stieltjes_invert(const CauchyEvaluator& g, double lo, double hi, std::size_t n_points) {
  if (n_points < kMinGridPoints) throw Error(ErrorCode::InvalidArgument, "inversion needs at least 16 points");
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "inversion window requires lo < hi");
  const Interval sup = g.support();
  const double slack = 1e-12 * (hi - lo);
  if (sup.lo < lo - slack || sup.hi > hi + slack) {
    throw Error(ErrorCode::InvalidArgument, "inversion window does not contain the declared support");
  }
  const std::size_t n = n_points;
  const double h = (hi - lo) / static_cast<double>(n - 1);
  // The lines are sampled kRefine times finer than the output grid and the
  // result is hat-averaged back down; this keeps eps well below h while the
  // samples still resolve the smoothed density.
  constexpr std::size_t kRefine = 4;
  const std::size_t nf = kRefine * (n - 1) + 1;
  const double hf = h / static_cast<double>(kRefine);
  constexpr std::array<double, 3> kEpsFactors = {8.0, 4.0, 2.0};

  std::vector<Complex> z(3 * nf);
  for (std::size_t line = 0; line < 3; ++line) {
    const double eps = kEpsFactors[line] * hf;
    for (std::size_t i = 0; i < nf; ++i) z[line * nf + i] = Complex(lo + static_cast<double>(i) * hf, eps);
  }
  const std::vector<Complex> gz = g.evaluate(z);

  const double eps_min = kEpsFactors[2] * hf;
  double atom_indicator = 0.0;
  for (std::size_t i = 0; i < nf; ++i) {
    atom_indicator = std::max(atom_indicator, eps_min * std::abs(gz[2 * nf + i].imag()));
  }
  if (atom_indicator > 0.05) {
    throw Error(ErrorCode::AtomDetected, "mass concentrates at a point (eps*|Im G| = " +
                                             std::to_string(atom_indicator) + ")");
  }

  // f_eps = f + c1 eps + c2 eps^2 + ...; eliminate the first two orders
  std::vector<double> fine(nf);
  const double inv_pi = std::numbers::inv_pi;
  for (std::size_t i = 0; i < nf; ++i) {
    const double wide = -gz[i].imag() * inv_pi;
    const double mid = -gz[nf + i].imag() * inv_pi;
    const double narrow = -gz[2 * nf + i].imag() * inv_pi;
    fine[i] = (8.0 * narrow - 6.0 * mid + wide) / 3.0;
    if (!std::isfinite(fine[i])) throw Error(ErrorCode::NoConvergence, "non-finite Cauchy transform value");
  }
  absorb_negative_runs(fine);

  std::vector<double> f(n);
  const auto r = static_cast<std::ptrdiff_t>(kRefine);
  const double norm = 1.0 / static_cast<double>(kRefine * kRefine);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::ptrdiff_t>(i * kRefine);
    double acc = 0.0;
    for (std::ptrdiff_t k = -r + 1; k < r; ++k) {
      const std::ptrdiff_t j = c + k;
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(nf)) continue;
      acc += static_cast<double>(r - std::abs(k)) * fine[static_cast<std::size_t>(j)];
    }
    f[i] = acc * norm;
  }

  const double mass = trapezoid(f, h);
  if (!(mass > 0.0)) throw Error(ErrorCode::MassLoss, "inverted density carries no mass");
  const double factor = 1.0 / mass;
  if (factor < 0.99 || factor > 1.01) {
    throw Error(ErrorCode::MassLoss, "renormalisation factor " + std::to_string(factor));
  }
  return make_grid_measure(lo, hi, std::move(f));
}

namespace {

void require_grid(const Measure& mu) {
  if (!mu.is_grid()) throw Error(ErrorCode::AtomicUnsupported, "Hilbert transform of an atomic measure");
}

}  // namespace

GridFunction hilbert_transform(const Measure& mu) {
  require_grid(mu);
  const auto f = mu.density();
  const std::size_t n = f.size();
  const std::size_t cells = n - 1;
  std::vector<double> kl(n + cells - 1), kr(n + cells - 1);
  for (std::size_t idx = 0; idx < kl.size(); ++idx) {
    const long m = static_cast<long>(idx) - static_cast<long>(cells - 1);
    kl[idx] = kernels::hilbert_ramp_left(m);
    kr[idx] = kernels::hilbert_ramp_right(m);
  }
  std::vector<double> left(n), right(n);
  kernels::toeplitz_apply(kl, f.first(cells), left);
  kernels::toeplitz_apply(kr, f.subspan(1), right);
  GridFunction out{mu.grid_lo(), mu.step(), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) out.values[i] = (left[i] + right[i]) * std::numbers::inv_pi;
  return out;
}

GridFunction hilbert_transform_reference(const Measure& mu) {
  require_grid(mu);
  const auto f = mu.density();
  const std::size_t n = f.size();
  GridFunction out{mu.grid_lo(), mu.step(), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c + 1 < n; ++c) {
      const long m = static_cast<long>(i) - static_cast<long>(c);
      s += f[c] * kernels::hilbert_ramp_left(m) + f[c + 1] * kernels::hilbert_ramp_right(m);
    }
    out.values[i] = s * std::numbers::inv_pi;
  }
  return out;
}

}  // namespace fel
