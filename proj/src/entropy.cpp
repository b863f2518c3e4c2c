#include "fel/entropy.hpp"

#include <exception>
#include <string>

#include "fel/error.hpp"
#include "fel/kernels.hpp"

namespace fel {

std::string_view to_string(ChiMethod m) noexcept {
  switch (m) {
    case ChiMethod::LogEnergy: return "LogEnergy";
    case ChiMethod::FisherFlow: return "FisherFlow";
  }
  return "Unknown";
}

void validate(const FlowQuadratureConfig& cfg) {
  if (!(cfg.t_cut >= 10.0)) throw Error(ErrorCode::InvalidArgument, "t_cut must be at least 10");
  if (cfg.n_t < 20) throw Error(ErrorCode::InvalidArgument, "n_t must be at least 20");
  if (!(cfg.t_min > 0.0 && cfg.t_min < cfg.t_cut)) throw Error(ErrorCode::InvalidArgument, "t_min must lie in (0, t_cut)");
  validate(cfg.sub);
}

namespace {

void require_grid(const Measure& mu, const char* what) {
  if (!mu.is_grid()) throw Error(ErrorCode::AtomicUnsupported, std::string(what) + " of an atomic measure");
}

double quadratic_form(std::span<const double> x, std::span<const double> kernel, std::span<const double> y) {
  std::vector<double> ky(x.size());
  kernels::toeplitz_apply(kernel, y, ky);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * ky[i];
  return s;
}

double grid_log_energy(std::span<const double> f, double step) {
  const std::size_t cells = f.size() - 1;
  const std::size_t len = 2 * cells - 1;
  std::vector<double> kll(len), klr(len), krr(len);
  for (std::size_t i = 0; i < len; ++i) {
    const long m = static_cast<long>(i) - static_cast<long>(cells - 1);
    kll[i] = kernels::log_ramp_kernel(m, true, true);
    klr[i] = kernels::log_ramp_kernel(m, true, false);
    krr[i] = kernels::log_ramp_kernel(m, false, false);
  }
  const auto a = f.first(cells);
  const auto b = f.subspan(1);
  const double mass = trapezoid(f, step);
  const double cell_sum = quadratic_form(a, kll, a) + 2.0 * quadratic_form(a, klr, b) + quadratic_form(b, krr, b);
  return mass * mass * std::log(step) + step * step * cell_sum;
}

}  // namespace

double log_energy(const Measure& mu) {
  if (mu.is_atomic()) return -std::numeric_limits<double>::infinity();
  return grid_log_energy(mu.density(), mu.step());
}

ChiValue chi_log_energy(const Measure& mu) {
  if (mu.is_atomic()) return {-std::numeric_limits<double>::infinity(), ChiMethod::LogEnergy, 0.0};
  const double energy = log_energy(mu);
  // the same functional on every other node bounds the discretisation error
  const auto f = mu.density();
  std::vector<double> coarse;
  coarse.reserve(f.size() / 2 + 1);
  for (std::size_t i = 0; i < f.size(); i += 2) coarse.push_back(f[i]);
  double error = 0.0;
  if (coarse.size() >= kMinGridPoints) {
    const double step = 2.0 * mu.step();
    const double mass = trapezoid(coarse, step);
    if (mass > 0.0) {
      for (double& v : coarse) v /= mass;
      error = std::abs(grid_log_energy(coarse, step) - energy);
    }
  }
  return {energy + kChiOffset, ChiMethod::LogEnergy, error};
}

double fisher_from_density(const Measure& mu) {
  if (mu.is_atomic()) return std::numeric_limits<double>::infinity();
  const auto f = mu.density();
  double s = 0.0;
  for (std::size_t c = 0; c + 1 < f.size(); ++c) {
    const double a = f[c];
    const double b = f[c + 1];
    s += (a * a + b * b) * (a + b);
  }
  return kFisherConstant * 0.25 * mu.step() * s;
}

GridFunction conjugate_variable(const Measure& mu) {
  require_grid(mu, "conjugate variable");
  GridFunction j = hilbert_transform(mu);
  for (double& v : j.values) v *= 2.0 * std::numbers::pi;
  return j;
}

double fisher_from_conjugate(const Measure& mu) {
  if (mu.is_atomic()) return std::numeric_limits<double>::infinity();
  const GridFunction j = conjugate_variable(mu);
  const auto f = mu.density();
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) w[i] = j.values[i] * j.values[i] * f[i];
  return trapezoid(w, mu.step());
}

double conjugate_relation_residual(const Measure& mu, std::span<const double> poly_coeffs) {
  require_grid(mu, "conjugate relation");
  if (poly_coeffs.size() > 9) throw Error(ErrorCode::InvalidArgument, "polynomial degree exceeds 8");
  const GridFunction j = conjugate_variable(mu);
  const auto f = mu.density();
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = mu.node(i);
    double p = 0.0;
    for (std::size_t k = poly_coeffs.size(); k-- > 0;) p = p * x + poly_coeffs[k];
    w[i] = j.values[i] * p * f[i];
  }
  const double lhs = trapezoid(w, mu.step());
  // (s^k - u^k)/(s - u) = sum_j s^j u^(k-1-j), so the double integral factorises
  std::vector<double> m(poly_coeffs.size() + 1);
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = moment(mu, static_cast<int>(k));
  double rhs = 0.0;
  for (std::size_t k = 1; k < poly_coeffs.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += m[i] * m[k - 1 - i];
    rhs += poly_coeffs[k] * s;
  }
  return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

FlowResult fisher_flow(const Measure& mu, const FlowQuadratureConfig& cfg) {
  validate(cfg);
  const double var = variance(mu);
  if (!(var >= 0.25 && var <= 4.0)) {
    throw Error(ErrorCode::InvalidArgument, "flow needs variance in [0.25, 4], got " + std::to_string(var));
  }
  const auto n = static_cast<std::size_t>(cfg.n_t);
  const double ds = std::log(cfg.t_cut / cfg.t_min) / static_cast<double>(n - 1);
  std::vector<FlowNode> nodes(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double t = cfg.t_min * std::exp(ds * static_cast<double>(i));
    try {
      const double phi = fisher_from_density(semicircular_smooth(mu, t, cfg.sub));
      nodes[i] = {t, phi, 0.5 * (1.0 / (1.0 + t) - phi)};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // integrate g(s) = integrand * t over s = log t
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = nodes[i].integrand * nodes[i].t;
  const std::size_t simpson_end = (n % 2 == 1) ? n - 1 : n - 2;
  double simpson = 0.0;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) simpson += (g[i] + 4.0 * g[i + 1] + g[i + 2]) * ds / 3.0;
  if (simpson_end != n - 1) simpson += 0.5 * (g[n - 2] + g[n - 1]) * ds;
  const double trap = trapezoid(g, ds);

  double head = 0.0;
  if (mu.is_grid()) head = 0.5 * (std::log1p(cfg.t_min) - cfg.t_min * nodes.front().fisher);
  const double tail = 0.5 * std::log((cfg.t_cut + var) / (cfg.t_cut + 1.0));
  const double tail_gap = std::abs(1.0 / (cfg.t_cut + var) - nodes.back().fisher);

  FlowResult out;
  out.chi.value = simpson + head + tail + kSemicircleChi;
  out.chi.method = ChiMethod::FisherFlow;
  out.chi.estimated_error = std::abs(simpson - trap) + 0.5 * tail_gap * cfg.t_cut;
  out.nodes = std::move(nodes);
  return out;
}

ChiValue chi_via_fisher_flow(const Measure& mu, const FlowQuadratureConfig& cfg) {
  return fisher_flow(mu, cfg).chi;
}

}  // namespace fel
