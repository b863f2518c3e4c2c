#include "fel/inequalities.hpp"

#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <sstream>

#include "fel/error.hpp"

namespace fel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUnitTolerance = 1e-10;

Json describe_all(std::span<const Measure> mus) {
  Json j = Json::array();
  for (const Measure& m : mus) j.push_back(describe(m));
  return j;
}

Json describe_config(const SubordinationConfig& s) {
  return {{"max_iter", s.max_iter}, {"tol", s.tol}, {"damping", s.damping}, {"n_points", s.n_points}};
}

Json numbers(std::span<const double> v) {
  Json j = Json::array();
  for (double x : v) j.push_back(number(x));
  return j;
}

void require_terms(std::span<const Measure> mus) {
  if (mus.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two measures");
}

// Runs body(j) for j < count, possibly concurrently, rethrowing the first failure.
template <class Body>
void for_each_index(std::size_t count, Body body) {
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(count); ++j) {
    try {
      body(static_cast<std::size_t>(j));
    } catch (...) {
      errors[static_cast<std::size_t>(j)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<Measure> without(std::span<const Measure> mus, std::size_t j) {
  std::vector<Measure> out;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    if (i != j) out.push_back(mus[i]);
  }
  return out;
}

Measure plain_sum(std::span<const Measure> mus, const SubordinationConfig& cfg) {
  const std::vector<double> ones(mus.size(), 1.0);
  return weighted_free_sum(mus, ones, cfg);
}

// The n-term weighted sum with a_j removed and the rest renormalised.
Measure leave_one_out(std::span<const Measure> mus, std::span<const double> a, std::size_t j,
                      const SubordinationConfig& cfg) {
  const double scale = 1.0 / std::sqrt(1.0 - a[j] * a[j]);
  std::vector<double> rest;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i != j) rest.push_back(a[i] * scale);
  }
  const std::vector<Measure> others = without(mus, j);
  return weighted_free_sum(others, rest, cfg);
}

void check_unit(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  if (std::abs(s - 1.0) > kUnitTolerance) {
    throw Error(ErrorCode::InvalidArgument, "sum of a_j^2 is " + std::to_string(s) + ", not 1");
  }
}

bool is_unit_weight(double a) { return std::abs(a * a - 1.0) <= kUnitTolerance; }

InequalityReport finish(std::string name, double lhs, double rhs, double slack, double tol, bool vacuous,
                        Json digest) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = slack;
  r.tol = tol;
  r.pass = slack >= -tol;
  r.vacuous = vacuous;
  r.inputs_digest = std::move(digest);
  return r;
}

}  // namespace

CoefficientVector CoefficientVector::equal(std::size_t count) {
  return {std::vector<double>(count, 1.0 / std::sqrt(static_cast<double>(count))), std::nullopt};
}

std::vector<double> CoefficientVector::b_or_default() const {
  if (b) return *b;
  const double n = static_cast<double>(a.size()) - 1.0;
  std::vector<double> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = std::sqrt(std::max(0.0, 1.0 - a[j] * a[j])) / n;
  return out;
}

void CoefficientVector::validate() const {
  if (a.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two coefficients");
  check_unit(a);
  if (b) {
    if (b->size() != a.size()) throw Error(ErrorCode::InvalidArgument, "a and b differ in length");
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += (*b)[j] * std::sqrt(std::max(0.0, 1.0 - a[j] * a[j]));
    if (std::abs(s - 1.0) > kUnitTolerance) {
      throw Error(ErrorCode::InvalidArgument, "sum of b_j sqrt(1 - a_j^2) is " + std::to_string(s) + ", not 1");
    }
  }
}

InequalityReport check_fisher_inequality(std::span<const Measure> mus, const CoefficientVector& coeffs,
                                         const CheckConfig& cfg) {
  require_terms(mus);
  if (coeffs.a.size() != mus.size()) throw Error(ErrorCode::InvalidArgument, "one coefficient per measure");
  coeffs.validate();
  const std::vector<double>& a = coeffs.a;
  const std::vector<double> b = coeffs.b_or_default();
  const std::size_t count = mus.size();
  const double n = static_cast<double>(count) - 1.0;
  for (std::size_t j = 0; j < count; ++j) {
    if (is_unit_weight(a[j]) && b[j] != 0.0) {
      throw Error(ErrorCode::DegenerateCoefficient, "a_" + std::to_string(j) + "^2 = 1 with nonzero b");
    }
  }

  double lhs = 0.0;
  std::vector<double> phi(count, 0.0);
  for_each_index(count + 1, [&](std::size_t k) {
    if (k == count) {
      lhs = fisher_from_density(weighted_free_sum(mus, a, cfg.sub));
    } else if (b[k] != 0.0) {
      phi[k] = fisher_from_density(leave_one_out(mus, a, k, cfg.sub));
    }
  });

  double rhs = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    if (b[j] != 0.0) rhs += b[j] * b[j] * phi[j];
  }
  rhs *= n;
  double slack;
  bool vacuous = false;
  if (std::isinf(lhs) && std::isinf(rhs)) {
    slack = 0.0;
    vacuous = true;
  } else {
    slack = rhs - lhs;
    vacuous = std::isinf(rhs);
  }
  Json digest{{"measures", describe_all(mus)},
              {"a", a},
              {"b", b},
              {"leave_one_out_fisher", numbers(phi)},
              {"subordination", describe_config(cfg.sub)}};
  return finish("fisher_inequality", lhs, rhs, slack, cfg.fisher_tol, vacuous, std::move(digest));
}

InequalityReport check_free_stam(std::span<const Measure> mus, const CheckConfig& cfg) {
  require_terms(mus);
  const std::size_t count = mus.size();
  const double n = static_cast<double>(count) - 1.0;
  double phi_all = 0.0;
  std::vector<double> phi(count, 0.0);
  for_each_index(count + 1, [&](std::size_t k) {
    if (k == count) {
      phi_all = fisher_from_density(plain_sum(mus, cfg.sub));
    } else {
      const std::vector<Measure> others = without(mus, k);
      phi[k] = fisher_from_density(plain_sum(others, cfg.sub));
    }
  });
  const double lhs = n / phi_all;
  double rhs = 0.0;
  bool all_infinite = true;
  for (double p : phi) {
    rhs += 1.0 / p;
    all_infinite = all_infinite && std::isinf(p);
  }
  Json digest{{"measures", describe_all(mus)},
              {"fisher_all", number(phi_all)},
              {"leave_one_out_fisher", numbers(phi)},
              {"subordination", describe_config(cfg.sub)}};
  return finish("free_stam", lhs, rhs, lhs - rhs, cfg.fisher_tol, all_infinite, std::move(digest));
}

InequalityReport check_chi_superadditivity(std::span<const Measure> mus, std::span<const double> a,
                                           const CheckConfig& cfg) {
  require_terms(mus);
  if (a.size() != mus.size()) throw Error(ErrorCode::InvalidArgument, "one coefficient per measure");
  check_unit(a);
  const std::size_t count = mus.size();
  const double n = static_cast<double>(count) - 1.0;

  ChiValue lhs_chi;
  std::vector<ChiValue> chi(count);
  for_each_index(count + 1, [&](std::size_t k) {
    if (k == count) {
      lhs_chi = chi_log_energy(weighted_free_sum(mus, a, cfg.sub));
    } else if (!is_unit_weight(a[k])) {
      chi[k] = chi_log_energy(leave_one_out(mus, a, k, cfg.sub));
    }
  });

  double rhs = 0.0;
  std::vector<double> chi_values(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    if (is_unit_weight(a[j])) continue;
    chi_values[j] = chi[j].value;
    rhs += (1.0 - a[j] * a[j]) / n * chi[j].value;
  }
  const double lhs = lhs_chi.value;
  double slack;
  bool vacuous = false;
  if (std::isinf(rhs) && rhs < 0.0) {
    vacuous = true;
    slack = std::isinf(lhs) && lhs < 0.0 ? 0.0 : kInf;
  } else {
    slack = lhs - rhs;
  }
  Json digest{{"measures", describe_all(mus)},
              {"a", std::vector<double>(a.begin(), a.end())},
              {"lhs_chi", to_json(lhs_chi)},
              {"leave_one_out_chi", numbers(chi_values)},
              {"subordination", describe_config(cfg.sub)}};
  return finish("chi_superadditivity", lhs, rhs, slack, cfg.chi_tol, vacuous, std::move(digest));
}

InequalityReport sequence_report(std::string name, std::span<const double> values, double bound, double tol,
                                 double bound_tol) {
  double step_margin = kInf;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double d = values[i + 1] - values[i];
    if (!std::isnan(d)) step_margin = std::min(step_margin, d);
    else if (!(std::isinf(values[i]) && values[i] < 0.0)) step_margin = -kInf;
  }
  const double last = values.empty() ? -kInf : values.back();
  const double bound_margin = bound - last;
  const double slack = std::min(step_margin, bound_margin * (tol / bound_tol));
  Json digest{{"sequence", numbers(values)},
              {"min_step", number(step_margin)},
              {"bound", bound},
              {"bound_margin", number(bound_margin)},
              {"bound_tol", bound_tol}};
  return finish(std::move(name), last, bound, slack, tol, false, std::move(digest));
}

CltMonotonicity check_clt_monotonicity(const Measure& mu, int n_max, const CheckConfig& cfg) {
  if (n_max < 2 || n_max > 12) throw Error(ErrorCode::InvalidArgument, "n_max must lie in [2, 12]");
  CltMonotonicity out;
  std::vector<double> values;
  std::optional<Measure> sum;
  for (int n = 1; n <= n_max; ++n) {
    sum = n == 1 ? mu : free_add_convolve(*sum, mu, cfg.sub);
    const ChiValue c = chi_log_energy(dilate(*sum, 1.0 / std::sqrt(static_cast<double>(n))));
    out.chi.emplace_back(n, c);
    values.push_back(c.value);
  }
  out.report = sequence_report("clt_monotonicity", values, kSemicircleChi, cfg.chi_tol, cfg.bound_tol);
  out.report.inputs_digest["measure"] = describe(mu);
  out.report.inputs_digest["subordination"] = describe_config(cfg.sub);
  return out;
}

InequalityReport check_entropy_power(std::span<const Measure> mus, const CheckConfig& cfg) {
  require_terms(mus);
  const std::size_t count = mus.size();
  const double n = static_cast<double>(count) - 1.0;
  ChiValue chi_all;
  std::vector<ChiValue> chi(count);
  for_each_index(count + 1, [&](std::size_t k) {
    if (k == count) {
      chi_all = chi_log_energy(plain_sum(mus, cfg.sub));
    } else {
      const std::vector<Measure> others = without(mus, k);
      chi[k] = chi_log_energy(plain_sum(others, cfg.sub));
    }
  });
  const double lhs = std::exp(2.0 * chi_all.value);
  double rhs = 0.0;
  bool vacuous = false;
  std::vector<double> chi_values;
  for (const ChiValue& c : chi) {
    chi_values.push_back(c.value);
    rhs += std::exp(2.0 * c.value);
    vacuous = vacuous || c.is_neg_infinity();
  }
  rhs /= n;
  const double tol = cfg.epi_relative_tol * lhs;
  Json digest{{"measures", describe_all(mus)},
              {"chi_all", to_json(chi_all)},
              {"leave_one_out_chi", numbers(chi_values)},
              {"relative_tol", cfg.epi_relative_tol},
              {"subordination", describe_config(cfg.sub)}};
  InequalityReport r = finish("entropy_power", lhs, rhs, lhs - rhs, tol, vacuous, std::move(digest));
  if (vacuous) r.pass = true;
  return r;
}

Json to_json(const ChiValue& c) {
  return {{"value", number(c.value)}, {"method", std::string(to_string(c.method))},
          {"estimated_error", number(c.estimated_error)}};
}

Json to_json(const InequalityReport& r) {
  return {{"name", r.name},
          {"lhs", number(r.lhs)},
          {"rhs", number(r.rhs)},
          {"slack", number(r.slack)},
          {"tol", number(r.tol)},
          {"pass", r.pass},
          {"vacuous", r.vacuous},
          {"inputs_digest", r.inputs_digest}};
}

std::string csv_header() { return "name,lhs,rhs,slack,tol,pass,vacuous"; }

std::string to_csv_row(const InequalityReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << r.name << ',' << r.lhs << ',' << r.rhs << ',' << r.slack << ',' << r.tol << ','
     << (r.pass ? "true" : "false") << ',' << (r.vacuous ? "true" : "false");
  return os.str();
}

}  // namespace fel
