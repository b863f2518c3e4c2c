// One PASS/FAIL line per acceptance criterion. argv[1] is the fel CLI binary.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fel/classical.hpp"
#include "fel/cumulants.hpp"
#include "fel/entropy.hpp"
#include "fel/free_conv.hpp"
#include "fel/inequalities.hpp"
#include "fel/rmt_oracle.hpp"
#include "fel/transforms.hpp"
#include "oracles.hpp"

using namespace fel;

namespace {

const double kPi = oracle::kPi;
const double kHalfLog2PiE = 0.5 * std::log(2 * kPi * std::exp(1.0));

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

Verdict criterion_1() {
  Verdict v;
  const double chi = chi_log_energy(semicircle(1.0)).value;
  v.detail << "chi(semicircle)=" << chi;
  v.require(std::abs(chi - kHalfLog2PiE) <= 1e-3, "chi anchor");
  return v;
}

Verdict criterion_2() {
  Verdict v;
  const Measure s = semicircle(1.0);
  const double phi = fisher_from_density(s);
  const GridFunction h = hilbert_transform(s);
  const auto f = s.density();
  std::vector<double> norm(f.size()), lhs(f.size()), rhs(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double j = 2 * kPi * h.values[i];
    norm[i] = j * j * f[i];
    lhs[i] = h.values[i] * h.values[i] * f[i];
    rhs[i] = f[i] * f[i] * f[i] / 3.0;
  }
  const double hnorm = trapezoid(norm, s.step());
  const double ratio = trapezoid(lhs, s.step()) / trapezoid(rhs, s.step());
  v.detail << "Phi=" << phi << " |2pi Hf|^2=" << hnorm << " int(Hf)^2f / (1/3)int f^3=" << ratio;
  v.require(std::abs(phi - 1.0) <= 1e-3, "Phi anchor");
  v.require(std::abs(hnorm / phi - 1.0) <= 1e-3, "Hilbert norm");
  v.require(std::abs(ratio - 1.0) <= 1e-3, "Hilbert identity");
  return v;
}

Verdict criterion_3() {
  Verdict v;
  const std::array<std::pair<const char*, Measure>, 3> laws{
      {{"semicircle", semicircle(1.0)},
       {"uniform", uniform(1.0)},
       {"bernoulli+sc0.5", semicircular_smooth(bernoulli(), 0.5)}}};
  for (const auto& [name, mu] : laws) {
    const FlowResult flow = fisher_flow(mu);
    const double le = chi_log_energy(mu).value;
    v.detail << name << ": flow=" << flow.chi.value << " log-energy=" << le << "; ";
    v.require(std::abs(flow.chi.value - le) <= 5e-3, std::string(name) + " cross-method");
    if (std::string(name) == "semicircle") {
      double worst = 0.0;
      for (const FlowNode& n : flow.nodes) worst = std::max(worst, std::abs(n.integrand));
      v.detail << "max integrand=" << worst << "; ";
      v.require(worst <= 1e-4, "semicircle integrand");
    }
  }
  return v;
}

Verdict criterion_4() {
  Verdict v;
  const Measure b = bernoulli();
  const Measure bb = free_add_convolve(b, b);
  const std::vector<MomentVector> ins{moments(b, 6), moments(b, 6)};
  const double ones[] = {1.0, 1.0};
  const MomentVector oracle_m = weighted_sum_moments_oracle(ins, ones, 6);
  for (int k : {2, 4, 6}) {
    const double got = moment(bb, k);
    const double want = oracle_m.at(static_cast<std::size_t>(k));
    v.detail << "m" << k << "=" << got << " ";
    v.require(std::abs(got - want) <= 1e-3, "moment " + std::to_string(k));
  }
  const double d0 = density_at(bb, 0.0);
  v.detail << "f(0)=" << d0 << " ";
  v.require(std::abs(d0 - 1 / (2 * kPi)) <= 1e-2, "density at 0");
  const Measure pair[] = {b, b};
  const auto est = sample_free_sum_moments(pair, ones, 512, 32, 6, 20240101);
  for (const MomentEstimate& e : est) {
    const double want = oracle_m.at(static_cast<std::size_t>(e.k));
    const double dev = std::abs(e.mean - want);
    v.require(dev <= 3 * e.std_error + 1e-12, "rmt order " + std::to_string(e.k));
    if (e.k % 2 == 0) v.detail << "rmt m" << e.k << "=" << e.mean << "+-" << e.std_error << " ";
  }
  return v;
}

bool monotone(const std::vector<std::pair<int, ChiValue>>& seq, std::size_t from, std::ostringstream& out) {
  bool ok = true;
  for (std::size_t i = from; i < seq.size(); ++i) {
    out << seq[i].second.value << (i + 1 < seq.size() ? "," : "");
    if (i > from && seq[i].second.value < seq[i - 1].second.value - 5e-3) ok = false;
  }
  return ok && seq.back().second.value <= kHalfLog2PiE + 1e-3;
}

Verdict criterion_5() {
  Verdict v;
  const CltMonotonicity b = check_clt_monotonicity(bernoulli(), 8);
  v.detail << "bernoulli chi2..8=";
  v.require(monotone(b.chi, 1, v.detail), "bernoulli sequence");
  v.require(std::abs(b.chi[1].second.value - (0.75 + 0.5 * std::log(kPi))) <= 2e-3, "chi2 closed form");
  v.require(b.report.pass, "bernoulli report");
  const CltMonotonicity u = check_clt_monotonicity(uniform(1.0), 8);
  v.detail << "; uniform=";
  v.require(monotone(u.chi, 0, v.detail) && u.report.pass, "uniform sequence");
  for (double t : {0.1, 0.25, 0.5}) {
    const Measure sb = dilate(semicircular_smooth(bernoulli(), t), 1 / std::sqrt(1 + t));
    const CltMonotonicity s = check_clt_monotonicity(sb, 8);
    v.detail << "; smoothed bernoulli t=" << t << ": ";
    v.require(monotone(s.chi, 0, v.detail) && s.report.pass, "smoothed bernoulli t=" + std::to_string(t));
  }
  return v;
}

Verdict criterion_6() {
  Verdict v;
  const std::vector<Measure> two(2, semicircle(1.0));
  const std::vector<Measure> three(3, semicircle(1.0));
  const InequalityReport fisher = check_fisher_inequality(three, CoefficientVector::equal(3));
  const InequalityReport stam2 = check_free_stam(two);
  const InequalityReport stam3 = check_free_stam(three);
  const double a[] = {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)};
  const InequalityReport sup = check_chi_superadditivity(two, a);
  const InequalityReport epi = check_entropy_power(two);
  // EPI slack is measured relative to exp(2 chi), which is 4 pi e here
  const double epi_rel = epi.slack / epi.lhs;
  v.detail << "fisher=" << fisher.slack << " stam(2)=" << stam2.slack << " stam(3)=" << stam3.slack
           << " superadd=" << sup.slack << " epi/E=" << epi_rel << " (E=" << epi.lhs << ")";
  for (const auto& [name, s] : {std::pair{"fisher", fisher.slack}, {"stam2", stam2.slack}, {"stam3", stam3.slack},
                                {"superadd", sup.slack}, {"epi", epi_rel}}) {
    v.require(std::abs(s) <= 2e-3, name);
  }
  return v;
}

// Mixture of shifted and dilated semicircles and uniforms, semicircularly
// smoothed and normalised to unit variance.
Measure random_smooth_law(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pieces(2, 4);
  std::uniform_real_distribution<double> centre(-1.5, 1.5), width(0.3, 1.2), weight(0.2, 1.0), time(0.05, 0.4);
  struct Piece {
    bool semi;
    double c, r, w;
  };
  std::vector<Piece> ps;
  const int n = pieces(rng);
  for (int k = 0; k < n; ++k) ps.push_back({rng() % 2 == 0, centre(rng), width(rng), weight(rng)});
  double lo = 1e9, hi = -1e9;
  for (const Piece& p : ps) {
    lo = std::min(lo, p.c - p.r);
    hi = std::max(hi, p.c + p.r);
  }
  const std::size_t n_points = 4097;
  std::vector<double> f(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    for (const Piece& p : ps) {
      const double u = (x - p.c) / p.r;
      if (std::abs(u) >= 1) continue;
      f[i] += p.w * (p.semi ? std::sqrt(1 - u * u) : 1.0) / p.r;
    }
  }
  const Measure raw = make_grid_measure(lo, hi, std::move(f));
  const Measure smooth = semicircular_smooth(raw, time(rng));
  return dilate(smooth, 1 / std::sqrt(variance(smooth)));
}

Verdict criterion_7() {
  Verdict v;
  std::mt19937_64 rng(7);
  std::vector<Measure> laws;
  for (int i = 0; i < 20; ++i) laws.push_back(random_smooth_law(rng));
  double worst_fisher = 1e9, worst_stam = 1e9, worst_sup = 1e9, worst_clt = 1e9, worst_epi = 1e9, worst_cr = 1e9;
  const CheckConfig cfg;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    const std::vector<Measure> pair{laws[i], laws[(i + 1) % laws.size()]};
    const InequalityReport f = check_fisher_inequality(pair, CoefficientVector::equal(2), cfg);
    const InequalityReport s = check_free_stam(pair, cfg);
    const double a[] = {std::sqrt(0.3), std::sqrt(0.7)};
    const InequalityReport sup = check_chi_superadditivity(pair, a, cfg);
    const InequalityReport e = check_entropy_power(pair, cfg);
    const CltMonotonicity clt = check_clt_monotonicity(laws[i], 3, cfg);
    const double cr = fisher_from_density(laws[i]) * variance(laws[i]);
    worst_fisher = std::min(worst_fisher, f.slack);
    worst_stam = std::min(worst_stam, s.slack);
    worst_sup = std::min(worst_sup, sup.slack);
    worst_epi = std::min(worst_epi, e.slack / e.lhs);
    worst_clt = std::min(worst_clt, clt.report.slack);
    worst_cr = std::min(worst_cr, cr);
    const std::string tag = " law " + std::to_string(i);
    v.require(f.pass && f.slack >= -cfg.fisher_tol, "fisher" + tag);
    v.require(s.pass && s.slack >= -cfg.fisher_tol, "stam" + tag);
    v.require(sup.pass && sup.slack >= -cfg.chi_tol, "superadd" + tag);
    v.require(e.pass, "epi" + tag);
    v.require(clt.report.pass, "clt" + tag);
    v.require(cr >= 1 - 1e-3, "cramer-rao" + tag);
  }
  v.detail << "20 laws; min slack fisher=" << worst_fisher << " stam=" << worst_stam << " superadd=" << worst_sup
           << " clt=" << worst_clt << " epi/E=" << worst_epi << " min Phi*var=" << worst_cr;
  return v;
}

Verdict criterion_8() {
  Verdict v;
  const Measure g = gaussian_grid(1.0);
  const double h = shannon_entropy(g);
  const double fi = classical_fisher(g).value;
  v.detail << "H(gauss)=" << h << " F(gauss)=" << fi;
  v.require(std::abs(h - kHalfLog2PiE) <= 1e-3, "Gaussian entropy");
  v.require(std::abs(fi - 1.0) <= 2e-3, "Gaussian Fisher");

  const ClassicalMonotonicity m = check_classical_monotonicity(uniform(1.0), 6);
  v.detail << " H_n(uniform)=";
  for (const auto& [n, e] : m.entropy) v.detail << e << (n < 6 ? "," : "");
  v.require(m.report.pass, "classical monotonicity");

  const Measure u = uniform(1.0);
  const double t = 0.5, dt = 0.02;
  const double dh = (shannon_entropy(gaussian_smooth(u, t + dt)) - shannon_entropy(gaussian_smooth(u, t - dt))) / (2 * dt);
  const double half_f = 0.5 * classical_fisher(gaussian_smooth(u, t)).value;
  v.detail << " dH/dt=" << dh << " F/2=" << half_f;
  v.require(std::abs(dh / half_f - 1.0) <= 2e-2, "de Bruijn");

  double worst = 0.0;
  for (const Measure& f : {g, gaussian_smooth(u, 0.1)}) {
    for (int d = 0; d <= 6; ++d) {
      std::vector<double> p(static_cast<std::size_t>(d) + 1, 0.0);
      p.back() = 1.0;
      worst = std::max(worst, score_relation_residual(f, p, kScoreSign));
    }
  }
  v.detail << " score residual=" << worst << " (sign " << kScoreSign << ")";
  v.require(worst < 1e-3, "score relation");
  return v;
}

Verdict criterion_9() {
  Verdict v;
  double worst = 0.0;
  for (const Measure& mu : {semicircle(1.0), uniform(1.0)}) {
    for (int d = 0; d <= 6; ++d) {
      std::vector<double> p(static_cast<std::size_t>(d) + 1, 0.0);
      p.back() = 1.0;
      worst = std::max(worst, conjugate_relation_residual(mu, p));
    }
  }
  const Measure s = semicircle(1.0);
  const GridFunction j = conjugate_variable(s);
  double dev = 0.0;
  for (std::size_t i = 0; i < j.values.size(); ++i) {
    const double x = j.node(i);
    if (std::abs(x) <= 0.9 * 2.0) dev = std::max(dev, std::abs(j.values[i] - x));
  }
  v.detail << "max relation residual=" << worst << " max |J(x)-x|=" << dev;
  v.require(worst < 1e-3, "relation");
  v.require(dev <= 2e-3, "J(semicircle)");
  return v;
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  pclose(p);
  return out;
}

Verdict criterion_10(const std::string& cli) {
  Verdict v;
  const std::vector<std::string> runs{
      "entropy --named semicircle --variance 1",
      "entropy --named uniform --method both",
      "monotonicity --named bernoulli --n-max 8",
      "stam --named semicircle --copies 3 --format csv",
      "epi --named uniform --copies 2 --smooth 0.25",
      "convolve --named bernoulli --copies 2 --dump-density",
      "classical-monotonicity --named uniform --n-max 6",
      "rmt-check --named bernoulli --copies 2 --dim 64 --trials 8 --seed 11",
  };
  int same = 0;
  for (const auto& args : runs) {
    const std::string cmd = "'" + cli + "' " + args + " 2>/dev/null";
    const std::string a = capture(cmd);
    const std::string b = capture(cmd);
    const bool ok = !a.empty() && a == b;
    same += ok;
    v.require(ok, args);
  }
  v.detail << same << "/" << runs.size() << " CLI runs byte-identical";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-fel-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  std::cout.precision(7);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"chi anchor", criterion_1},
      {"Phi anchor and Hilbert identity", criterion_2},
      {"flow vs log-energy", criterion_3},
      {"convolution engine", criterion_4},
      {"CLT monotonicity", criterion_5},
      {"semicircular equality cases", criterion_6},
      {"randomised property suite", criterion_7},
      {"classical suite", criterion_8},
      {"conjugate variable", criterion_9},
      {"CLI determinism", [&] { return criterion_10(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << ", "
              << std::round(secs * 10) / 10 << " s): " << v.detail.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
