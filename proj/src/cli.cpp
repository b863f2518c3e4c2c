#include "fel/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "fel/classical.hpp"
#include "fel/cumulants.hpp"
#include "fel/entropy.hpp"
#include "fel/error.hpp"
#include "fel/free_conv.hpp"
#include "fel/inequalities.hpp"
#include "fel/json_io.hpp"
#include "fel/kernels.hpp"
#include "fel/rmt_oracle.hpp"

namespace fel {

namespace {

struct RunConfig {
  std::size_t n_points = kDefaultGridPoints;
  FlowQuadratureConfig flow;
  CheckConfig checks;
  std::string format = "json";
  std::uint64_t seed = 1;

  void sync() {
    checks.sub.n_points = n_points;
    flow.sub = checks.sub;
  }

  void validate() const {
    fel::validate(flow);
    if (n_points < kMinGridPoints) throw Error(ErrorCode::InvalidArgument, "--n-points must be at least 16");
    for (double t : {checks.fisher_tol, checks.chi_tol, checks.epi_relative_tol, checks.bound_tol}) {
      if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
    }
    if (format != "json" && format != "csv") throw Error(ErrorCode::InvalidArgument, "--format is json or csv");
  }

  Json to_json() const {
    return {{"n_points", n_points},
            {"t_cut", flow.t_cut},
            {"n_t", flow.n_t},
            {"t_min", flow.t_min},
            {"sub_tol", checks.sub.tol},
            {"max_iter", checks.sub.max_iter},
            {"damping", checks.sub.damping},
            {"fisher_tol", checks.fisher_tol},
            {"chi_tol", checks.chi_tol},
            {"epi_relative_tol", checks.epi_relative_tol},
            {"bound_tol", checks.bound_tol},
            {"format", format},
            {"seed", seed}};
  }
};

struct Inputs {
  std::vector<std::string> specs;
  std::vector<std::string> named;
  double variance = 1.0;
  int copies = 1;
  double smooth = 0.0;
  std::vector<double> weights;
  int n_max = 8;
  std::string method = "log-energy";
  bool dump_density = false;
  int dim = 512;
  int trials = 32;
  int max_order = 6;
  bool timestamp = false;
};

struct Outcome {
  Json result;
  std::vector<InequalityReport> reports;
  std::vector<std::vector<std::string>> rows;  // CSV rows for pure computations
  bool pass = true;
};

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<Measure> load_inputs(const Inputs& in, const RunConfig& cfg) {
  const GridOptions opts{cfg.n_points, kDefaultPadFraction};
  std::vector<Measure> base;
  for (const auto& path : in.specs) base.push_back(load_measure_spec(path, opts));
  for (const auto& name : in.named) base.push_back(named_measure(name, in.variance, opts));
  if (base.empty()) throw Error(ErrorCode::InvalidArgument, "no measures given (use --spec or --named)");
  if (in.copies < 1) throw Error(ErrorCode::InvalidArgument, "--copies must be positive");
  std::vector<Measure> out;
  for (int c = 0; c < in.copies; ++c) {
    for (const Measure& m : base) out.push_back(m);
  }
  if (in.smooth < 0.0) throw Error(ErrorCode::InvalidArgument, "--smooth must be non-negative");
  if (in.smooth > 0.0) {
    for (Measure& m : out) m = semicircular_smooth(m, in.smooth, cfg.checks.sub);
  }
  return out;
}

void require_count(const std::vector<Measure>& mus, std::size_t lo, const char* what) {
  if (mus.size() < lo) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs at least " + std::to_string(lo) + " measures");
  }
}

std::vector<double> weights_or(const Inputs& in, std::size_t count, double fill) {
  if (in.weights.empty()) return std::vector<double>(count, fill);
  if (in.weights.size() != count) throw Error(ErrorCode::InvalidArgument, "--weights needs one value per measure");
  return in.weights;
}

Outcome run_entropy(const std::vector<Measure>& mus, const Inputs& in, const RunConfig& cfg) {
  if (in.method != "log-energy" && in.method != "flow" && in.method != "both") {
    throw Error(ErrorCode::InvalidArgument, "--method is log-energy, flow or both");
  }
  Outcome o;
  o.result = Json::array();
  for (const Measure& mu : mus) {
    Json r{{"measure", describe(mu)}};
    if (in.method != "flow") {
      const ChiValue c = chi_log_energy(mu);
      r["chi_log_energy"] = to_json(c);
      o.rows.push_back({"chi", "LogEnergy", format_double(c.value), format_double(c.estimated_error)});
    }
    if (in.method != "log-energy") {
      const FlowResult f = fisher_flow(mu, cfg.flow);
      r["chi_fisher_flow"] = to_json(f.chi);
      Json nodes = Json::array();
      for (const FlowNode& n : f.nodes) nodes.push_back({{"t", n.t}, {"fisher", n.fisher}, {"integrand", n.integrand}});
      r["flow_nodes"] = nodes;
      o.rows.push_back({"chi", "FisherFlow", format_double(f.chi.value), format_double(f.chi.estimated_error)});
    }
    if (in.dump_density) r["density"] = dump_measure(mu);
    o.result.push_back(r);
  }
  return o;
}

Outcome run_fisher(const std::vector<Measure>& mus, const Inputs& in) {
  Outcome o;
  o.result = Json::array();
  for (const Measure& mu : mus) {
    const double phi = fisher_from_density(mu);
    const double conj = fisher_from_conjugate(mu);
    Json r{{"measure", describe(mu)},
           {"fisher_from_density", number(phi)},
           {"fisher_from_conjugate", number(conj)},
           {"cramer_rao", number(phi * variance(mu))}};
    if (in.dump_density) r["density"] = dump_measure(mu);
    o.result.push_back(r);
    o.rows.push_back({"fisher", "density", format_double(phi), ""});
    o.rows.push_back({"fisher", "conjugate", format_double(conj), ""});
  }
  return o;
}

Outcome run_convolve(const std::vector<Measure>& mus, const Inputs& in, const RunConfig& cfg) {
  const std::vector<double> a = weights_or(in, mus.size(), 1.0);
  const Measure sum = weighted_free_sum(mus, a, cfg.checks.sub);
  constexpr int kOrders = 8;
  std::vector<MomentVector> inputs;
  for (const Measure& m : mus) inputs.push_back(moments(m, kOrders));
  const MomentVector oracle = weighted_sum_moments_oracle(inputs, a, kOrders);
  const MomentVector got = moments(sum, kOrders);
  const ChiValue chi = chi_log_energy(sum);
  const double phi = fisher_from_density(sum);
  Outcome o;
  o.result = {{"inputs", Json::array()},
              {"weights", a},
              {"output", describe(sum)},
              {"moments", got.values},
              {"oracle_moments", oracle.values},
              {"chi", to_json(chi)},
              {"fisher", number(phi)}};
  for (const Measure& m : mus) o.result["inputs"].push_back(describe(m));
  if (in.dump_density) o.result["density"] = dump_measure(sum);
  for (int k = 1; k <= kOrders; ++k) {
    o.rows.push_back({"moment", std::to_string(k), format_double(got.at(static_cast<std::size_t>(k))),
                      format_double(oracle.at(static_cast<std::size_t>(k)))});
  }
  o.rows.push_back({"chi", "LogEnergy", format_double(chi.value), format_double(chi.estimated_error)});
  o.rows.push_back({"fisher", "density", format_double(phi), ""});
  return o;
}

Json chi_sequence(const std::vector<std::pair<int, ChiValue>>& seq) {
  Json j = Json::array();
  for (const auto& [n, c] : seq) j.push_back({{"n", n}, {"chi", to_json(c)}});
  return j;
}

Outcome with_report(InequalityReport r, Json extra = Json::object()) {
  Outcome o;
  o.pass = r.pass;
  o.result = extra;
  o.result["report"] = to_json(r);
  o.reports.push_back(std::move(r));
  return o;
}

Outcome run_rmt(const std::vector<Measure>& mus, const Inputs& in, const RunConfig& cfg) {
  const std::vector<double> a = weights_or(in, mus.size(), 1.0);
  const auto est = sample_free_sum_moments(mus, a, in.dim, in.trials, in.max_order, cfg.seed);
  std::vector<MomentVector> inputs;
  for (const Measure& m : mus) inputs.push_back(moments(m, in.max_order));
  const MomentVector oracle = weighted_sum_moments_oracle(inputs, a, static_cast<std::size_t>(in.max_order));
  Outcome o;
  o.result = {{"weights", a}, {"dim", in.dim}, {"trials", in.trials}, {"estimates", Json::array()}};
  for (const MomentEstimate& e : est) {
    const double expected = oracle.at(static_cast<std::size_t>(e.k));
    const double z = std::abs(e.mean - expected);
    const bool ok = z <= 3.0 * e.std_error + 1e-12 * (1.0 + std::abs(expected));
    o.pass = o.pass && ok;
    o.result["estimates"].push_back({{"k", e.k},
                                     {"mean", e.mean},
                                     {"std_error", e.std_error},
                                     {"oracle", expected},
                                     {"within_3_se", ok}});
    o.rows.push_back({"moment", std::to_string(e.k), format_double(e.mean), format_double(e.std_error),
                      format_double(expected), ok ? "true" : "false"});
  }
  o.result["pass"] = o.pass;
  return o;
}

Outcome dispatch(const std::string& cmd, const Inputs& in, const RunConfig& cfg) {
  const std::vector<Measure> mus = load_inputs(in, cfg);
  if (cmd == "entropy") return run_entropy(mus, in, cfg);
  if (cmd == "fisher") return run_fisher(mus, in);
  if (cmd == "convolve") return run_convolve(mus, in, cfg);
  if (cmd == "monotonicity") {
    if (mus.size() != 1) throw Error(ErrorCode::InvalidArgument, "monotonicity takes one measure");
    CltMonotonicity m = check_clt_monotonicity(mus[0], in.n_max, cfg.checks);
    return with_report(m.report, {{"sequence", chi_sequence(m.chi)}});
  }
  if (cmd == "stam") {
    require_count(mus, 2, "stam");
    return with_report(check_free_stam(mus, cfg.checks));
  }
  if (cmd == "superadd") {
    require_count(mus, 2, "superadd");
    const std::vector<double> a = weights_or(in, mus.size(), 1.0 / std::sqrt(static_cast<double>(mus.size())));
    return with_report(check_chi_superadditivity(mus, a, cfg.checks));
  }
  if (cmd == "epi") {
    require_count(mus, 2, "epi");
    return with_report(check_entropy_power(mus, cfg.checks));
  }
  if (cmd == "classical-monotonicity") {
    if (mus.size() != 1) throw Error(ErrorCode::InvalidArgument, "classical-monotonicity takes one density");
    ClassicalMonotonicity m = check_classical_monotonicity(mus[0], in.n_max, cfg.checks.chi_tol, cfg.checks.bound_tol);
    Json seq = Json::array();
    for (const auto& [n, h] : m.entropy) seq.push_back({{"n", n}, {"entropy", h}});
    return with_report(m.report, {{"sequence", seq}});
  }
  if (cmd == "rmt-check") return run_rmt(mus, in, cfg);
  throw Error(ErrorCode::InvalidArgument, "unknown command " + cmd);
}

void emit(std::ostream& out, const std::string& cmd, const Outcome& o, const RunConfig& cfg, bool timestamp) {
  if (cfg.format == "json") {
    Json line{{"command", cmd}, {"config", cfg.to_json()}, {"result", o.result}, {"pass", o.pass}};
    if (timestamp) line["timestamp"] = static_cast<long long>(std::time(nullptr));
    out << line.dump() << '\n';
    return;
  }
  out << "# " << Json{{"command", cmd}, {"config", cfg.to_json()}}.dump() << '\n';
  if (!o.reports.empty()) {
    out << csv_header() << '\n';
    for (const auto& r : o.reports) out << to_csv_row(r) << '\n';
    return;
  }
  out << "quantity,key,value,detail,reference,ok\n";
  for (const auto& row : o.rows) {
    for (std::size_t i = 0; i < 6; ++i) {
      if (i > 0) out << ',';
      if (i < row.size()) out << row[i];
    }
    out << '\n';
  }
}

void add_common(CLI::App* sub, Inputs& in, RunConfig& cfg) {
  sub->add_option("--spec", in.specs, "measure spec JSON file (repeatable)");
  sub->add_option("--named", in.named, "semicircle|uniform|arcsine|bernoulli|gaussian (repeatable)");
  sub->add_option("--variance", in.variance, "variance of --named measures");
  sub->add_option("--copies", in.copies, "repeat the measure list this many times");
  sub->add_option("--smooth", in.smooth, "smooth every input by a semicircle of this variance first");
  sub->add_option("--format", cfg.format, "json or csv");
  sub->add_option("--seed", cfg.seed, "random seed");
  sub->add_option("--n-points", cfg.n_points, "grid nodes for named measures and outputs");
  sub->add_option("--t-cut", cfg.flow.t_cut, "upper end of the flow integral");
  sub->add_option("--n-t", cfg.flow.n_t, "flow quadrature nodes");
  sub->add_option("--sub-tol", cfg.checks.sub.tol, "subordination residual tolerance");
  sub->add_option("--max-iter", cfg.checks.sub.max_iter, "subordination iteration cap");
  sub->add_option("--damping", cfg.checks.sub.damping, "fixed-point damping in (0, 1]");
  sub->add_option("--fisher-tol", cfg.checks.fisher_tol, "tolerance of Fisher-information checks");
  sub->add_option("--chi-tol", cfg.checks.chi_tol, "tolerance of entropy checks");
  sub->add_option("--epi-rel-tol", cfg.checks.epi_relative_tol, "entropy-power tolerance relative to the left side");
  sub->add_option("--bound-tol", cfg.checks.bound_tol, "tolerance on the upper bound in monotonicity checks");
  sub->add_flag("--dump-density", in.dump_density, "include density samples in the output");
  sub->add_flag("--timestamp", in.timestamp, "add a wall-clock timestamp field");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Free entropy and Fisher information laboratory"};
  app.require_subcommand(1, 1);
  Inputs in;
  RunConfig cfg;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"entropy", "free entropy chi"},
      {"fisher", "free Fisher information"},
      {"convolve", "free additive convolution of the inputs"},
      {"monotonicity", "chi along normalised free CLT sums"},
      {"stam", "free Stam inequality"},
      {"superadd", "chi superadditivity"},
      {"epi", "free entropy power inequality"},
      {"classical-monotonicity", "Shannon entropy along classical CLT sums"},
      {"rmt-check", "random-matrix moments against the cumulant oracle"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, in, cfg);
    const std::string n = name;
    if (n == "monotonicity" || n == "classical-monotonicity") sub->add_option("--n-max", in.n_max, "largest n");
    if (n == "convolve" || n == "superadd" || n == "rmt-check") sub->add_option("--weights", in.weights, "weights a_i");
    if (n == "entropy") sub->add_option("--method", in.method, "log-energy, flow or both");
    if (n == "rmt-check") {
      sub->add_option("--dim", in.dim, "matrix dimension");
      sub->add_option("--trials", in.trials, "independent trials");
      sub->add_option("--max-order", in.max_order, "highest moment");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    kernels::configure_threads_from_env();
    cfg.sync();
    cfg.validate();
    const Outcome o = dispatch(cmd, in, cfg);
    emit(out, cmd, o, cfg, in.timestamp);
    return o.pass ? kExitOk : kExitCheckFailed;
  } catch (const Error& e) {
    err << "fel " << cmd << ": " << e.what() << '\n';
    if (e.code() == ErrorCode::NoConvergence || e.code() == ErrorCode::MassLoss) return kExitNoConvergence;
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "fel " << cmd << ": " << e.what() << '\n';
    return kExitBadInput;
  }
}

}  // namespace fel
