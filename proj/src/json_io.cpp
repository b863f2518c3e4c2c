#include "fel/json_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "fel/error.hpp"

namespace fel {

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double to_double(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::InvalidArgument, "expected a number, got " + j.dump());
}

std::uint64_t checksum(std::span<const double> values) noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

}  // namespace

Json describe(const Measure& mu) {
  Json j;
  if (mu.is_atomic()) {
    j["kind"] = "atomic";
    Json atoms = Json::array();
    for (const Atom& a : mu.atoms()) atoms.push_back({a.location, a.mass});
    j["atoms"] = atoms;
  } else {
    j["kind"] = "grid";
    j["lo"] = mu.grid_lo();
    j["hi"] = mu.grid_hi();
    j["n_points"] = mu.n_points();
    j["rescale_factor"] = mu.rescale_factor();
    j["checksum"] = hex(checksum(mu.density()));
  }
  j["mean"] = number(mean(mu));
  j["variance"] = number(variance(mu));
  return j;
}

Json dump_measure(const Measure& mu) {
  if (mu.is_atomic()) return describe(mu);
  Json j;
  j["kind"] = "grid";
  j["lo"] = mu.grid_lo();
  j["hi"] = mu.grid_hi();
  j["density"] = std::vector<double>(mu.density().begin(), mu.density().end());
  return j;
}

Measure named_measure(const std::string& name, double variance, const GridOptions& opts) {
  if (name == "semicircle") return semicircle(variance, opts);
  if (name == "uniform") return uniform(variance, opts);
  if (name == "arcsine") return arcsine(variance, opts);
  if (name == "bernoulli") return bernoulli(variance);
  if (name == "gaussian") return gaussian_grid(variance, opts);
  throw Error(ErrorCode::InvalidArgument, "unknown named measure '" + name + "'");
}

Measure parse_measure_spec(const Json& spec, const GridOptions& opts) {
  try {
    if (!spec.is_object()) throw Error(ErrorCode::InvalidArgument, "spec must be a JSON object");
    const auto kind = spec.at("kind").get<std::string>();
    if (kind == "atomic") {
      std::vector<Atom> atoms;
      for (const auto& a : spec.at("atoms")) {
        if (!a.is_array() || a.size() != 2) throw Error(ErrorCode::InvalidArgument, "atom must be [location, mass]");
        atoms.push_back({a[0].get<double>(), a[1].get<double>()});
      }
      return make_atomic_measure(std::move(atoms));
    }
    if (kind == "grid") {
      return make_grid_measure(spec.at("lo").get<double>(), spec.at("hi").get<double>(),
                               spec.at("density").get<std::vector<double>>());
    }
    if (kind == "named") {
      const double var = spec.contains("variance") ? spec.at("variance").get<double>() : 1.0;
      return named_measure(spec.at("name").get<std::string>(), var, opts);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, e.what());
  }
}

Measure load_measure_spec(const std::string& path, const GridOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, path + ": cannot open");
  try {
    const Json spec = Json::parse(in);
    return parse_measure_spec(spec, opts);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.detail());
  }
}

}  // namespace fel
