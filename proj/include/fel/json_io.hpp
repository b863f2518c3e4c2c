#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <json.hpp>

#include "fel/measure.hpp"

namespace fel {

using Json = nlohmann::ordered_json;

/// JSON number, with non-finite values spelled "inf", "-inf" or "nan".
Json number(double v);
/// Inverse of `number`.
double to_double(const Json& j);

/// FNV-1a over the bytes of the samples.
std::uint64_t checksum(std::span<const double> values) noexcept;

/// Compact description of a measure for report provenance.
Json describe(const Measure& mu);
/// Full serialisation (atoms or every density sample).
Json dump_measure(const Measure& mu);

/// Measure from a spec object:
///   {"kind":"atomic","atoms":[[x,m],...]}
///   {"kind":"grid","lo":..,"hi":..,"density":[..]}
///   {"kind":"named","name":"semicircle|uniform|arcsine|bernoulli|gaussian","variance":..}
Measure parse_measure_spec(const Json& spec, const GridOptions& opts = {});
/// Reads and parses a spec file; errors name the file.
Measure load_measure_spec(const std::string& path, const GridOptions& opts = {});
Measure named_measure(const std::string& name, double variance, const GridOptions& opts = {});

}  // namespace fel
