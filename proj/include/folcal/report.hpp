#pragma once

// JSON records for everything the CLI and the acceptance suite persist.
// Doubles are written with round-trip precision, so two runs agree byte for
// byte whenever the numbers do. The only field allowed to differ between
// identical runs is "elapsed_ms".

#include <json.hpp>
#include <string>

#include "folcal/charforms.hpp"
#include "folcal/comass.hpp"
#include "folcal/folvol.hpp"

namespace folcal::report {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = FOLCAL_VERSION;

json to_json(const charforms::Split& s);
json to_json(const charforms::OrthogonalityCheck& c);
json to_json(const comass::ComassReport& r, bool include_restarts = true);
json to_json(const comass::MixedScan& scan, bool include_rows = true);
json to_json(const folvol::QuadratureSpec& q);
json to_json(const folvol::VolumeReport& r);
json to_json(const folvol::RatioReport& r);

std::string method_name(folvol::QuadratureMethod m);
/// "profile" or "mc"; throws std::invalid_argument otherwise.
folvol::QuadratureMethod parse_method(const std::string& s);

/// {artifact, version, command, config, seed, anchor, result}. The caller
/// appends elapsed_ms last if it wants timings.
json envelope(const std::string& command, const json& config, std::uint64_t seed, const std::string& anchor,
              json result);

/// Removes every "elapsed_ms" key, recursively; used by determinism checks.
json strip_timing(json j);

}  // namespace folcal::report
