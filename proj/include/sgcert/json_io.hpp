#pragma once

#include "sgcert/conic.hpp"
#include "sgcert/lmi.hpp"
#include "sgcert/regions.hpp"
#include "sgcert/signal_oracle.hpp"
#include "sgcert/stability.hpp"

#include <json.hpp>

#include <string>

namespace sgcert {

using Json = nlohmann::ordered_json;

constexpr int kReportSchema = 1;

/// {"preset": "h1"}, {"kind": "ss", "A": [[...]], "B": ..., "C": ..., "D": ...}
/// or {"kind": "tf", "entries": [[{"num": [...], "den": [...]}, ...], ...]}, one inner array per row.
/// A flat row-major "entries" list with an explicit "size" is accepted too.
StateSpace system_from_json(const Json& j);
Json system_to_json(const StateSpace& sys);

/// A preset name ("h1", "h2") or the path of a JSON system file.
StateSpace load_system(const std::string& source);

/// "c,r" for Pi_int(c, r).
MultiplierPi parse_disk_multiplier(const std::string& text);
/// "t11,t22,t13,t33".
ConicTheta parse_theta(const std::string& text);
/// Comma-separated reals; throws InvalidArgument naming `what` on malformed input.
std::vector<double> parse_reals(const std::string& text, const std::string& what);

/// "c,r", {"kind": "disk", "c", "r"}, {"kind": "ext_disk", "c", "r"} or {"kind": "pi", "a", "b", "c"}.
MultiplierPi multiplier_from_json(const Json& j);

Json to_json(const Matrix& M);
Json to_json(const MultiplierPi& pi);
Json to_json(const ConicTheta& theta);
/// {"kind": "disk" | "ext_disk", "c", "r"} or {"kind": "conic", "t11", "t22", "t13", "t33"};
/// half-planes carry "normal" and "offset"; "empty" and "full" have no parameters.
/// A human-readable "description" is appended and ignored on input.
Json to_json(const RegionGeom& r);
RegionGeom region_from_json(const Json& j);
Json to_json(const Frequency& f);
/// Timing fields are left out so reports are reproducible byte for byte.
Json to_json(const SolverDiagnostics& d);
Json to_json(const CertResult& r);
Json to_json(const CircleFit& f);
Json to_json(const ConicCertificate& c);
Json to_json(const ConicFit& f);
Json to_json(const StabilityReport& r);
Json to_json(const EquivalenceReport& r);

/// Wraps a body with {"schema": 1, "report": kind, ...}.
Json report(const std::string& kind, Json body);

}  // namespace sgcert
