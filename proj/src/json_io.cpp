#include "sgcert/json_io.hpp"

#include "sgcert/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sgcert {

namespace {

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidArgument(what + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InvalidArgument(what + ": rows must have equal length");
    for (Eigen::Index k = 0; k < cols; ++k) {
      if (!row[k].is_number()) throw InvalidArgument(what + ": entries must be numbers");
      M(i, k) = row[k].get<double>();
    }
  }
  return M;
}

std::vector<double> reals_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidArgument(what + " must be an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw InvalidArgument(what + " must be an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

double number(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key) || !j[key].is_number()) throw InvalidArgument(what + ": missing numeric field '" + key + "'");
  return j[key].get<double>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw InvalidArgument(what + ": unknown key '" + it.key() + "'");
  }
}

Json optional_number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

StateSpace system_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("system: expected a JSON object");
  if (j.contains("preset")) {
    reject_unknown(j, {"preset"}, "system");
    return preset_system(j["preset"].get<std::string>());
  }
  const std::string kind = j.value("kind", "");
  if (kind == "ss") {
    reject_unknown(j, {"kind", "A", "B", "C", "D"}, "system");
    for (const char* k : {"A", "B", "C", "D"})
      if (!j.contains(k)) throw InvalidArgument(std::string("system: missing matrix '") + k + "'");
    Matrix D = matrix_from_json(j["D"], "D");
    Matrix A = matrix_from_json(j["A"], "A");
    if (A.size() == 0) return StateSpace::static_gain(D);
    return StateSpace(A, matrix_from_json(j["B"], "B"), matrix_from_json(j["C"], "C"), D);
  }
  if (kind == "tf") {
    reject_unknown(j, {"kind", "size", "entries"}, "system");
    if (!j.contains("entries") || !j["entries"].is_array()) throw InvalidArgument("system: missing 'entries'");
    const Json& rows = j["entries"];
    auto entry = [](const Json& e) {
      reject_unknown(e, {"num", "den"}, "tf entry");
      RationalEntry r;
      r.num = reals_from_json(e.at("num"), "num");
      r.den = reals_from_json(e.at("den"), "den");
      return r;
    };
    std::vector<RationalEntry> entries;
    Eigen::Index n = 0;
    if (!rows.empty() && rows[0].is_array()) {
      // Nested rows: [[{...}, ...], ...]
      n = static_cast<Eigen::Index>(rows.size());
      for (const auto& row : rows) {
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
          throw InvalidArgument("system: tf entries must form a square grid");
        for (const auto& e : row) entries.push_back(entry(e));
      }
    } else {
      n = static_cast<Eigen::Index>(number(j, "size", "system"));
      for (const auto& e : rows) entries.push_back(entry(e));
    }
    return realize(RationalMatrixTF(n, std::move(entries)));
  }
  throw InvalidArgument("system: 'kind' must be \"ss\" or \"tf\", or give a 'preset'");
}

Json system_to_json(const StateSpace& sys) {
  return Json{{"kind", "ss"}, {"A", to_json(sys.A())}, {"B", to_json(sys.B())}, {"C", to_json(sys.C())},
              {"D", to_json(sys.D())}};
}

StateSpace load_system(const std::string& source) {
  if (source == "h1" || source == "h2") return preset_system(source);
  std::ifstream in(source);
  if (!in) throw InvalidArgument("unknown preset or unreadable system file '" + source + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("system file '" + source + "': " + e.what());
  }
  return system_from_json(j);
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidArgument(what + ": cannot parse '" + item + "' as a number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw InvalidArgument(what + ": cannot parse '" + item + "' as a number");
    v.push_back(x);
  }
  return v;
}

MultiplierPi parse_disk_multiplier(const std::string& text) {
  const auto v = parse_reals(text, "disk multiplier");
  if (v.size() != 2) throw InvalidArgument("disk multiplier: expected 'c,r'");
  return pi_interior(v[0], v[1]);
}

ConicTheta parse_theta(const std::string& text) {
  const auto v = parse_reals(text, "theta");
  if (v.size() != 4) throw InvalidArgument("theta: expected 't11,t22,t13,t33'");
  return ConicTheta{v[0], v[1], v[2], v[3]};
}

MultiplierPi multiplier_from_json(const Json& j) {
  if (j.is_string()) return parse_disk_multiplier(j.get<std::string>());
  if (!j.is_object()) throw InvalidArgument("multiplier: expected an object or 'c,r'");
  const std::string kind = j.value("kind", "");
  if (kind == "disk") {
    reject_unknown(j, {"kind", "c", "r"}, "multiplier");
    return pi_interior(number(j, "c", "disk"), number(j, "r", "disk"));
  }
  if (kind == "ext_disk") {
    reject_unknown(j, {"kind", "c", "r"}, "multiplier");
    return pi_exterior(number(j, "c", "ext_disk"), number(j, "r", "ext_disk"));
  }
  if (kind == "pi") {
    reject_unknown(j, {"kind", "a", "b", "c"}, "multiplier");
    return MultiplierPi{number(j, "a", "pi"), number(j, "b", "pi"), number(j, "c", "pi")};
  }
  throw InvalidArgument("multiplier: 'kind' must be disk, ext_disk or pi");
}

Json to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const MultiplierPi& pi) { return Json{{"a", pi.a}, {"b", pi.b}, {"c", pi.c}}; }

Json to_json(const ConicTheta& t) {
  return Json{{"t11", t.t11}, {"t22", t.t22}, {"t13", t.t13}, {"t33", t.t33}, {"alpha", t.alpha()}};
}

Json to_json(const RegionGeom& r) {
  Json j{{"kind", region_kind(r)}};
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Disk> || std::is_same_v<T, ExteriorDisk>) {
          j["c"] = g.center;
          j["r"] = g.radius;
        } else if constexpr (std::is_same_v<T, HalfPlane>) {
          j["normal"] = g.normal;
          j["offset"] = g.offset;
        } else if constexpr (std::is_same_v<T, ConicAligned>) {
          j["t11"] = g.theta.t11;
          j["t22"] = g.theta.t22;
          j["t13"] = g.theta.t13;
          j["t33"] = g.theta.t33;
        }
      },
      r);
  j["description"] = describe(r);
  return j;
}

RegionGeom region_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("region: expected a JSON object");
  const std::string kind = j.value("kind", "");
  if (kind == "disk" || kind == "ext_disk") {
    reject_unknown(j, {"kind", "c", "r", "description"}, "region");
    const double c = number(j, "c", kind), r = number(j, "r", kind);
    if (!(r > 0.0)) throw InvalidArgument("region: radius must be positive");
    if (kind == "disk") return Disk{c, r};
    return ExteriorDisk{c, r};
  }
  if (kind == "conic") {
    reject_unknown(j, {"kind", "t11", "t22", "t13", "t33", "description"}, "region");
    return ConicAligned{ConicTheta{number(j, "t11", "conic"), number(j, "t22", "conic"), number(j, "t13", "conic"),
                                   number(j, "t33", "conic")}};
  }
  if (kind == "half_plane") {
    reject_unknown(j, {"kind", "normal", "offset", "description"}, "region");
    const double n = number(j, "normal", kind);
    if (n != 1.0 && n != -1.0) throw InvalidArgument("region: half-plane normal must be 1 or -1");
    return HalfPlane{n, number(j, "offset", kind)};
  }
  if (kind == "empty" || kind == "full") {
    reject_unknown(j, {"kind", "description"}, "region");
    if (kind == "empty") return EmptyRegion{};
    return FullRegion{};
  }
  throw InvalidArgument("region: 'kind' must be disk, ext_disk, half_plane, conic, empty or full");
}

Json to_json(const Frequency& f) { return f.infinite ? Json("inf") : Json(f.omega); }

Json to_json(const SolverDiagnostics& d) {
  return Json{{"backend", d.backend},
              {"status", d.status},
              {"message", d.message},
              {"newton", d.newton},
              {"iterations", d.iterations},
              {"cg_iterations", d.cg_iterations},
              {"margin", optional_number(d.margin)},
              {"upper_bound", optional_number(d.upper_bound)},
              {"lmi_lambda_max", optional_number(d.lmi_lambda_max)},
              {"p_lambda_min", optional_number(d.p_lambda_min)}};
}

Json to_json(const CertResult& r) {
  Json j{{"feasible", r.feasible},
         {"status", sdp::to_string(r.status)},
         {"multiplier", to_json(r.multiplier)},
         {"region", to_json(r.region)},
         {"positive_negative", is_positive_negative(r.multiplier)},
         {"hard_containment", r.hard_containment},
         {"psd_constrained", r.psd_constrained},
         {"diagnostics", to_json(r.diagnostics)}};
  j["P"] = r.P ? to_json(*r.P) : Json(nullptr);
  return j;
}

Json to_json(const CircleFit& f) {
  return Json{{"found", f.found}, {"c", f.c}, {"r", f.r}, {"solves", f.solves}, {"certificate", to_json(f.cert)}};
}

Json to_json(const ConicCertificate& c) {
  Json j{{"theta", to_json(c.theta)},
         {"certified", c.certified},
         {"indefinite", c.indefinite},
         {"h_convex", c.h_convex},
         {"worst_lambda", optional_number(c.worst_lambda)},
         {"worst_frequency", to_json(c.worst_frequency)},
         {"tolerance", c.tolerance},
         {"grid_points", c.grid.size()},
         {"max_refined_jump", optional_number(c.max_refined_jump)},
         {"reason", c.reason}};
  j["violation"] = c.violation ? to_json(*c.violation) : Json(nullptr);
  return j;
}

Json to_json(const ConicFit& f) {
  return Json{{"x0", f.x0},
              {"a", f.a},
              {"b", f.b},
              {"area", f.area},
              {"fallback_disk", f.fallback_disk},
              {"evaluations", f.evaluations},
              {"certificate", to_json(f.cert)}};
}

Json to_json(const StabilityReport& r) {
  Json j{{"certified", r.certified},
         {"pathway", to_string(r.pathway)},
         {"margin", optional_number(r.margin)},
         {"pi1", to_json(r.pi1)},
         {"pi2", to_json(r.pi2)},
         {"region1_inverted", to_json(r.region1_inv)},
         {"region2_negated", to_json(r.region2_neg)},
         {"containment1", r.containment1},
         {"containment2", r.containment2},
         {"positive_negative1", r.positive_negative1},
         {"positive_negative2", r.positive_negative2},
         {"certificate1", to_json(r.cert1)},
         {"certificate2", to_json(r.cert2)},
         {"well_posedness_assumed", r.well_posedness_assumed},
         {"reason", r.reason}};
  if (r.pathway == Pathway::soft_homotopy_numeric) {
    Json h{{"label", "numeric check"}, {"min_margin", optional_number(r.min_tau_margin)}};
    Json rows = Json::array();
    for (const auto& t : r.tau_margins) rows.push_back(Json{{"tau", t.tau}, {"margin", t.margin}});
    h["samples"] = std::move(rows);
    j["homotopy"] = std::move(h);
  }
  return j;
}

Json to_json(const EquivalenceReport& r) {
  Json j{{"pass", r.pass},
         {"soft_certified", r.soft_certified},
         {"trials", r.trials},
         {"skipped", r.skipped},
         {"violations", r.violations},
         {"min_normalized_iqc", optional_number(r.min_normalized)},
         {"tolerance", r.tolerance},
         {"dt", r.dt},
         {"horizon", r.horizon},
         {"certificate", to_json(r.cert)}};
  if (r.counterexample) {
    const auto& c = *r.counterexample;
    j["counterexample"] = Json{{"trial_id", c.trial.trial_id},
                               {"input_class", to_string(c.trial.input_class)},
                               {"T", c.trial.T},
                               {"iqc_value", c.trial.iqc_value},
                               {"energy", c.trial.energy},
                               {"dt", c.input.dt},
                               {"samples", c.input.samples()}};
  } else {
    j["counterexample"] = nullptr;
  }
  return j;
}

Json report(const std::string& kind, Json body) {
  Json j{{"schema", kReportSchema}, {"report", kind}};
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  return j;
}

}  // namespace sgcert
