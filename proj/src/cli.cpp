#include "sgcert/cli.hpp"

#include "sgcert/conic.hpp"
#include "sgcert/error.hpp"
#include "sgcert/lmi.hpp"
#include "sgcert/scaled_graph.hpp"
#include "sgcert/signal_oracle.hpp"
#include "sgcert/stability.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

namespace sgcert {

namespace {

template <class T>
T get_checked(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument("config: wrong type for '" + key + "'");
  }
}

void apply_sdp_json(const Json& j, sdp::SolveSettings& s, std::string& backend) {
  if (!j.is_object()) throw InvalidArgument("config: 'sdp' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const Json& v = it.value();
    const std::string key = "sdp." + k;
    if (k == "backend") backend = get_checked<std::string>(v, key);
    else if (k == "newton") s.newton = get_checked<std::string>(v, key);
    else if (k == "max_iterations") s.max_iterations = get_checked<int>(v, key);
    else if (k == "gap_tolerance") s.gap_tolerance = get_checked<double>(v, key);
    else if (k == "stop_at_target") s.stop_at_target = get_checked<bool>(v, key);
    else if (k == "dense_limit") s.dense_limit = get_checked<Eigen::Index>(v, key);
    else if (k == "cg_max_iterations") s.cg_max_iterations = get_checked<int>(v, key);
    else if (k == "cg_tolerance") s.cg_tolerance = get_checked<double>(v, key);
    else throw InvalidArgument("config: unknown key '" + key + "'");
  }
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open '" + path + "' for writing");
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

GridSpec grid_of(const RunConfig& cfg) {
  GridSpec g;
  g.w_min = cfg.w_min;
  g.w_max = cfg.w_max;
  g.points = cfg.points;
  return g;
}

CertifyOptions certify_options(const RunConfig& cfg) {
  CertifyOptions o;
  o.backend = cfg.backend;
  o.settings = cfg.sdp;
  return o;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_sample(const RunConfig& cfg, std::ostream& out) {
  const StateSpace sys = load_system(cfg.system);
  SampleOptions so;
  so.grid = grid_of(cfg);
  so.n_dirs = cfg.dirs;
  so.seed = cfg.seed;
  so.threads = cfg.threads;
  const SgCloud cloud = sg_system_sample(sys, so);
  std::ostringstream os;
  write_cloud_csv(os, cloud);
  write_text(cfg.out, os.str(), out);
  return 0;
}

int cmd_certify_circle(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.c || !cfg.r) throw InvalidArgument("certify circle needs --c and --r");
  const StateSpace sys = load_system(cfg.system);
  const CertResult res = certify_multiplier(sys, pi_interior(*cfg.c, *cfg.r), cfg.hard, certify_options(cfg));
  write_text(cfg.out, dump(report("certify_circle", to_json(res))), out);
  return res.feasible ? 0 : 1;
}

int cmd_certify_conic(const RunConfig& cfg, std::ostream& out) {
  if (cfg.theta.empty()) throw InvalidArgument("certify conic needs --theta t11,t22,t13,t33");
  const StateSpace sys = load_system(cfg.system);
  ConicCheckOptions co;
  co.grid = grid_of(cfg);
  co.threads = cfg.threads;
  const ConicCertificate cert = certify_conic(sys, parse_theta(cfg.theta), co);
  write_text(cfg.out, dump(report("certify_conic", to_json(cert))), out);
  return cert.certified ? 0 : 1;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const StateSpace sys = load_system(cfg.system);
  CircleFitOptions circle;
  circle.certify = certify_options(cfg);
  circle.sample.threads = cfg.threads;
  const CircleFit disk = fit_min_circle(sys, circle);
  if (cfg.subcommand == "circle") {
    Json body = to_json(disk);
    body["area"] = disk.found ? Json(std::numbers::pi * disk.r * disk.r) : Json(nullptr);
    write_text(cfg.out, dump(report("fit_circle", std::move(body))), out);
    return disk.found ? 0 : 1;
  }
  ConicFitOptions co;
  co.sample.threads = cfg.threads;
  co.check.threads = cfg.threads;
  const ConicFit fit = fit_conic(sys, co);
  Json body = to_json(fit);
  if (disk.found) {
    const double disk_area = std::numbers::pi * disk.r * disk.r;
    body["disk"] = Json{{"c", disk.c}, {"r", disk.r}, {"area", disk_area}};
    body["area_ratio"] = fit.area / disk_area;
  } else {
    body["disk"] = nullptr;
    body["area_ratio"] = nullptr;
  }
  write_text(cfg.out, dump(report("fit_conic", std::move(body))), out);
  return fit.cert.certified ? 0 : 1;
}

int cmd_stability(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.pi1.empty() || cfg.pi2.empty()) throw InvalidArgument("stability needs --pi1 c,r and --pi2 c,r");
  const StateSpace s1 = load_system(cfg.sys1), s2 = load_system(cfg.sys2);
  const StabilityReport rep = certify_feedback(s1, s2, parse_disk_multiplier(cfg.pi1), parse_disk_multiplier(cfg.pi2),
                                               certify_options(cfg), cfg.homotopy);
  write_text(cfg.out, dump(report("stability", to_json(rep))), out);
  if (!rep.certified) err << "not certified: " << rep.reason << "\n";
  return rep.certified ? 0 : 1;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  BenchOptions bo;
  bo.sizes = cfg.sizes;
  bo.reps = cfg.reps;
  bo.backend = cfg.backend;
  bo.settings.newton = cfg.sdp.newton;
  const auto rows = run_bench(bo, &err);
  std::ostringstream os;
  write_bench_csv(os, rows);
  write_text(cfg.out, os.str(), out);
  return std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.ok; }) ? 0 : 1;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.pi.empty()) throw InvalidArgument("oracle needs --pi c,r");
  const StateSpace sys = load_system(cfg.system);
  OracleOptions oo;
  oo.threads = cfg.threads;
  const EquivalenceReport rep =
      equivalence_trial(sys, parse_disk_multiplier(cfg.pi), cfg.trials, cfg.seed, oo, certify_options(cfg));
  if (!cfg.log.empty()) {
    std::ostringstream os;
    write_trial_log_csv(os, rep.log);
    write_text(cfg.log, os.str(), out);
  }
  if (rep.counterexample) {
    const auto& ce = *rep.counterexample;
    err << "hard IQC violated in trial " << ce.trial.trial_id << " (" << to_string(ce.trial.input_class)
        << ", T = " << ce.trial.T << "): value " << ce.trial.iqc_value << ", energy " << ce.trial.energy << "\n";
    if (!cfg.witness.empty()) {
      std::ostringstream os;
      os.precision(17);
      os << "t";
      for (Eigen::Index i = 0; i < ce.input.channels(); ++i) os << ",u" << i + 1;
      os << "\n";
      for (Eigen::Index k = 0; k < ce.input.samples(); ++k) {
        os << ce.input.dt * static_cast<double>(k);
        for (Eigen::Index i = 0; i < ce.input.channels(); ++i) os << ',' << ce.input.values(i, k);
        os << "\n";
      }
      write_text(cfg.witness, os.str(), out);
    }
  }
  if (!rep.soft_certified) err << "soft containment not certified (" << rep.cert.diagnostics.status << ")\n";
  write_text(cfg.out, dump(report("oracle", to_json(rep))), out);
  return rep.pass ? 0 : 1;
}

// Flags are parsed into a scratch config; only the ones actually given are
// copied over the defaults and config-file values.
class FlagSet {
 public:
  template <class T>
  CLI::Option* option(CLI::App* app, const std::string& name, T RunConfig::*field, const std::string& desc) {
    CLI::Option* o = app->add_option(name, scratch_.*field, desc);
    items_.emplace_back(o, [this, field](RunConfig& c) { c.*field = scratch_.*field; });
    return o;
  }
  CLI::Option* flag(CLI::App* app, const std::string& name, bool RunConfig::*field, const std::string& desc) {
    CLI::Option* o = app->add_flag(name, scratch_.*field, desc);
    items_.emplace_back(o, [this, field](RunConfig& c) { c.*field = scratch_.*field; });
    return o;
  }
  CLI::Option* optional(CLI::App* app, const std::string& name, std::optional<double> RunConfig::*field,
                        const std::string& desc) {
    auto& slot = doubles_.emplace_back(std::make_unique<double>(0.0));
    double* p = slot.get();
    CLI::Option* o = app->add_option(name, *p, desc);
    items_.emplace_back(o, [p, field](RunConfig& c) { c.*field = *p; });
    return o;
  }
  void apply(RunConfig& cfg) const {
    for (const auto& [opt, copy] : items_)
      if (opt->count() > 0) copy(cfg);
  }

 private:
  RunConfig scratch_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> items_;
  std::vector<std::unique_ptr<double>> doubles_;
};

}  // namespace

void apply_config_json(const Json& j, RunConfig& cfg) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const Json& v = it.value();
    if (k == "system" || k == "preset") cfg.system = get_checked<std::string>(v, k);
    else if (k == "sys1") cfg.sys1 = get_checked<std::string>(v, k);
    else if (k == "sys2") cfg.sys2 = get_checked<std::string>(v, k);
    else if (k == "c") cfg.c = get_checked<double>(v, k);
    else if (k == "r") cfg.r = get_checked<double>(v, k);
    else if (k == "theta") cfg.theta = get_checked<std::string>(v, k);
    else if (k == "pi") cfg.pi = get_checked<std::string>(v, k);
    else if (k == "pi1") cfg.pi1 = get_checked<std::string>(v, k);
    else if (k == "pi2") cfg.pi2 = get_checked<std::string>(v, k);
    else if (k == "hard") cfg.hard = get_checked<bool>(v, k);
    else if (k == "homotopy") cfg.homotopy = get_checked<bool>(v, k);
    else if (k == "points") cfg.points = get_checked<int>(v, k);
    else if (k == "w_min") cfg.w_min = get_checked<double>(v, k);
    else if (k == "w_max") cfg.w_max = get_checked<double>(v, k);
    else if (k == "dirs") cfg.dirs = get_checked<int>(v, k);
    else if (k == "seed") cfg.seed = get_checked<std::uint64_t>(v, k);
    else if (k == "threads") cfg.threads = get_checked<unsigned>(v, k);
    else if (k == "trials") cfg.trials = get_checked<std::size_t>(v, k);
    else if (k == "sizes") cfg.sizes = get_checked<std::vector<int>>(v, k);
    else if (k == "reps") cfg.reps = get_checked<int>(v, k);
    else if (k == "out") cfg.out = get_checked<std::string>(v, k);
    else if (k == "log") cfg.log = get_checked<std::string>(v, k);
    else if (k == "witness") cfg.witness = get_checked<std::string>(v, k);
    else if (k == "sdp") apply_sdp_json(v, cfg.sdp, cfg.backend);
    else throw InvalidArgument("config: unknown key '" + k + "'");
  }
}

std::vector<BenchRow> run_bench(const BenchOptions& opt, std::ostream* progress) {
  if (opt.reps < 1) throw InvalidArgument("bench: reps must be at least 1");
  const auto backend = sdp::make_backend(resolve_backend_key(opt.backend));
  constexpr double a_min = 0.1, a_max = 0.3;
  const double c = 1.0 / (2.0 * a_min);
  const MultiplierPi pi = pi_interior(c, 1.05 * c);
  std::vector<BenchRow> rows;
  for (int m : opt.sizes) {
    BenchRow row;
    row.m = m;
    try {
      if (m < 1) throw InvalidArgument("bench: sizes must be positive");
      const StateSpace sys = first_order_bank(m, a_min, a_max);
      const LmiProblem soft = assemble_lmi(sys, pi, false);
      const LmiProblem hard = assemble_lmi(sys, pi, true);
      std::vector<double> ts, th;
      row.ok = true;
      for (int k = 0; k < opt.reps; ++k) {
        const CertResult rs = solve_feasibility(soft, *backend, opt.settings);
        const CertResult rh = solve_feasibility(hard, *backend, opt.settings);
        ts.push_back(rs.diagnostics.wall_ms / 1000.0);
        th.push_back(rh.diagnostics.wall_ms / 1000.0);
        if (!rs.feasible || !rh.feasible) {
          row.ok = false;
          row.note = "soft " + rs.diagnostics.status + ", hard " + rh.diagnostics.status;
        }
      }
      row.t_soft = median(ts);
      row.t_hard = median(th);
      row.speedup = row.t_soft > 0.0 ? row.t_hard / row.t_soft : 0.0;
    } catch (const std::exception& e) {
      row.ok = false;
      row.note = e.what();
    }
    if (progress)
      *progress << "bench m=" << m << " soft " << row.t_soft << " s, hard " << row.t_hard << " s"
                << (row.ok ? "" : " [" + row.note + "]") << "\n";
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "m,t_soft,t_hard,speedup,status\n";
  for (const auto& r : rows) {
    os << r.m << ',' << r.t_soft << ',' << r.t_hard << ',' << r.speedup << ',';
    if (r.ok) {
      os << "ok\n";
    } else {
      std::string note = r.note;
      std::replace(note.begin(), note.end(), ',', ';');
      std::replace(note.begin(), note.end(), '\n', ' ');
      os << "failed: " << note << "\n";
    }
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scaled graph containment and feedback stability certificates", "sg"};
  app.require_subcommand(1);
  FlagSet flags;
  std::string config_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file with run settings; flags override it");
    flags.option(sub, "--backend", &RunConfig::backend, "SDP backend key");
    flags.option(sub, "--threads", &RunConfig::threads, "worker threads (0 = all cores)");
    flags.option(sub, "--out", &RunConfig::out, "output file (default: stdout)");
  };
  auto system = [&](CLI::App* sub) {
    flags.option(sub, "--preset,--sys", &RunConfig::system, "preset name (h1, h2) or system JSON file");
  };
  auto grid = [&](CLI::App* sub) {
    flags.option(sub, "--points", &RunConfig::points, "log-spaced frequencies");
    flags.option(sub, "--w-min", &RunConfig::w_min, "lowest grid frequency, rad/s");
    flags.option(sub, "--w-max", &RunConfig::w_max, "highest grid frequency, rad/s");
  };

  auto* sample = app.add_subcommand("sample", "frequency-sampled scaled graph as CSV");
  common(sample);
  system(sample);
  grid(sample);
  flags.option(sample, "--dirs", &RunConfig::dirs, "random input directions per frequency");
  flags.option(sample, "--seed", &RunConfig::seed, "direction seed");

  auto* certify = app.add_subcommand("certify", "containment certificates");
  certify->require_subcommand(1);
  auto* circle = certify->add_subcommand("circle", "disk containment by KYP LMI");
  common(circle);
  system(circle);
  flags.optional(circle, "--c", &RunConfig::c, "disk center");
  flags.optional(circle, "--r", &RunConfig::r, "disk radius");
  flags.flag(circle, "--hard", &RunConfig::hard, "also require P >= 0");
  auto* conic = certify->add_subcommand("conic", "conic containment by frequency sweep");
  common(conic);
  system(conic);
  grid(conic);
  flags.option(conic, "--theta", &RunConfig::theta, "t11,t22,t13,t33");

  auto* fit = app.add_subcommand("fit", "smallest certified region");
  fit->require_subcommand(1);
  auto* fit_circle = fit->add_subcommand("circle", "minimal certified disk");
  auto* fit_conic_cmd = fit->add_subcommand("conic", "minimal certified ellipse");
  for (auto* sub : {fit_circle, fit_conic_cmd}) {
    common(sub);
    system(sub);
  }

  auto* stability = app.add_subcommand("stability", "feedback stability from separated regions");
  common(stability);
  flags.option(stability, "--sys1", &RunConfig::sys1, "first system (preset or JSON file)");
  flags.option(stability, "--sys2", &RunConfig::sys2, "second system (preset or JSON file)");
  flags.option(stability, "--pi1", &RunConfig::pi1, "disk multiplier c,r for the first system");
  flags.option(stability, "--pi2", &RunConfig::pi2, "disk multiplier c,r for the second system");
  flags.flag(stability, "--homotopy", &RunConfig::homotopy, "attach the sampled homotopy margins");

  auto* bench = app.add_subcommand("bench", "soft against hard LMI timing");
  common(bench);
  flags.option(bench, "--sizes", &RunConfig::sizes, "system sizes")->delimiter(',');
  flags.option(bench, "--reps", &RunConfig::reps, "repetitions per size");

  auto* oracle = app.add_subcommand("oracle", "time-domain hard IQC trials");
  common(oracle);
  system(oracle);
  flags.option(oracle, "--pi", &RunConfig::pi, "disk multiplier c,r");
  flags.option(oracle, "--trials", &RunConfig::trials, "number of random trials");
  flags.option(oracle, "--seed", &RunConfig::seed, "master seed");
  flags.option(oracle, "--log", &RunConfig::log, "trial log CSV");
  flags.option(oracle, "--witness", &RunConfig::witness, "CSV for the worst violating input, if any");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InvalidArgument("cannot read config '" + config_path + "'");
      Json j;
      try {
        j = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("config '" + config_path + "': " + e.what());
      }
      apply_config_json(j, cfg);
    }
    flags.apply(cfg);

    if (sample->parsed()) return cmd_sample(cfg, out);
    if (circle->parsed()) return cmd_certify_circle(cfg, out);
    if (conic->parsed()) return cmd_certify_conic(cfg, out);
    if (fit_circle->parsed() || fit_conic_cmd->parsed()) {
      cfg.subcommand = fit_circle->parsed() ? "circle" : "conic";
      return cmd_fit(cfg, out);
    }
    if (stability->parsed()) return cmd_stability(cfg, out, err);
    if (bench->parsed()) return cmd_bench(cfg, out, err);
    if (oracle->parsed()) return cmd_oracle(cfg, out, err);
    err << "error: no command given\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace sgcert
