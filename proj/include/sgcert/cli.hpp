#pragma once

#include "sgcert/json_io.hpp"
#include "sgcert/sdp.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sgcert {

/// Everything a command needs. Defaults are overridden first by a --config
/// JSON file, then by flags given on the command line.
struct RunConfig {
  std::string command;     // sample | certify | fit | stability | bench | oracle
  std::string subcommand;  // circle | conic for certify and fit

  std::string system = "h1";
  std::string sys1 = "h1", sys2 = "h2";
  std::optional<double> c, r;
  std::string theta;
  std::string pi, pi1, pi2;
  bool hard = false;
  bool homotopy = false;

  int points = 400;
  double w_min = 1e-3, w_max = 1e4;
  int dirs = 64;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  std::size_t trials = 5000;
  std::vector<int> sizes{10, 25, 50, 75, 100, 125, 150, 200, 250, 300};
  int reps = 5;

  std::string backend;
  sdp::SolveSettings sdp;

  std::string out, log, witness;
};

/// Applies a config object; unknown keys throw InvalidArgument.
void apply_config_json(const Json& j, RunConfig& cfg);

struct BenchRow {
  int m = 0;
  double t_soft = 0.0, t_hard = 0.0;  // median wall time, seconds
  double speedup = 0.0;               // t_hard / t_soft
  bool ok = false;                    // every solve returned feasible
  std::string note;
};

struct BenchOptions {
  std::vector<int> sizes{10, 25, 50, 75, 100, 125, 150, 200, 250, 300};
  int reps = 5;
  std::string backend;
  /// Solves run to convergence rather than stopping at the first feasible iterate.
  sdp::SolveSettings settings{.gap_tolerance = 1e-7, .stop_at_target = false};
};

/// Soft (P free) against hard (P >= 0) feasibility timing on diag(1/(s + a_k)),
/// a_k in [0.1, 0.3], with Pi_int(c, 1.05 c), c = 1/(2 a_min). A failing size
/// is flagged and the run continues.
std::vector<BenchRow> run_bench(const BenchOptions& opt, std::ostream* progress = nullptr);

/// m,t_soft,t_hard,speedup,status
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

/// Entry point of the `sg` tool. Exit codes: 0 certified or success,
/// 1 not certified, 2 usage or input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sgcert
