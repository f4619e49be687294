#pragma once

#include "sgcert/lmi_problem.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace sgcert::sdp {

enum class Status { feasible, infeasible, unknown };

std::string to_string(Status s);

struct SolveSettings {
  int max_iterations = 100;
  /// Relative duality-gap tolerance used when the solve runs to optimality.
  double gap_tolerance = 1e-9;
  /// Stop as soon as a dual iterate attains margin >= problem.slack.
  bool stop_at_target = true;
  /// Newton-system strategy: "auto", "dense" or "cg".
  std::string newton = "auto";
  /// "auto" switches to conjugate gradients above this many free entries in P.
  Eigen::Index dense_limit = 900;
  int cg_max_iterations = 400;
  double cg_tolerance = 1e-9;
};

/// Raw backend output. The caller re-verifies any witness independently.
struct SolveReport {
  Status status = Status::unknown;
  Matrix P;
  /// Largest s found with F(P) <= -s I (and P >= s I when psd_constrained).
  double margin = 0.0;
  /// Upper bound on the optimal margin from the primal iterate (approximate
  /// when the primal iterate is not exactly feasible).
  double upper_bound = 0.0;
  int iterations = 0;
  long cg_iterations = 0;
  double wall_ms = 0.0;
  std::string newton;
  std::string message;
};

/// A semidefinite feasibility engine for LmiProblem.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  /// Backends returning false are serialized by solve_guarded().
  virtual bool reentrant() const { return true; }
  virtual SolveReport solve(const LmiProblem& problem, const SolveSettings& settings) const = 0;
};

using BackendFactory = std::function<std::unique_ptr<Backend>()>;

/// Registers a backend under `key`, replacing any previous registration.
void register_backend(const std::string& key, BackendFactory factory);
/// Throws InvalidArgument for an unknown key.
std::unique_ptr<Backend> make_backend(const std::string& key);
std::vector<std::string> backend_keys();
/// The key used when nothing is configured: "ipm".
std::string default_backend_key();

/// Runs backend.solve, holding a process-wide lock keyed by backend name when
/// the backend is not reentrant. Wall time is measured here.
SolveReport solve_guarded(const Backend& backend, const LmiProblem& problem, const SolveSettings& settings);

/// Primal-dual interior-point method (Nesterov-Todd scaling, Mehrotra
/// predictor-corrector) specialised to LmiProblem. Maximizes the margin s in
///
///   rho - affine(P) - s I >= 0,   P - s I >= 0 (psd_constrained only).
///
/// The Newton system in P is solved either densely or by preconditioned
/// conjugate gradients using the Kronecker structure of the KYP map.
class InteriorPointBackend : public Backend {
 public:
  explicit InteriorPointBackend(std::string newton = "auto") : newton_(std::move(newton)) {}
  std::string name() const override { return newton_ == "auto" ? "ipm" : "ipm-" + newton_; }
  SolveReport solve(const LmiProblem& problem, const SolveSettings& settings) const override;

 private:
  std::string newton_;
};

}  // namespace sgcert::sdp
