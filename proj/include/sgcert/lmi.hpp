#pragma once

#include "sgcert/lmi_problem.hpp"
#include "sgcert/regions.hpp"
#include "sgcert/scaled_graph.hpp"
#include "sgcert/sdp.hpp"

#include <optional>
#include <string>

namespace sgcert {

/// rho(Pi) = [C D; 0 I]' (Pi kron I_n) [C D; 0 I], of size (states + ports).
Matrix outer_factor(const MultiplierPi& pi, const StateSpace& sys);

/// Default strictification: slack = 1e-8 * scale.
constexpr double kDefaultSlackRel = 1e-8;

/// F(P) = [[A'P + PA, PB], [B'P, 0]] - rho(Pi) <= -slack I, plus P >= 0 when hard.
/// scale = max(1, max |rho|). Throws UnstableSystem unless A is Hurwitz.
LmiProblem assemble_lmi(const StateSpace& sys, const MultiplierPi& pi, bool hard, double slack_rel = kDefaultSlackRel);

/// Backend key after applying the SG_CERTIFY_BACKEND override; empty means the default.
std::string resolve_backend_key(const std::string& configured = "");

struct WitnessCheck {
  bool ok = false;
  double lmi_lambda_max = 0.0;  // largest eigenvalue of F(P)
  double p_lambda_min = 0.0;    // smallest eigenvalue of P (psd-constrained problems)
};

/// Direct eigenvalue check, independent of any solver:
/// lambda_max(F(P)) <= 1e-6 * scale and, when psd_constrained, lambda_min(P) >= -1e-9 * max(1, |P|).
WitnessCheck verify_witness(const LmiProblem& p, const Matrix& P);

struct SolverDiagnostics {
  std::string backend;
  std::string status;  // feasible | infeasible | unknown
  std::string message;
  std::string newton;
  int iterations = 0;
  long cg_iterations = 0;
  double wall_ms = 0.0;
  double margin = 0.0;
  double upper_bound = 0.0;
  double lmi_lambda_max = 0.0;
  double p_lambda_min = 0.0;
};

struct CertResult {
  bool feasible = false;
  sdp::Status status = sdp::Status::unknown;
  std::optional<Matrix> P;
  MultiplierPi multiplier;
  RegionGeom region;
  /// feasible && is_positive_negative(multiplier)
  bool hard_containment = false;
  /// Whether the problem carried the P >= 0 constraint.
  bool psd_constrained = false;
  SolverDiagnostics diagnostics;
};

/// Solves the problem and re-verifies any witness; a witness that fails
/// verification turns the verdict into `unknown`. Non-reentrant backends are
/// serialized.
CertResult solve_feasibility(const LmiProblem& p, const sdp::Backend& backend, const sdp::SolveSettings& settings = {});

struct CertifyOptions {
  std::string backend;  // empty: default, subject to SG_CERTIFY_BACKEND
  sdp::SolveSettings settings;
  double slack_rel = kDefaultSlackRel;
};

/// Soft or hard containment certificate for an arbitrary multiplier.
CertResult certify_multiplier(const StateSpace& sys, const MultiplierPi& pi, bool hard, const CertifyOptions& opt = {});

/// Soft LMI with Pi_int(c, r); hard containment follows when r > |c|.
/// Throws InvalidArgument for r <= 0 and UnstableSystem for non-Hurwitz A.
CertResult certify_circle(const StateSpace& sys, double c, double r, const CertifyOptions& opt = {});

struct CircleFitOptions {
  CertifyOptions certify;
  /// Cloud used to bound the center range and to seed the radius bracket.
  SampleOptions sample{GridSpec::log(1e-3, 1e4, 200), 8, 1, 0};
  /// Coarse grid of centers over the cloud's real extent before golden refinement.
  int coarse_centers = 9;
  int golden_iterations = 30;
  /// Absolute bisection tolerance on r.
  double tolerance = 1e-3;
  /// Optional explicit center interval; used when lo < hi.
  double center_lo = 0.0, center_hi = 0.0;
};

struct CircleFit {
  bool found = false;
  double c = 0.0;
  double r = 0.0;
  CertResult cert;
  int solves = 0;
};

/// Smallest certified disk: for each trial center, bisection on r with
/// certify_circle; center chosen by coarse grid + golden section. The returned
/// (c, r) is always certified when found is true.
CircleFit fit_min_circle(const StateSpace& sys, const CircleFitOptions& opt = {});

}  // namespace sgcert
