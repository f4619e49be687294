#include "sgcert/lmi.hpp"

#include "sgcert/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace sgcert {

namespace {

double lambda_max(const Matrix& X) {
  if (X.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (X + X.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(X.rows() - 1);
}

double lambda_min(const Matrix& X) {
  if (X.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (X + X.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

Matrix LmiProblem::affine(const Matrix& P) const {
  const auto m = states(), n = ports();
  Matrix out = Matrix::Zero(m + n, m + n);
  if (m == 0) return out;
  Matrix PA = P * A;
  out.topLeftCorner(m, m) = PA + PA.transpose();
  out.topRightCorner(m, n) = P * B;
  out.bottomLeftCorner(n, m) = out.topRightCorner(m, n).transpose();
  return out;
}

Matrix LmiProblem::lhs(const Matrix& P) const { return affine(P) - rho; }

void LmiProblem::validate() const {
  const auto m = states();
  if (A.cols() != m) throw InvalidArgument("LMI: A must be square");
  if (B.rows() != m) throw InvalidArgument("LMI: B must have one row per state");
  if (rho.rows() != dimension() || rho.cols() != dimension())
    throw InvalidArgument("LMI: rho must be (states + ports) square");
  if (!(slack >= 0.0)) throw InvalidArgument("LMI: slack must be non-negative");
}

Matrix outer_factor(const MultiplierPi& pi, const StateSpace& sys) {
  const auto m = sys.states(), n = sys.ports();
  if (sys.C().rows() != n || sys.C().cols() != m || sys.D().cols() != n)
    throw InvalidArgument("outer_factor: realization dimensions disagree");
  Matrix top(n, m + n);  // [C D]
  top << sys.C(), sys.D();
  Matrix bot = Matrix::Zero(n, m + n);  // [0 I]
  bot.rightCols(n).setIdentity();
  Matrix cross = top.transpose() * bot;
  Matrix rho = pi.a * (top.transpose() * top) + pi.b * (cross + cross.transpose()) + pi.c * (bot.transpose() * bot);
  return 0.5 * (rho + rho.transpose());
}

LmiProblem assemble_lmi(const StateSpace& sys, const MultiplierPi& pi, bool hard, double slack_rel) {
  require_hurwitz(sys, "assemble_lmi");
  LmiProblem p;
  p.A = sys.A();
  p.B = sys.B();
  p.rho = outer_factor(pi, sys);
  p.psd_constrained = hard;
  p.scale = std::max(1.0, p.rho.size() ? p.rho.cwiseAbs().maxCoeff() : 0.0);
  p.slack = slack_rel * p.scale;
  return p;
}

std::string resolve_backend_key(const std::string& configured) {
  if (const char* env = std::getenv("SG_CERTIFY_BACKEND"); env && *env) return env;
  return configured;
}

WitnessCheck verify_witness(const LmiProblem& p, const Matrix& P) {
  WitnessCheck w;
  if (P.rows() != p.states() || P.cols() != p.states()) return w;
  if (!P.allFinite()) return w;
  const Matrix Ps = 0.5 * (P + P.transpose());
  w.lmi_lambda_max = lambda_max(p.lhs(Ps));
  w.ok = w.lmi_lambda_max <= 1e-6 * p.scale;
  if (p.psd_constrained) {
    w.p_lambda_min = lambda_min(Ps);
    const double pnorm = Ps.size() ? Ps.cwiseAbs().maxCoeff() : 0.0;
    w.ok = w.ok && w.p_lambda_min >= -1e-9 * std::max(1.0, pnorm);
  }
  return w;
}

CertResult solve_feasibility(const LmiProblem& p, const sdp::Backend& backend, const sdp::SolveSettings& settings) {
  CertResult res;
  res.psd_constrained = p.psd_constrained;
  const auto rep = sdp::solve_guarded(backend, p, settings);
  auto& d = res.diagnostics;
  d.backend = backend.name();
  d.message = rep.message;
  d.newton = rep.newton;
  d.iterations = rep.iterations;
  d.cg_iterations = rep.cg_iterations;
  d.wall_ms = rep.wall_ms;
  d.margin = rep.margin;
  d.upper_bound = rep.upper_bound;
  res.status = rep.status;
  if (rep.status == sdp::Status::feasible) {
    const auto w = verify_witness(p, rep.P);
    d.lmi_lambda_max = w.lmi_lambda_max;
    d.p_lambda_min = w.p_lambda_min;
    if (w.ok) {
      res.feasible = true;
      res.P = rep.P;
    } else {
      res.status = sdp::Status::unknown;
      d.message = "witness failed independent verification: " + rep.message;
    }
  }
  d.status = sdp::to_string(res.status);
  return res;
}

CertResult certify_multiplier(const StateSpace& sys, const MultiplierPi& pi, bool hard, const CertifyOptions& opt) {
  const auto problem = assemble_lmi(sys, pi, hard, opt.slack_rel);
  const auto backend = sdp::make_backend(resolve_backend_key(opt.backend));
  CertResult res = solve_feasibility(problem, *backend, opt.settings);
  res.multiplier = pi;
  res.region = region_of_multiplier(pi);
  res.hard_containment = res.feasible && is_positive_negative(pi);
  return res;
}

CertResult certify_circle(const StateSpace& sys, double c, double r, const CertifyOptions& opt) {
  return certify_multiplier(sys, pi_interior(c, r), false, opt);
}

CircleFit fit_min_circle(const StateSpace& sys, const CircleFitOptions& opt) {
  require_hurwitz(sys, "fit_min_circle");
  if (!(opt.tolerance > 0.0)) throw InvalidArgument("fit_min_circle: tolerance must be positive");
  const SgCloud cloud = sg_system_sample(sys, opt.sample);
  std::vector<Complex> pts;
  for (const auto& p : cloud.points) pts.push_back(p.z);
  std::vector<CMatrix> H;
  for (const auto& f : make_grid(opt.sample.grid, &sys)) H.push_back(freq_response(sys, f));

  // Radius every containing disk must reach at center c: max over the grid of
  // the largest singular value of H(jw) - cI, which bounds |z - c| over all directions.
  auto lower_radius = [&](double c) {
    double r = 0.0;
    for (const auto& Hk : H) {
      CMatrix E = Hk;
      E.diagonal().array() -= c;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(E.adjoint() * E, Eigen::EigenvaluesOnly);
      r = std::max(r, std::sqrt(std::max(0.0, es.eigenvalues()(E.rows() - 1))));
    }
    return r;
  };

  double lo = opt.center_lo, hi = opt.center_hi;
  if (!(lo < hi)) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (Complex z : pts) {
      lo = std::min(lo, z.real());
      hi = std::max(hi, z.real());
    }
  }

  // Coarse grid, then golden section on the sampled bound: it is convex in c.
  double c_best = 0.5 * (lo + hi);
  if (hi > lo) {
    const int n = std::max(3, opt.coarse_centers);
    int k_best = 0;
    double f_best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      const double c = lo + (hi - lo) * k / (n - 1);
      const double f = lower_radius(c);
      if (f < f_best) {
        f_best = f;
        k_best = k;
      }
    }
    const double h = (hi - lo) / (n - 1);
    double a = std::max(lo, lo + (k_best - 1) * h), b = std::min(hi, lo + (k_best + 1) * h);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = lower_radius(x1), f2 = lower_radius(x2);
    for (int it = 0; it < opt.golden_iterations; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = lower_radius(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = lower_radius(x2);
      }
    }
    c_best = 0.5 * (a + b);
  }

  CircleFit fit;
  fit.c = c_best;
  double r_lo = lower_radius(c_best);
  double width = std::max(opt.tolerance, 0.02 * r_lo);
  double r_hi = r_lo + width;
  auto try_radius = [&](double r) {
    ++fit.solves;
    return certify_circle(sys, c_best, r, opt.certify);
  };
  CertResult cert = try_radius(r_hi);
  for (int grow = 0; !cert.feasible && grow < 40; ++grow) {
    r_lo = r_hi;
    width *= 2.0;
    r_hi = r_lo + width;
    cert = try_radius(r_hi);
  }
  if (!cert.feasible) return fit;
  while (r_hi - r_lo > opt.tolerance) {
    const double mid = 0.5 * (r_lo + r_hi);
    CertResult m = try_radius(mid);
    if (m.feasible) {
      r_hi = mid;
      cert = std::move(m);
    } else {
      r_lo = mid;
    }
  }
  fit.found = true;
  fit.r = r_hi;
  fit.cert = std::move(cert);
  return fit;
}

}  // namespace sgcert
