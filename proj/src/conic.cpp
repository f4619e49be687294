#include "sgcert/conic.hpp"

#include "sgcert/error.hpp"
#include "sgcert/lmi.hpp"
#include "sgcert/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sgcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

/// Golden-section minimizer on [lo, hi]; returns (argmin, min).
template <class F>
std::pair<double, double> golden(F&& f, double lo, double hi, int iters) {
  double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < iters; ++k) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

/// Coarse scan followed by golden refinement in the bracket around the best sample.
template <class F>
std::pair<double, double> scan_then_golden(F&& f, double lo, double hi, int coarse, int iters) {
  if (!(hi > lo)) return {lo, f(lo)};
  coarse = std::max(coarse, 3);
  const double h = (hi - lo) / (coarse - 1);
  int kb = 0;
  double fb = kInf;
  for (int k = 0; k < coarse; ++k) {
    const double v = f(lo + k * h);
    if (v < fb) {
      fb = v;
      kb = k;
    }
  }
  if (!std::isfinite(fb)) return {lo + kb * h, fb};
  const double a = lo + std::max(0, kb - 1) * h, b = lo + std::min(coarse - 1, kb + 1) * h;
  auto [x, v] = golden(f, a, b, iters);
  if (v <= fb) return {x, v};
  return {lo + kb * h, fb};
}

/// Frequency-wise data reused across candidate ellipses.
struct ScreenPoint {
  CMatrix Hs, Hs2, HH;
};

}  // namespace

double lambda_max_hermitian(const CMatrix& M) {
  const auto n = M.rows();
  if (n == 0) return -kInf;
  if (n == 1) return M(0, 0).real();
  if (n == 2) {
    const double p = M(0, 0).real(), q = M(1, 1).real();
    const double h = 0.5 * (p - q);
    return 0.5 * (p + q) + std::sqrt(h * h + std::norm(0.5 * (M(0, 1) + std::conj(M(1, 0)))));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(n - 1);
}

CMatrix q_matrix(const StateSpace& sys, const ConicTheta& th, const Frequency& f) {
  const CMatrix H = freq_response(sys, f);
  const CMatrix Hs = hermitian_part(H);
  CMatrix Q = th.alpha() * (Hs * Hs) + th.t22 * (H.adjoint() * H) + 2.0 * th.t13 * Hs;
  Q.diagonal().array() += th.t33;
  return 0.5 * (Q + Q.adjoint());
}

ConicCertificate certify_conic(const StateSpace& sys, const ConicTheta& theta, const ConicCheckOptions& opt) {
  require_hurwitz(sys, "certify_conic");
  ConicCertificate cert;
  cert.theta = theta;
  cert.indefinite = theta.indefinite();
  cert.h_convex = theta.t11 >= theta.t22;

  auto lam = [&](const Frequency& f) { return lambda_max_hermitian(q_matrix(sys, theta, f)); };
  {
    const CMatrix Q0 = q_matrix(sys, theta, Frequency::at(0.0));
    double norm0 = 0.0;
    if (Q0.size()) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(Q0, Eigen::EigenvaluesOnly);
      norm0 = es.eigenvalues().cwiseAbs().maxCoeff();
    }
    cert.tolerance = opt.tol_rel * (1.0 + norm0);
  }
  const double tol = cert.tolerance;

  GridSpec base = opt.grid;
  base.include_zero = false;
  base.include_infinity = false;
  const auto finite = make_grid(base, &sys);
  struct Pt {
    double w, l;
  };
  std::vector<Pt> pts(finite.size());
  parallel_for(finite.size(), opt.threads, [&](std::size_t k) { pts[k] = {finite[k].omega, lam(finite[k])}; });
  const double l_zero = lam(Frequency::at(0.0));
  const double l_inf = lam(Frequency::infinity());

  const double min_ratio = std::pow(10.0, opt.min_width_decades);
  std::size_t evaluations = pts.size() + 2;
  for (;;) {
    std::vector<char> refine(pts.size(), 0);  // refine interval (k, k+1)
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (pts[k + 1].w / pts[k].w <= min_ratio) continue;
      if ((pts[k].l > tol) != (pts[k + 1].l > tol)) refine[k] = 1;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (pts[k].l >= pts[k - 1].l && pts[k].l >= pts[k + 1].l) {
        if (pts[k].w / pts[k - 1].w > min_ratio) refine[k - 1] = 1;
        if (pts[k + 1].w / pts[k].w > min_ratio) refine[k] = 1;
      }
    }
    std::vector<double> fresh;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (!refine[k]) continue;
      const double r = std::cbrt(pts[k + 1].w / pts[k].w);
      fresh.push_back(pts[k].w * r);
      fresh.push_back(pts[k].w * r * r);
    }
    if (fresh.empty() || evaluations + fresh.size() > opt.max_points) break;
    std::vector<Pt> add(fresh.size());
    parallel_for(fresh.size(), opt.threads, [&](std::size_t k) { add[k] = {fresh[k], lam(Frequency::at(fresh[k]))}; });
    evaluations += add.size();
    pts.insert(pts.end(), add.begin(), add.end());
    std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return a.w < b.w; });
  }

  cert.grid.reserve(pts.size() + 2);
  cert.grid.push_back(Frequency::at(0.0));
  cert.worst_lambda = l_zero;
  cert.worst_frequency = Frequency::at(0.0);
  if (l_zero > tol) cert.violation = Frequency::at(0.0);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    cert.grid.push_back(Frequency::at(pts[k].w));
    if (pts[k].l > cert.worst_lambda) {
      cert.worst_lambda = pts[k].l;
      cert.worst_frequency = Frequency::at(pts[k].w);
    }
    if (pts[k].l > tol && !cert.violation) cert.violation = Frequency::at(pts[k].w);
    if (k + 1 < pts.size() && pts[k + 1].w / pts[k].w <= min_ratio * (1.0 + 1e-9))
      cert.max_refined_jump = std::max(cert.max_refined_jump, std::abs(pts[k + 1].l - pts[k].l));
  }
  cert.grid.push_back(Frequency::infinity());
  if (l_inf > cert.worst_lambda) {
    cert.worst_lambda = l_inf;
    cert.worst_frequency = Frequency::infinity();
  }
  if (l_inf > tol && !cert.violation) cert.violation = Frequency::infinity();

  if (!cert.indefinite)
    cert.reason = "multiplier is not indefinite (region empty or all of C)";
  else if (!cert.h_convex)
    cert.reason = "t11 < t22: region is not h-convex";
  else if (cert.worst_lambda > tol)
    cert.reason = "Q(w) has a positive eigenvalue at w = " + to_string(cert.worst_frequency);
  cert.certified = cert.reason.empty();
  return cert;
}

ConicFit fit_conic(const StateSpace& sys, const ConicFitOptions& opt) {
  require_hurwitz(sys, "fit_conic");
  const SgCloud cloud = sg_system_sample(sys, opt.sample);
  double xmin = kInf, xmax = -kInf, zmax = 0.0;
  for (const auto& p : cloud.points) {
    xmin = std::min(xmin, p.z.real());
    xmax = std::max(xmax, p.z.real());
    zmax = std::max(zmax, std::abs(p.z));
  }
  const double floor = opt.axis_floor * std::max(1.0, zmax);

  const auto freqs = make_grid(opt.screen_grid, &sys);
  std::vector<ScreenPoint> screen(freqs.size());
  parallel_for(freqs.size(), opt.sample.threads, [&](std::size_t k) {
    const CMatrix H = freq_response(sys, freqs[k]);
    auto& s = screen[k];
    s.Hs = hermitian_part(H);
    s.Hs2 = s.Hs * s.Hs;
    s.HH = H.adjoint() * H;
  });
  const auto n = sys.ports();

  ConicFit fit;
  // max over the screening grid of lambda_max(Q) for the ellipse (x0, a, b = 1/sqrt(t22)).
  auto worst = [&](double x0, double a, double t22) {
    ++fit.evaluations;
    const double ia = 1.0 / (a * a);
    double w = -kInf;
    CMatrix Q(n, n);
    for (const auto& s : screen) {
      Q = (ia - t22) * s.Hs2 + t22 * s.HH - (2.0 * x0 * ia) * s.Hs;
      Q.diagonal().array() += x0 * x0 * ia - 1.0;
      w = std::max(w, lambda_max_hermitian(Q));
    }
    return w;
  };
  // Largest admissible t22 in (0, 1/a^2], i.e. the shortest b >= a; 0 when none.
  auto best_t22 = [&](double x0, double a) {
    const double top = 1.0 / (a * a);
    const double margin = -1e-10;
    if (worst(x0, a, top) <= margin) return top;
    // lambda_max is convex in t22, so the admissible set is an interval.
    auto [tm, fm] = golden([&](double t) { return worst(x0, a, t); }, 0.0, top, 40);
    if (fm > margin) return 0.0;
    double lo = tm, hi = top;
    for (int k = 0; k < 50 && hi - lo > 1e-12 * top; ++k) {
      const double mid = 0.5 * (lo + hi);
      (worst(x0, a, mid) <= margin ? lo : hi) = mid;
    }
    return lo;
  };
  auto area_at = [&](double x0, double a) {
    const double t = best_t22(x0, a);
    return t > 0.0 ? std::numbers::pi * a / std::sqrt(t) : kInf;
  };
  auto a_range = [&](double x0) {
    double alo = floor, ahi = floor;
    for (const auto& p : cloud.points) {
      alo = std::max(alo, std::abs(p.z.real() - x0));
      ahi = std::max(ahi, std::abs(p.z - x0));
    }
    return std::pair{alo, std::max(ahi * 1.05, alo * 1.05) + floor};
  };
  auto best_for_x0 = [&](double x0) {
    auto [alo, ahi] = a_range(x0);
    return scan_then_golden([&](double a) { return area_at(x0, a); }, alo, ahi, opt.coarse, opt.golden_iterations);
  };

  auto [x0, area] = scan_then_golden([&](double x) { return best_for_x0(x).second; }, xmin, xmax, opt.coarse,
                                     opt.golden_iterations);
  if (std::isfinite(area)) {
    const double a = best_for_x0(x0).first;
    const double b = 1.0 / std::sqrt(best_t22(x0, a));
    // The adaptive check can find violations between screening points; inflate until certified.
    for (int k = 0; k < 24; ++k) {
      const double s = k == 0 ? 1.0 : 1.0 + 1e-5 * std::pow(2.0, k - 1);
      const ConicTheta th = conic_from_ellipse(x0, a * s, b * s);
      auto cert = certify_conic(sys, th, opt.check);
      if (cert.certified) {
        fit.theta = th;
        fit.cert = std::move(cert);
        fit.x0 = x0;
        fit.a = a * s;
        fit.b = b * s;
        fit.area = region_area(ConicAligned{th});
        return fit;
      }
    }
  }

  // No certified ellipse: report the smallest certified disk in conic form.
  const auto disk = fit_min_circle(sys);
  if (!disk.found) throw Error("fit_conic: neither an ellipse nor a disk could be certified");
  fit.fallback_disk = true;
  fit.theta = conic_from_disk(disk.c, disk.r);
  fit.cert = certify_conic(sys, fit.theta, opt.check);
  fit.x0 = disk.c;
  fit.a = fit.b = disk.r;
  fit.area = std::numbers::pi * disk.r * disk.r;
  return fit;
}

}  // namespace sgcert
