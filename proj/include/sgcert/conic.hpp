#pragma once

#include "sgcert/regions.hpp"
#include "sgcert/scaled_graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sgcert {

/// Q(w) = alpha Hs^2 + t22 H^*H + 2 t13 Hs + t33 I with H = H(jw), Hs its Hermitian part.
/// Throws SingularResolvent when jw is a pole.
CMatrix q_matrix(const StateSpace& sys, const ConicTheta& theta, const Frequency& f);

/// Largest eigenvalue of a Hermitian matrix.
double lambda_max_hermitian(const CMatrix& M);

struct ConicCheckOptions {
  /// Base grid; 0 and infinity are always checked.
  GridSpec grid = GridSpec::log(1e-3, 1e4, 400);
  /// Refinement stops once intervals are narrower than this, in decades.
  double min_width_decades = 1e-4;
  /// Hard cap on the number of frequency evaluations.
  std::size_t max_points = 200000;
  /// tol_q = tol_rel * (1 + |Q(0)|_2).
  double tol_rel = 1e-9;
  unsigned threads = 0;
};

struct ConicCertificate {
  ConicTheta theta;
  std::vector<Frequency> grid;  // final grid, ascending, infinity last
  double worst_lambda = 0.0;    // max over the grid of lambda_max(Q)
  Frequency worst_frequency;
  double tolerance = 0.0;
  bool certified = false;
  bool h_convex = false;
  bool indefinite = false;
  /// First grid frequency with lambda_max(Q) > tolerance, if any.
  std::optional<Frequency> violation;
  /// Largest change of lambda_max(Q) between adjacent grid points inside refined intervals.
  double max_refined_jump = 0.0;
  std::string reason;
};

/// Checks indefiniteness, t11 >= t22 and lambda_max(Q(w)) <= tol over an
/// adaptive grid: intervals adjacent to sign changes or local maxima of
/// lambda_max are trisected until narrower than min_width_decades.
/// Verification is grid-based; the final density is reported in `grid`.
/// Throws UnstableSystem unless sys is Hurwitz.
ConicCertificate certify_conic(const StateSpace& sys, const ConicTheta& theta, const ConicCheckOptions& opt = {});

struct ConicFitOptions {
  /// Cloud used to bound the search box.
  SampleOptions sample{GridSpec::log(1e-3, 1e4, 200), 16, 1, 0};
  /// Fixed grid on which candidate ellipses are screened.
  GridSpec screen_grid = GridSpec::log(1e-3, 1e4, 600);
  ConicCheckOptions check;
  int coarse = 9;
  int golden_iterations = 28;
  /// Smallest semi-axis considered.
  double axis_floor = 1e-3;
};

struct ConicFit {
  ConicTheta theta;
  ConicCertificate cert;
  double x0 = 0.0, a = 0.0, b = 0.0;
  double area = 0.0;
  /// True when no ellipse certified and theta encodes the circumscribed disk.
  bool fallback_disk = false;
  int evaluations = 0;
};

/// Area-minimizing tall ellipse (x - x0)^2/a^2 + y^2/b^2 <= 1, b >= a,
/// certified by certify_conic.
ConicFit fit_conic(const StateSpace& sys, const ConicFitOptions& opt = {});

}  // namespace sgcert
