#pragma once

#include "sgcert/lmi.hpp"
#include "sgcert/regions.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sgcert {

enum class Pathway { hard_via_soft_regions, soft_homotopy_numeric };

std::string to_string(Pathway p);

struct TauMargin {
  double tau = 0.0;
  double margin = 0.0;
};

struct StabilityReport {
  MultiplierPi pi1, pi2;
  RegionGeom region1_inv;  // S(Pi1)^{-1}
  RegionGeom region2_neg;  // -S(Pi2)
  double margin = 0.0;
  bool certified = false;
  Pathway pathway = Pathway::hard_via_soft_regions;
  bool containment1 = false, containment2 = false;
  bool positive_negative1 = false, positive_negative2 = false;
  CertResult cert1, cert2;
  /// Filled for the homotopy pathway; a sampled check, not a proof over all tau.
  std::vector<TauMargin> tau_margins;
  double min_tau_margin = 0.0;
  /// Loop well-posedness is assumed, never checked.
  bool well_posedness_assumed = true;
  std::string reason;
};

/// dist(S(Pi1)^{-1}, -S(Pi2)). Throws InvalidArgument if either region is empty.
double hard_margin(const MultiplierPi& pi1, const MultiplierPi& pi2);

/// 101 uniform points in [0.01, 1].
std::vector<double> default_tau_grid();

/// dist(S(Pi1)^{-1}, -tau S(Pi2)) for each tau. Throws InvalidArgument for tau outside (0, 1].
std::vector<TauMargin> soft_homotopy_sweep(const MultiplierPi& pi1, const MultiplierPi& pi2,
                                           const std::vector<double>& taus = default_tau_grid());

/// Certifies both soft containments, requires both multipliers to be
/// positive-negative, and checks the separation margin. With `homotopy`, the
/// per-tau sweep is attached and the verdict additionally needs a positive
/// minimum over the sampled taus.
StabilityReport certify_feedback(const StateSpace& sys1, const StateSpace& sys2, const MultiplierPi& pi1,
                                 const MultiplierPi& pi2, const CertifyOptions& opt = {}, bool homotopy = false,
                                 const std::vector<double>& taus = default_tau_grid());

}  // namespace sgcert
