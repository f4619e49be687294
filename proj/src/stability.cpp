#include "sgcert/stability.hpp"

#include "sgcert/error.hpp"

#include <algorithm>
#include <limits>

namespace sgcert {

std::string to_string(Pathway p) {
  return p == Pathway::hard_via_soft_regions ? "hard_via_soft_regions" : "soft_homotopy_numeric";
}

double hard_margin(const MultiplierPi& pi1, const MultiplierPi& pi2) {
  const RegionGeom r1 = region_of_multiplier(pi1);
  const RegionGeom r2 = region_of_multiplier(pi2);
  if (std::holds_alternative<EmptyRegion>(r1) || std::holds_alternative<EmptyRegion>(r2))
    throw InvalidArgument("hard_margin: multiplier region is empty");
  return region_distance(invert_region(r1), negate_region(r2));
}

std::vector<double> default_tau_grid() {
  std::vector<double> t(101);
  for (int k = 0; k <= 100; ++k) t[k] = 0.01 + 0.99 * k / 100.0;
  t.back() = 1.0;
  return t;
}

std::vector<TauMargin> soft_homotopy_sweep(const MultiplierPi& pi1, const MultiplierPi& pi2,
                                           const std::vector<double>& taus) {
  const RegionGeom r1 = region_of_multiplier(pi1);
  const RegionGeom r2 = region_of_multiplier(pi2);
  if (std::holds_alternative<EmptyRegion>(r1) || std::holds_alternative<EmptyRegion>(r2))
    throw InvalidArgument("soft_homotopy_sweep: multiplier region is empty");
  const RegionGeom inv1 = invert_region(r1);
  const RegionGeom neg2 = negate_region(r2);
  std::vector<TauMargin> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgument("homotopy parameter must lie in (0, 1]");
    out.push_back({tau, region_distance(inv1, scale_region(neg2, tau))});
  }
  return out;
}

StabilityReport certify_feedback(const StateSpace& sys1, const StateSpace& sys2, const MultiplierPi& pi1,
                                 const MultiplierPi& pi2, const CertifyOptions& opt, bool homotopy,
                                 const std::vector<double>& taus) {
  require_hurwitz(sys1, "certify_feedback (system 1)");
  require_hurwitz(sys2, "certify_feedback (system 2)");
  StabilityReport rep;
  rep.pi1 = pi1;
  rep.pi2 = pi2;
  rep.pathway = homotopy ? Pathway::soft_homotopy_numeric : Pathway::hard_via_soft_regions;
  rep.positive_negative1 = is_positive_negative(pi1);
  rep.positive_negative2 = is_positive_negative(pi2);

  const RegionGeom r1 = region_of_multiplier(pi1);
  const RegionGeom r2 = region_of_multiplier(pi2);
  std::vector<std::string> reasons;
  const bool empty = std::holds_alternative<EmptyRegion>(r1) || std::holds_alternative<EmptyRegion>(r2);
  if (empty) {
    reasons.push_back("multiplier region is empty");
  } else {
    rep.region1_inv = invert_region(r1);
    rep.region2_neg = negate_region(r2);
    rep.margin = region_distance(rep.region1_inv, rep.region2_neg);
  }

  rep.cert1 = certify_multiplier(sys1, pi1, false, opt);
  rep.cert2 = certify_multiplier(sys2, pi2, false, opt);
  rep.containment1 = rep.cert1.feasible;
  rep.containment2 = rep.cert2.feasible;
  if (!rep.containment1) reasons.push_back("containment of system 1 not certified (" + rep.cert1.diagnostics.status + ")");
  if (!rep.containment2) reasons.push_back("containment of system 2 not certified (" + rep.cert2.diagnostics.status + ")");
  if (!rep.positive_negative1) reasons.push_back("multiplier not positive-negative (system 1)");
  if (!rep.positive_negative2) reasons.push_back("multiplier not positive-negative (system 2)");
  if (!empty && !(rep.margin > 0.0)) reasons.push_back("regions are not strictly separated");

  if (homotopy && !empty) {
    rep.tau_margins = soft_homotopy_sweep(pi1, pi2, taus);
    rep.min_tau_margin = std::numeric_limits<double>::infinity();
    for (const auto& t : rep.tau_margins) rep.min_tau_margin = std::min(rep.min_tau_margin, t.margin);
    if (!(rep.min_tau_margin > 0.0)) reasons.push_back("sampled homotopy margin is not positive");
  }

  rep.certified = reasons.empty();
  for (std::size_t k = 0; k < reasons.size(); ++k) rep.reason += (k ? "; " : "") + reasons[k];
  return rep;
}

}  // namespace sgcert
