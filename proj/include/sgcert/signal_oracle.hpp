#pragma once

#include "sgcert/lmi.hpp"
#include "sgcert/lti.hpp"
#include "sgcert/regions.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sgcert {

/// Exponential of a square matrix (Pade scaling and squaring).
Matrix expm(const Matrix& M);

/// How the input behaves between samples.
enum class Hold {
  zoh,  // piecewise constant: u(t) = u_k on [t_k, t_k+1)
  foh,  // piecewise linear interpolation of the samples
};

std::string to_string(Hold h);

/// Exact discretization at step dt: x_{k+1} = Ad x_k + Bd u_k + Bd1 (u_{k+1} - u_k).
/// Bd1 is zero for the zero-order hold.
struct DiscreteSim {
  Matrix Ad, Bd, Bd1, C, D;
  double dt = 0.0;
  Hold hold = Hold::zoh;
};

/// Throws InvalidArgument for dt <= 0.
DiscreteSim discretize(const StateSpace& sys, double dt, Hold hold = Hold::zoh);

/// Uniformly sampled signal: column k holds the value at t = k dt.
struct Signal {
  double dt = 0.0;
  Matrix values;

  Eigen::Index channels() const { return values.rows(); }
  Eigen::Index samples() const { return values.cols(); }
  double horizon() const { return samples() > 0 ? dt * static_cast<double>(samples() - 1) : 0.0; }
};

/// Largest admissible simulation step, 0.1/|fastest pole|; +inf without poles.
double max_time_step(const StateSpace& sys);

/// Response from x(0) = 0. Throws InvalidArgument when dt exceeds
/// max_time_step (the message suggests a step) or the channel count differs
/// from the port count.
Signal simulate(const StateSpace& sys, const Signal& u, Hold hold = Hold::zoh);

enum class InputClass { white_noise, step, sinusoids, chirp };
std::string to_string(InputClass c);
InputClass input_class_from_string(const std::string& s);

struct OracleOptions {
  /// 0 selects 0.02/|fastest pole|, or 0.01 without poles.
  double dt = 0.0;
  /// 0 selects 30/|slowest pole|, or 10 without poles.
  double horizon = 0.0;
  /// Oracle signals are interpolated linearly, which matches trapezoidal quadrature.
  Hold hold = Hold::foh;
  /// Relative weights of white_noise, step, sinusoids, chirp.
  std::array<double, 4> class_weights{1.0, 1.0, 1.0, 1.0};
  unsigned threads = 0;
};

/// Resolved (dt, horizon) for sys under opt.
std::array<double, 2> oracle_timing(const StateSpace& sys, const OracleOptions& opt);

/// Random input of the given class on [0, horizon], reproducible from seed.
/// `band` is the (low, high) frequency range in rad/s that the input should excite.
Signal random_input(InputClass cls, Eigen::Index channels, double dt, double horizon, std::array<double, 2> band,
                    std::uint64_t seed);

/// Trapezoidal integrals of |u|^2, |y|^2 and u^T y on [0, T]. A T between
/// samples closes with a partial interval on interpolated values. Throws
/// InvalidArgument when T lies outside [0, horizon] or y is sampled unlike u.
struct Energies {
  double uu = 0.0, yy = 0.0, uy = 0.0;
};
Energies truncated_energies(const Signal& u, const Signal& y, double T);

struct HardSamplePoint {
  Complex z;
  double T = 0.0;
  std::size_t input_id = 0;
  InputClass input_class = InputClass::white_noise;
};

struct HardSample {
  std::vector<HardSamplePoint> points;  // conjugate pairs, consecutive
  std::size_t skipped = 0;              // trials with input energy below 1e-12
  double dt = 0.0, horizon = 0.0;
};

/// Truncated gain/phase points rho_T e^{+-j theta_T}, one trial per input
/// with T uniform on (0, horizon]. Hurwitz stability is not required.
HardSample sample_hard_sg(const StateSpace& sys, std::size_t n_trials, std::uint64_t seed,
                          const OracleOptions& opt = {});

/// Trapezoidal value of int_0^T [y; u]^T (Pi (x) I) [y; u] dt for the response to u.
/// Throws InvalidArgument when T is negative or beyond the input horizon.
double iqc_quadrature(const StateSpace& sys, const MultiplierPi& pi, const Signal& u, double T,
                      Hold hold = Hold::foh);

struct FactorizationCheck {
  double lhs = 0.0;  // int [y; u]^T Pi [y; u]
  double rhs = 0.0;  // int z^T J z with z = Psi [y; u]
  double residual = 0.0;
  bool ok = false;   // residual <= 1e-9 (1 + |lhs|)
};

/// Both sides of the pointwise J-spectral identity integrated on [0, T].
/// Throws InvalidArgument unless pi is positive-negative.
FactorizationCheck factorization_identity_check(const MultiplierPi& pi, const StateSpace& sys, const Signal& u,
                                                double T, Hold hold = Hold::foh);

struct TrialRecord {
  std::size_t trial_id = 0;
  InputClass input_class = InputClass::white_noise;
  double T = 0.0;
  Complex z;
  double iqc_value = 0.0;
  double energy = 0.0;  // int_0^T |u|^2
  bool skipped = false;
};

struct Counterexample {
  TrialRecord trial;
  Signal input;
};

struct EquivalenceReport {
  bool soft_certified = false;
  CertResult cert;
  std::size_t trials = 0, skipped = 0, violations = 0;
  /// Smallest iqc_value / energy over the trials.
  double min_normalized = 0.0;
  double tolerance = 1e-6;
  std::vector<TrialRecord> log;
  /// Worst violating trial, when any.
  std::optional<Counterexample> counterexample;
  bool pass = false;
  double dt = 0.0, horizon = 0.0;
};

/// Certifies the soft containment, then evaluates the hard IQC on n_trials
/// random inputs and truncations. A value below -tolerance * energy is a
/// violation; pass requires a certified containment and no violations.
/// The trials run even when the containment fails, so the detector can be exercised.
/// Throws UnstableSystem unless sys is Hurwitz and InvalidArgument unless pi is positive-negative.
EquivalenceReport equivalence_trial(const StateSpace& sys, const MultiplierPi& pi, std::size_t n_trials,
                                    std::uint64_t seed, const OracleOptions& opt = {},
                                    const CertifyOptions& cert_opt = {});

/// trial_id,input_class,T,re,im,iqc_value
void write_trial_log_csv(std::ostream& os, const std::vector<TrialRecord>& log);

}  // namespace sgcert
