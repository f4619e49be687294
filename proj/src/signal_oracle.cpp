#include "sgcert/signal_oracle.hpp"

#include "sgcert/error.hpp"
#include "sgcert/parallel.hpp"
#include "sgcert/scaled_graph.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace sgcert {

namespace {

constexpr double kMinEnergy = 1e-12;

// Value at time t, linearly interpolated; t is clamped to the horizon.
Vector sample_at(const Signal& s, double t) {
  const Eigen::Index last = s.samples() - 1;
  if (last <= 0) return s.values.col(0);
  const double pos = std::clamp(t / s.dt, 0.0, static_cast<double>(last));
  const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(pos)), last - 1);
  const double w = pos - static_cast<double>(k);
  return (1.0 - w) * s.values.col(k) + w * s.values.col(k + 1);
}

// Trapezoidal integral of f(u(t), y(t)) on [0, T].
template <class Fn>
double trapezoid(const Signal& u, const Signal& y, double T, Fn&& f) {
  if (T <= 0.0 || u.samples() < 2) return 0.0;
  const double pos = T / u.dt;
  auto K = static_cast<Eigen::Index>(std::floor(pos + 1e-9));
  K = std::min(K, u.samples() - 1);
  double sum = 0.0;
  double prev = f(u.values.col(0), y.values.col(0));
  for (Eigen::Index k = 1; k <= K; ++k) {
    const double cur = f(u.values.col(k), y.values.col(k));
    sum += 0.5 * (prev + cur);
    prev = cur;
  }
  sum *= u.dt;
  const double rest = T - static_cast<double>(K) * u.dt;
  if (rest > 1e-12 * u.dt && K < u.samples() - 1) sum += 0.5 * rest * (prev + f(sample_at(u, T), sample_at(y, T)));
  return sum;
}

void check_horizon(const Signal& u, double T, const char* what) {
  if (!(T >= 0.0)) throw InvalidArgument(std::string(what) + ": T must be non-negative");
  if (T > u.horizon() * (1.0 + 1e-12) + 1e-15)
    throw InvalidArgument(std::string(what) + ": T = " + std::to_string(T) + " exceeds the simulated horizon " +
                          std::to_string(u.horizon()));
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> U(std::log(lo), std::log(hi));
  return std::exp(U(rng));
}

std::array<double, 2> excitation_band(const StateSpace& sys, double dt) {
  const auto pr = pole_range(sys);
  double lo = 0.1, hi = 10.0;
  if (pr.any && pr.fastest > 0.0) {
    lo = pr.slowest / 10.0;
    hi = pr.fastest * 10.0;
  }
  hi = std::min(hi, std::numbers::pi / (8.0 * dt));
  lo = std::min(lo, 0.5 * hi);
  return {lo, hi};
}

struct TrialOutcome {
  TrialRecord rec;
  Energies e;
};

struct TrialPlan {
  const StateSpace* sys;
  double dt, horizon;
  std::array<double, 2> band;
  Hold hold;
  std::array<double, 4> weights;
};

Signal trial_input(const TrialPlan& plan, std::uint64_t seed, InputClass& cls, double& T) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(plan.weights.begin(), plan.weights.end());
  cls = static_cast<InputClass>(pick(rng));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  // T uniform on (0, horizon], at least one step.
  T = std::max(plan.dt, plan.horizon * (1.0 - U(rng)));
  return random_input(cls, plan.sys->ports(), plan.dt, plan.horizon, plan.band, rng());
}

TrialOutcome run_trial(const TrialPlan& plan, std::size_t id, std::uint64_t seed, const MultiplierPi* pi) {
  TrialOutcome out;
  out.rec.trial_id = id;
  Signal u = trial_input(plan, seed, out.rec.input_class, out.rec.T);
  // Only [0, T] matters; causality lets the simulation stop there.
  const auto keep = std::min<Eigen::Index>(u.samples(), static_cast<Eigen::Index>(std::ceil(out.rec.T / u.dt)) + 1);
  u.values.conservativeResize(Eigen::NoChange, keep);
  const Signal y = simulate(*plan.sys, u, plan.hold);
  out.e = truncated_energies(u, y, out.rec.T);
  out.rec.energy = out.e.uu;
  if (out.e.uu < kMinEnergy) {
    out.rec.skipped = true;
    return out;
  }
  // Round-off can push |uy| marginally past the Cauchy-Schwarz bound.
  const double bound = std::sqrt(out.e.uu * out.e.yy);
  const double inner = std::clamp(out.e.uy, -bound, bound);
  out.rec.z = gain_phase(out.e.uu, out.e.yy, inner)[0];
  if (pi) out.rec.iqc_value = pi->a * out.e.yy + 2.0 * pi->b * out.e.uy + pi->c * out.e.uu;
  return out;
}

}  // namespace

Matrix expm(const Matrix& M) {
  if (M.rows() != M.cols()) throw InvalidArgument("expm: matrix must be square");
  if (M.size() == 0) return M;
  return M.exp();
}

std::string to_string(Hold h) { return h == Hold::zoh ? "zoh" : "foh"; }

DiscreteSim discretize(const StateSpace& sys, double dt, Hold hold) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("discretize: dt must be positive and finite");
  const auto m = sys.states(), n = sys.ports();
  DiscreteSim d;
  d.C = sys.C();
  d.D = sys.D();
  d.dt = dt;
  d.hold = hold;
  d.Bd1 = Matrix::Zero(m, n);
  if (m == 0) {
    d.Ad = Matrix::Zero(0, 0);
    d.Bd = Matrix::Zero(0, n);
    return d;
  }
  if (hold == Hold::zoh) {
    Matrix aug = Matrix::Zero(m + n, m + n);
    aug.topLeftCorner(m, m) = sys.A() * dt;
    aug.topRightCorner(m, n) = sys.B() * dt;
    const Matrix E = expm(aug);
    d.Ad = E.topLeftCorner(m, m);
    d.Bd = E.topRightCorner(m, n);
  } else {
    // [x; v; w] with x' = Ax + Bv, v' = w/dt, w' = 0 carries the linear ramp.
    Matrix aug = Matrix::Zero(m + 2 * n, m + 2 * n);
    aug.topLeftCorner(m, m) = sys.A() * dt;
    aug.block(0, m, m, n) = sys.B() * dt;
    aug.block(m, m + n, n, n).setIdentity();
    const Matrix E = expm(aug);
    d.Ad = E.topLeftCorner(m, m);
    d.Bd = E.block(0, m, m, n);
    d.Bd1 = E.block(0, m + n, m, n);
  }
  return d;
}

double max_time_step(const StateSpace& sys) {
  const auto pr = pole_range(sys);
  if (!pr.any || pr.fastest <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.1 / pr.fastest;
}

Signal simulate(const StateSpace& sys, const Signal& u, Hold hold) {
  if (u.channels() != sys.ports())
    throw InvalidArgument("simulate: input has " + std::to_string(u.channels()) + " channels, system has " +
                          std::to_string(sys.ports()) + " ports");
  if (!(u.dt > 0.0)) throw InvalidArgument("simulate: dt must be positive");
  const double dt_max = max_time_step(sys);
  if (u.dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "simulate: dt = " << u.dt << " exceeds 0.1/|fastest pole| = " << dt_max << "; try dt = "
        << 0.2 * dt_max;
    throw InvalidArgument(msg.str());
  }
  Signal y;
  y.dt = u.dt;
  y.values = sys.D() * u.values;
  if (sys.states() == 0 || u.samples() == 0) return y;
  const DiscreteSim d = discretize(sys, u.dt, hold);
  const bool ramp = hold == Hold::foh;
  Vector x = Vector::Zero(sys.states());
  const Eigen::Index N = u.samples();
  for (Eigen::Index k = 0; k < N; ++k) {
    y.values.col(k).noalias() += d.C * x;
    if (k + 1 == N) break;
    Vector next = d.Ad * x;
    next.noalias() += d.Bd * u.values.col(k);
    if (ramp) next.noalias() += d.Bd1 * (u.values.col(k + 1) - u.values.col(k));
    x.swap(next);
  }
  return y;
}

std::string to_string(InputClass c) {
  switch (c) {
    case InputClass::white_noise: return "white_noise";
    case InputClass::step: return "step";
    case InputClass::sinusoids: return "sinusoids";
    case InputClass::chirp: return "chirp";
  }
  return "unknown";
}

InputClass input_class_from_string(const std::string& s) {
  for (auto c : {InputClass::white_noise, InputClass::step, InputClass::sinusoids, InputClass::chirp})
    if (to_string(c) == s) return c;
  throw InvalidArgument("unknown input class '" + s + "' (expected white_noise, step, sinusoids or chirp)");
}

std::array<double, 2> oracle_timing(const StateSpace& sys, const OracleOptions& opt) {
  const auto pr = pole_range(sys);
  const bool poles = pr.any && pr.fastest > 0.0;
  double dt = opt.dt > 0.0 ? opt.dt : (poles ? 0.02 / pr.fastest : 0.01);
  double horizon = opt.horizon > 0.0 ? opt.horizon : (poles ? 30.0 / pr.slowest : 10.0);
  return {dt, horizon};
}

Signal random_input(InputClass cls, Eigen::Index channels, double dt, double horizon, std::array<double, 2> band,
                    std::uint64_t seed) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw InvalidArgument("random_input: dt and horizon must be positive");
  if (!(band[0] > 0.0) || !(band[1] >= band[0])) throw InvalidArgument("random_input: invalid frequency band");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto N = static_cast<Eigen::Index>(std::ceil(horizon / dt - 1e-9)) + 1;
  Signal s;
  s.dt = dt;
  s.values = Matrix::Zero(channels, N);
  const double two_pi = 2.0 * std::numbers::pi;

  switch (cls) {
    case InputClass::white_noise: {
      // Unit-variance Gauss-Markov noise per channel, then mixed across channels.
      Matrix v(channels, N);
      for (Eigen::Index i = 0; i < channels; ++i) {
        const double phi = std::exp(-log_uniform(rng, band[0], band[1]) * dt);
        const double gain = std::sqrt(1.0 - phi * phi);
        double state = N01(rng);
        for (Eigen::Index k = 0; k < N; ++k) {
          v(i, k) = state;
          state = phi * state + gain * N01(rng);
        }
      }
      Matrix mix(channels, channels);
      for (Eigen::Index i = 0; i < mix.size(); ++i) mix.data()[i] = N01(rng);
      s.values = mix * v;
      break;
    }
    case InputClass::step: {
      for (Eigen::Index i = 0; i < channels; ++i) {
        const double amp = N01(rng);
        const auto onset = static_cast<Eigen::Index>(U(rng) * 0.5 * static_cast<double>(N - 1));
        s.values.row(i).tail(N - onset).setConstant(amp);
      }
      break;
    }
    case InputClass::sinusoids: {
      const int K = 1 + static_cast<int>(U(rng) * 4.0);
      for (int j = 0; j < K; ++j) {
        const double w = log_uniform(rng, band[0], band[1]);
        for (Eigen::Index i = 0; i < channels; ++i) {
          const double amp = N01(rng), ph = two_pi * U(rng);
          for (Eigen::Index k = 0; k < N; ++k) s.values(i, k) += amp * std::cos(w * dt * k + ph);
        }
      }
      break;
    }
    case InputClass::chirp: {
      double w0 = log_uniform(rng, band[0], band[1]), w1 = log_uniform(rng, band[0], band[1]);
      if (std::abs(std::log(w1 / w0)) < 1e-6) w1 = w0 * 1.001;
      const double L = static_cast<double>(N - 1) * dt;
      const double g = std::log(w1 / w0) / L;
      for (Eigen::Index i = 0; i < channels; ++i) {
        const double amp = N01(rng), ph = two_pi * U(rng);
        for (Eigen::Index k = 0; k < N; ++k) {
          const double t = dt * k;
          s.values(i, k) = amp * std::cos(w0 * std::expm1(g * t) / g + ph);
        }
      }
      break;
    }
  }
  return s;
}

Energies truncated_energies(const Signal& u, const Signal& y, double T) {
  check_horizon(u, T, "truncated_energies");
  if (y.samples() != u.samples() || y.dt != u.dt) throw InvalidArgument("truncated_energies: u and y are sampled differently");
  Energies e;
  e.uu = trapezoid(u, y, T, [](const auto& a, const auto&) { return a.squaredNorm(); });
  e.yy = trapezoid(u, y, T, [](const auto&, const auto& b) { return b.squaredNorm(); });
  e.uy = trapezoid(u, y, T, [](const auto& a, const auto& b) { return a.dot(b); });
  return e;
}

HardSample sample_hard_sg(const StateSpace& sys, std::size_t n_trials, std::uint64_t seed, const OracleOptions& opt) {
  const auto [dt, horizon] = oracle_timing(sys, opt);
  const TrialPlan plan{&sys, dt, horizon, excitation_band(sys, dt), opt.hold, opt.class_weights};
  std::vector<TrialOutcome> outcomes(n_trials);
  parallel_for(n_trials, opt.threads,
               [&](std::size_t i) { outcomes[i] = run_trial(plan, i, derive_seed(seed, i), nullptr); });
  HardSample hs;
  hs.dt = dt;
  hs.horizon = horizon;
  for (const auto& o : outcomes) {
    if (o.rec.skipped) {
      ++hs.skipped;
      continue;
    }
    hs.points.push_back({o.rec.z, o.rec.T, o.rec.trial_id, o.rec.input_class});
    hs.points.push_back({std::conj(o.rec.z), o.rec.T, o.rec.trial_id, o.rec.input_class});
  }
  return hs;
}

double iqc_quadrature(const StateSpace& sys, const MultiplierPi& pi, const Signal& u, double T, Hold hold) {
  check_horizon(u, T, "iqc_quadrature");
  const Signal y = simulate(sys, u, hold);
  const Energies e = truncated_energies(u, y, T);
  return pi.a * e.yy + 2.0 * pi.b * e.uy + pi.c * e.uu;
}

FactorizationCheck factorization_identity_check(const MultiplierPi& pi, const StateSpace& sys, const Signal& u,
                                                double T, Hold hold) {
  if (!is_positive_negative(pi)) throw InvalidArgument("factorization_identity_check: multiplier is not positive-negative");
  check_horizon(u, T, "factorization_identity_check");
  const Eigen::Matrix2d psi = j_spectral_factor(pi).psi;
  const Signal y = simulate(sys, u, hold);
  FactorizationCheck fc;
  fc.lhs = trapezoid(u, y, T, [&](const auto& a, const auto& b) {
    return pi.a * b.squaredNorm() + 2.0 * pi.b * a.dot(b) + pi.c * a.squaredNorm();
  });
  fc.rhs = trapezoid(u, y, T, [&](const auto& a, const auto& b) {
    const Vector z1 = psi(0, 0) * b + psi(0, 1) * a;
    const Vector z2 = psi(1, 0) * b + psi(1, 1) * a;
    return z1.squaredNorm() - z2.squaredNorm();
  });
  fc.residual = std::abs(fc.lhs - fc.rhs);
  fc.ok = fc.residual <= 1e-9 * (1.0 + std::abs(fc.lhs));
  return fc;
}

EquivalenceReport equivalence_trial(const StateSpace& sys, const MultiplierPi& pi, std::size_t n_trials,
                                    std::uint64_t seed, const OracleOptions& opt, const CertifyOptions& cert_opt) {
  require_hurwitz(sys, "equivalence_trial");
  if (!is_positive_negative(pi)) throw InvalidArgument("equivalence_trial: multiplier is not positive-negative");
  EquivalenceReport rep;
  rep.cert = certify_multiplier(sys, pi, false, cert_opt);
  rep.soft_certified = rep.cert.feasible;

  const auto [dt, horizon] = oracle_timing(sys, opt);
  rep.dt = dt;
  rep.horizon = horizon;
  const TrialPlan plan{&sys, dt, horizon, excitation_band(sys, dt), opt.hold, opt.class_weights};
  std::vector<TrialOutcome> outcomes(n_trials);
  parallel_for(n_trials, opt.threads,
               [&](std::size_t i) { outcomes[i] = run_trial(plan, i, derive_seed(seed, i), &pi); });

  rep.trials = n_trials;
  rep.min_normalized = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> worst;
  double worst_value = std::numeric_limits<double>::infinity();
  rep.log.reserve(n_trials);
  for (const auto& o : outcomes) {
    rep.log.push_back(o.rec);
    if (o.rec.skipped) {
      ++rep.skipped;
      continue;
    }
    const double normalized = o.rec.iqc_value / o.rec.energy;
    rep.min_normalized = std::min(rep.min_normalized, normalized);
    if (o.rec.iqc_value < -rep.tolerance * o.rec.energy) {
      ++rep.violations;
      if (normalized < worst_value) {
        worst_value = normalized;
        worst = o.rec.trial_id;
      }
    }
  }
  if (worst) {
    Counterexample ce;
    ce.trial = rep.log[*worst];
    InputClass cls;
    double T;
    ce.input = trial_input(plan, derive_seed(seed, *worst), cls, T);
    rep.counterexample = std::move(ce);
  }
  rep.pass = rep.soft_certified && rep.violations == 0;
  return rep;
}

void write_trial_log_csv(std::ostream& os, const std::vector<TrialRecord>& log) {
  os << "trial_id,input_class,T,re,im,iqc_value\n";
  const auto old = os.precision(17);
  for (const auto& r : log) {
    os << r.trial_id << ',' << to_string(r.input_class) << ',' << r.T << ',';
    if (r.skipped)
      os << "nan,nan,nan\n";
    else
      os << r.z.real() << ',' << r.z.imag() << ',' << r.iqc_value << '\n';
  }
  os.precision(old);
}

}  // namespace sgcert
