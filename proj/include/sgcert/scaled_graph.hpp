#pragma once

#include "sgcert/lti.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sgcert {

/// Frequency grid: `points` log-spaced values in [w_min, w_max] plus the
/// optional endpoints 0 and infinity. With extend_to_poles the range is
/// widened to cover [slowest/100, fastest*100] of the system being sampled.
struct GridSpec {
  double w_min = 1e-3;
  double w_max = 1e4;
  int points = 400;
  bool include_zero = true;
  bool include_infinity = true;
  bool extend_to_poles = true;
  /// If nonempty, used verbatim (finite values only) instead of the log grid.
  std::vector<double> explicit_omegas;

  static GridSpec log(double w_min, double w_max, int points) {
    GridSpec g;
    g.w_min = w_min;
    g.w_max = w_max;
    g.points = points;
    return g;
  }
};

/// Ascending frequency list; infinity last when included.
std::vector<Frequency> make_grid(const GridSpec& spec, const StateSpace* sys = nullptr);

struct GainPhasePoint {
  Complex z;
  Frequency freq;
  int direction_index = 0;
  /// Marker for the point at infinity (image of z = 0 under inversion).
  bool infinite = false;
};

struct SgCloud {
  std::vector<GainPhasePoint> points;
  GridSpec grid;
  int n_dirs = 0;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  bool has_infinity() const;
  /// Largest |conj(z) - nearest member| over the cloud; 0 for a closed cloud.
  double conjugate_closure_error() const;
};

/// rho e^{+j theta} and rho e^{-j theta} for rho = sqrt(y_energy/u_energy),
/// theta = arccos(inner / sqrt(u_energy y_energy)), theta = 0 when y_energy = 0.
/// The cosine is clamped to [-1, 1]. Throws InvalidArgument when u_energy <= 0
/// or when |inner| exceeds the Cauchy-Schwarz bound by more than 1e-12 relative.
std::array<Complex, 2> gain_phase(double u_energy, double y_energy, double inner);

/// Unit directions used for a matrix with n columns: the standard basis,
/// pairwise combinations (e_i + p e_j)/sqrt(2) for p in {1, j, -1, -j}, and
/// n_random seeded Gaussian directions. For n = 1 only e_1 is returned.
std::vector<CVector> sample_directions(Eigen::Index n, int n_random, std::uint64_t seed);

/// Frequency-wise scaled graph samples of the matrix M. Conjugates are
/// emitted for points off the real axis.
SgCloud sg_matrix_sample(const CMatrix& M, int n_dirs, std::uint64_t seed, Frequency f = Frequency::at(0.0));

struct SampleOptions {
  GridSpec grid;
  int n_dirs = 64;
  std::uint64_t seed = 1;
  /// 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Union of sg_matrix_sample over the grid. Throws UnstableSystem unless sys is Hurwitz.
/// The output is independent of the thread count.
SgCloud sg_system_sample(const StateSpace& sys, const SampleOptions& opt = {});

/// z -> 1/z, with z = 0 mapped to an infinity marker and markers mapped to 0.
SgCloud invert_cloud(const SgCloud& cloud);

/// Pointwise negation.
SgCloud negate_cloud(const SgCloud& cloud);

/// inf |a - b| over finite members; 0 when both contain an infinity marker.
/// Throws InvalidArgument for empty input.
double cloud_distance(const SgCloud& a, const SgCloud& b);

/// Largest pairwise distance among finite points.
double cloud_diameter(const SgCloud& c);

/// Hyperbolic convex hull. Points with Im z > 0 are mapped to the
/// Beltrami-Klein disk, their Euclidean hull is taken there and the
/// vertices are mapped back; the two extreme real-axis points are kept.
/// Conjugates of the upper vertices are appended.
SgCloud h_convex_hull(const SgCloud& cloud);

/// CSV with header omega,re,im,direction_index; omega is "inf" at infinity.
void write_cloud_csv(std::ostream& os, const SgCloud& cloud);
SgCloud read_cloud_csv(std::istream& is);

}  // namespace sgcert
