#include "sgcert/scaled_graph.hpp"

#include "sgcert/error.hpp"
#include "sgcert/parallel.hpp"
#include "sgcert/regions.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace sgcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct XSorted {
  std::vector<Complex> pts;
  explicit XSorted(const SgCloud& c) {
    for (const auto& p : c.points)
      if (!p.infinite) pts.push_back(p.z);
    std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  }
  /// Distance from z to the nearest stored point, pruned by |dx|.
  double nearest(Complex z, double best = kInf) const {
    auto it = std::lower_bound(pts.begin(), pts.end(), z.real(), [](Complex a, double x) { return a.real() < x; });
    for (auto r = it; r != pts.end() && r->real() - z.real() < best; ++r) best = std::min(best, std::abs(*r - z));
    for (auto l = it; l != pts.begin();) {
      --l;
      if (z.real() - l->real() >= best) break;
      best = std::min(best, std::abs(*l - z));
    }
    return best;
  }
};

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

/// Andrew's monotone chain; returns hull vertices in counter-clockwise order.
std::vector<std::size_t> convex_hull_indices(const std::vector<Eigen::Vector2d>& p) {
  std::vector<std::size_t> idx(p.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  if (p.size() < 3) return idx;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return p[a](0) < p[b](0) || (p[a](0) == p[b](0) && p[a](1) < p[b](1));
  });
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  for (std::size_t i : idx) {
    while (k >= 2 && cross(p[h[k - 2]], p[h[k - 1]], p[i]) <= 0.0) --k;
    h[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
    const std::size_t i = idx[t];
    while (k >= lower && cross(p[h[k - 2]], p[h[k - 1]], p[i]) <= 0.0) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  return h;
}

void emit(std::vector<GainPhasePoint>& out, Complex z, Frequency f, int dir) {
  out.push_back({z, f, dir, false});
  if (z.imag() != 0.0) out.push_back({std::conj(z), f, dir, false});
}

}  // namespace

std::vector<Frequency> make_grid(const GridSpec& spec, const StateSpace* sys) {
  std::vector<Frequency> out;
  if (spec.include_zero) out.push_back(Frequency::at(0.0));
  if (!spec.explicit_omegas.empty()) {
    std::vector<double> w = spec.explicit_omegas;
    std::sort(w.begin(), w.end());
    for (double v : w) {
      if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("grid frequencies must be finite and non-negative");
      if (v == 0.0 && spec.include_zero) continue;
      out.push_back(Frequency::at(v));
    }
  } else {
    if (!(spec.w_min > 0.0) || !(spec.w_max > spec.w_min) || spec.points < 2)
      throw InvalidArgument("grid needs 0 < w_min < w_max and at least 2 points");
    double lo = spec.w_min, hi = spec.w_max;
    if (spec.extend_to_poles && sys) {
      const auto pr = pole_range(*sys);
      if (pr.any) {
        lo = std::min(lo, pr.slowest * 1e-2);
        hi = std::max(hi, pr.fastest * 1e2);
      }
    }
    const double a = std::log10(lo), b = std::log10(hi);
    for (int k = 0; k < spec.points; ++k)
      out.push_back(Frequency::at(std::pow(10.0, a + (b - a) * k / (spec.points - 1))));
  }
  if (spec.include_infinity) out.push_back(Frequency::infinity());
  return out;
}

bool SgCloud::has_infinity() const {
  return std::any_of(points.begin(), points.end(), [](const auto& p) { return p.infinite; });
}

double SgCloud::conjugate_closure_error() const {
  XSorted s(*this);
  double worst = 0.0;
  for (const auto& p : points)
    if (!p.infinite) worst = std::max(worst, s.nearest(std::conj(p.z)));
  return worst;
}

std::array<Complex, 2> gain_phase(double u_energy, double y_energy, double inner) {
  if (!(u_energy > 0.0)) throw InvalidArgument("SG undefined for zero input");
  if (y_energy < 0.0) throw InvalidArgument("output energy must be non-negative");
  const double rho = std::sqrt(y_energy / u_energy);
  double cos_t = 1.0;
  if (y_energy > 0.0) {
    const double denom = std::sqrt(u_energy * y_energy);
    if (std::abs(inner) > denom * (1.0 + 1e-12) + 1e-300)
      throw InvalidArgument("inner product violates the Cauchy-Schwarz bound");
    cos_t = std::clamp(inner / denom, -1.0, 1.0);
  }
  // cos/sin directly rather than polar(acos(.)), so theta = pi stays on the real axis.
  const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  return {Complex(rho * cos_t, rho * sin_t), Complex(rho * cos_t, -rho * sin_t)};
}

std::vector<CVector> sample_directions(Eigen::Index n, int n_random, std::uint64_t seed) {
  std::vector<CVector> dirs;
  if (n <= 0) return dirs;
  for (Eigen::Index i = 0; i < n; ++i) dirs.push_back(CVector::Unit(n, i));
  if (n == 1) return dirs;
  const Complex phases[] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  const double h = std::sqrt(0.5);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      for (Complex p : phases) {
        CVector u = CVector::Zero(n);
        u(i) = h;
        u(j) = p * h;
        dirs.push_back(u);
      }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < n_random; ++k) {
    CVector u(n);
    for (Eigen::Index i = 0; i < n; ++i) u(i) = Complex(g(rng), g(rng));
    dirs.push_back(u / u.norm());
  }
  return dirs;
}

SgCloud sg_matrix_sample(const CMatrix& M, int n_dirs, std::uint64_t seed, Frequency f) {
  if (M.rows() != M.cols()) throw InvalidArgument("scaled graph sampling needs a square matrix");
  if (n_dirs < 1) throw InvalidArgument("n_dirs must be at least 1");
  SgCloud cloud;
  cloud.n_dirs = n_dirs;
  cloud.seed = seed;
  const auto dirs = sample_directions(M.rows(), n_dirs, seed);
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const CVector& u = dirs[k];
    const CVector y = M * u;
    const double uu = u.squaredNorm();
    const double yy = y.squaredNorm();
    const double inner = u.dot(y).real();  // Re <u, y> = u^* Hs u
    const auto zs = gain_phase(uu, yy, inner);
    emit(cloud.points, zs[0], f, static_cast<int>(k));
  }
  return cloud;
}

SgCloud sg_system_sample(const StateSpace& sys, const SampleOptions& opt) {
  require_hurwitz(sys, "sg_system_sample");
  const auto freqs = make_grid(opt.grid, &sys);
  std::vector<std::vector<GainPhasePoint>> parts(freqs.size());
  // One direction set for all frequencies keeps direction_index meaningful across the grid.
  parallel_for(freqs.size(), opt.threads, [&](std::size_t k) {
    const CMatrix H = freq_response(sys, freqs[k]);
    parts[k] = sg_matrix_sample(H, opt.n_dirs, opt.seed, freqs[k]).points;
  });
  SgCloud cloud;
  cloud.grid = opt.grid;
  cloud.n_dirs = opt.n_dirs;
  cloud.seed = opt.seed;
  for (auto& p : parts) cloud.points.insert(cloud.points.end(), p.begin(), p.end());
  return cloud;
}

SgCloud invert_cloud(const SgCloud& cloud) {
  SgCloud out = cloud;
  for (auto& p : out.points) {
    if (p.infinite) {
      p.infinite = false;
      p.z = 0.0;
    } else if (p.z == Complex(0.0, 0.0)) {
      p.infinite = true;
    } else {
      p.z = 1.0 / p.z;
    }
  }
  return out;
}

SgCloud negate_cloud(const SgCloud& cloud) {
  SgCloud out = cloud;
  for (auto& p : out.points)
    if (!p.infinite) p.z = -p.z;
  return out;
}

double cloud_distance(const SgCloud& a, const SgCloud& b) {
  if (a.points.empty() || b.points.empty()) throw InvalidArgument("cloud_distance needs nonempty clouds");
  if (a.has_infinity() && b.has_infinity()) return 0.0;
  const SgCloud& small = a.size() <= b.size() ? a : b;
  const SgCloud& large = a.size() <= b.size() ? b : a;
  XSorted s(large);
  double best = kInf;
  for (const auto& p : small.points)
    if (!p.infinite) best = s.nearest(p.z, best);
  return best;
}

double cloud_diameter(const SgCloud& c) {
  std::vector<Eigen::Vector2d> pts;
  for (const auto& p : c.points)
    if (!p.infinite) pts.emplace_back(p.z.real(), p.z.imag());
  const auto hull = convex_hull_indices(pts);
  double d = 0.0;
  for (std::size_t i : hull)
    for (std::size_t j : hull) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

SgCloud h_convex_hull(const SgCloud& cloud) {
  SgCloud out;
  out.grid = cloud.grid;
  out.n_dirs = cloud.n_dirs;
  out.seed = cloud.seed;
  std::vector<Eigen::Vector2d> w;
  std::vector<const GainPhasePoint*> src;
  const GainPhasePoint* lo = nullptr;
  const GainPhasePoint* hi = nullptr;
  for (const auto& p : cloud.points) {
    if (p.infinite) {
      out.points.push_back(p);
      continue;
    }
    if (p.z.imag() > 0.0) {
      w.push_back(bk_map(p.z));
      src.push_back(&p);
    } else if (p.z.imag() == 0.0) {
      if (!lo || p.z.real() < lo->z.real()) lo = &p;
      if (!hi || p.z.real() > hi->z.real()) hi = &p;
    }
  }
  for (std::size_t i : convex_hull_indices(w)) {
    GainPhasePoint v = *src[i];
    v.z = bk_inverse(w[i]);
    out.points.push_back(v);
    GainPhasePoint c = v;
    c.z = std::conj(v.z);
    out.points.push_back(c);
  }
  if (lo) out.points.push_back(*lo);
  if (hi && hi != lo) out.points.push_back(*hi);
  return out;
}

void write_cloud_csv(std::ostream& os, const SgCloud& cloud) {
  os << "omega,re,im,direction_index\n";
  std::ostringstream line;
  line.precision(17);
  for (const auto& p : cloud.points) {
    line.str("");
    line << to_string(p.freq) << ',';
    if (p.infinite)
      line << "inf,inf";
    else
      line << p.z.real() << ',' << p.z.imag();
    line << ',' << p.direction_index << '\n';
    os << line.str();
  }
}

SgCloud read_cloud_csv(std::istream& is) {
  SgCloud cloud;
  std::string line;
  if (!std::getline(is, line) || line.rfind("omega,re,im,direction_index", 0) != 0)
    throw InvalidArgument("cloud CSV must start with header omega,re,im,direction_index");
  auto parse = [](const std::string& s) {
    if (s == "inf") return kInf;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw InvalidArgument("bad number '" + s + "' in cloud CSV");
    return v;
  };
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() != 4) throw InvalidArgument("cloud CSV line " + std::to_string(lineno) + ": expected 4 columns");
    GainPhasePoint p;
    const double w = parse(cols[0]);
    p.freq = std::isinf(w) ? Frequency::infinity() : Frequency::at(w);
    const double re = parse(cols[1]), im = parse(cols[2]);
    p.infinite = std::isinf(re) || std::isinf(im);
    p.z = p.infinite ? Complex(0.0, 0.0) : Complex(re, im);
    p.direction_index = std::stoi(cols[3]);
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace sgcert
