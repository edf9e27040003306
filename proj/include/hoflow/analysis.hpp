// Fixed points, phase-plane grids, outcome boundaries and per-sample
// curvature / anisotropy series over integrated flows.

#ifndef HOFLOW_ANALYSIS_HPP
#define HOFLOW_ANALYSIS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hoflow/integrator.hpp"
#include "hoflow/singularity.hpp"

namespace hoflow {

template <std::size_t N>
struct Box {
  Vec<N> lo{};
  Vec<N> hi{};

  void validate() const {
    for (std::size_t i = 0; i < N; ++i) {
      if (!(lo[i] >= 0.0 && hi[i] > lo[i]) || !std::isfinite(hi[i])) {
        throw ConfigError("box must satisfy 0 <= lo < hi in every coordinate");
      }
    }
  }
  bool contains(const Vec<N>& y) const {
    for (std::size_t i = 0; i < N; ++i) {
      if (y[i] < lo[i] || y[i] > hi[i]) return false;
    }
    return true;
  }
};

enum class Stability { attracting, repelling, saddle, degenerate };

inline std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::attracting: return "attracting";
    case Stability::repelling: return "repelling";
    case Stability::saddle: return "saddle";
    case Stability::degenerate: return "degenerate";
  }
  return "?";
}

template <std::size_t N>
struct FixedPoint {
  Vec<N> state{};
  double residual_norm = 0.0;
  Stability classification = Stability::degenerate;
  std::vector<std::complex<double>> eigenvalues;
};

namespace detail {

// Stand-in for an exact zero coordinate: the RHS is evaluated as the one-sided
// limit from the positive side.
inline constexpr double kBoundaryEps = 1e-200;

template <std::size_t N>
Vec<N> limit_rhs(const System<N>& sys, Vec<N> y) {
  for (auto& v : y) v = std::max(v, kBoundaryEps);
  return sys.rhs(y);
}

template <std::size_t N>
double norm2(const Vec<N>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Jacobian by central differences, one-sided where the stencil would leave
// the closed positive orthant. Only the columns listed in `free` are filled.
template <std::size_t N>
Eigen::MatrixXd jacobian(const System<N>& sys, const Vec<N>& x, const std::vector<std::size_t>& free) {
  Eigen::MatrixXd J(N, free.size());
  for (std::size_t c = 0; c < free.size(); ++c) {
    const std::size_t j = free[c];
    const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
    Vec<N> xp = x, xm = x;
    xp[j] += h;
    double denom = 2 * h;
    if (x[j] - h >= 0.0) {
      xm[j] -= h;
    } else {
      denom = h;
    }
    const Vec<N> fp = limit_rhs(sys, xp), fm = limit_rhs(sys, xm);
    for (std::size_t i = 0; i < N; ++i) J(i, c) = (fp[i] - fm[i]) / denom;
  }
  return J;
}

// Damped Newton on the coordinates in `free`, clamped to the box.
template <std::size_t N>
Vec<N> newton(const System<N>& sys, Vec<N> x, const Box<N>& box, const std::vector<std::size_t>& free,
              int max_iter = 200) {
  auto clamp = [&](Vec<N>& y) {
    for (std::size_t i = 0; i < N; ++i) y[i] = std::clamp(y[i], box.lo[i], box.hi[i]);
  };
  Vec<N> f = limit_rhs(sys, x);
  double fn = norm2(f);
  for (int it = 0; it < max_iter && fn > 1e-15; ++it) {
    const Eigen::MatrixXd J = jacobian(sys, x, free);
    Eigen::VectorXd rhs(N);
    for (std::size_t i = 0; i < N; ++i) rhs[i] = -f[i];
    const Eigen::VectorXd dx = J.colPivHouseholderQr().solve(rhs);
    if (!dx.allFinite()) break;
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k < 40; ++k, lambda *= 0.5) {
      Vec<N> trial = x;
      for (std::size_t c = 0; c < free.size(); ++c) trial[free[c]] += lambda * dx[c];
      clamp(trial);
      const Vec<N> ft = limit_rhs(sys, trial);
      const double tn = norm2(ft);
      if (std::isfinite(tn) && tn < fn) {
        x = trial;
        f = ft;
        fn = tn;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return x;
}

template <std::size_t N>
Stability classify_eigenvalues(const std::vector<std::complex<double>>& eig) {
  double scale = 1.0;
  for (const auto& e : eig) scale = std::max(scale, std::abs(e));
  const double tol = 1e-6 * scale;
  int neg = 0, pos = 0;
  for (const auto& e : eig) {
    if (e.real() < -tol) ++neg;
    else if (e.real() > tol) ++pos;
  }
  const int n = static_cast<int>(eig.size());
  if (neg == n) return Stability::attracting;
  if (pos == n) return Stability::repelling;
  if (neg > 0 && pos > 0 && neg + pos == n) return Stability::saddle;
  return Stability::degenerate;
}

}  // namespace detail

/// Fixed points of `sys` inside the closed box, from an n_seeds^N grid of
/// damped Newton starts. Boundary points (a coordinate exactly zero) are
/// admitted through one-sided limits.
template <std::size_t N>
std::vector<FixedPoint<N>> find_fixed_points(const System<N>& sys, const Box<N>& box, std::size_t n_seeds) {
  box.validate();
  if (n_seeds == 0) return {};
  std::vector<std::size_t> all(N);
  for (std::size_t i = 0; i < N; ++i) all[i] = i;

  std::vector<FixedPoint<N>> found;
  std::size_t total = 1;
  for (std::size_t i = 0; i < N; ++i) total *= n_seeds;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vec<N> x{};
    std::size_t rem = idx;
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t k = rem % n_seeds;
      rem /= n_seeds;
      x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * (static_cast<double>(k) + 0.5) / n_seeds;
    }
    x = detail::newton(sys, x, box, all);

    // Snap near-zero coordinates onto the boundary and polish the rest.
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < N; ++i) {
      if (x[i] < 1e-6 && box.lo[i] == 0.0) {
        x[i] = 0.0;
      } else {
        free.push_back(i);
      }
    }
    if (!free.empty() && free.size() < N) x = detail::newton(sys, x, box, free);

    const double res = detail::norm2(detail::limit_rhs(sys, x));
    if (!(res < 1e-10) || !box.contains(x)) continue;
    bool dup = false;
    for (const auto& fp : found) {
      Vec<N> d{};
      for (std::size_t i = 0; i < N; ++i) d[i] = fp.state[i] - x[i];
      if (detail::norm2(d) < 1e-6) dup = true;
    }
    if (dup) continue;

    FixedPoint<N> fp;
    fp.state = x;
    fp.residual_norm = res;
    const Eigen::MatrixXd J = detail::jacobian(sys, x, all);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) fp.eigenvalues.push_back(es.eigenvalues()[i]);
    std::sort(fp.eigenvalues.begin(), fp.eigenvalues.end(), [](auto a, auto b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    fp.classification = detail::classify_eigenvalues<N>(fp.eigenvalues);
    found.push_back(std::move(fp));
  }
  std::sort(found.begin(), found.end(), [](const FixedPoint<N>& a, const FixedPoint<N>& b) {
    return a.state < b.state;
  });
  return found;
}

// ------------------------------------------------------------ outcomes

enum class OutcomeKind { collapse, fixed, diverge, bounded, failed };

inline std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::collapse: return "collapse";
    case OutcomeKind::fixed: return "fixed";
    case OutcomeKind::diverge: return "diverge";
    case OutcomeKind::bounded: return "bounded";
    case OutcomeKind::failed: return "failed";
  }
  return "?";
}

struct Outcome {
  OutcomeKind kind = OutcomeKind::bounded;
  std::string detail;  // collapsing/diverging labels, or the fixed point

  std::string label() const {
    return detail.empty() ? std::string(to_string(kind)) : std::string(to_string(kind)) + ":" + detail;
  }
  // Key used to decide whether two seeds lie in the same basin.
  std::string basin() const {
    return kind == OutcomeKind::fixed ? label() : std::string(to_string(kind));
  }
};

namespace detail {

inline std::string short_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, r.ptr);
}

}  // namespace detail

template <std::size_t N>
using OutcomeClassifier = std::function<Outcome(const System<N>&, const Trajectory<N>&)>;

/// Thresholds for the default classifier. A component below `collapse_below`
/// (or a singular stop) is a collapse; above `diverge_above`, or still growing
/// at t_max, is a divergence.
struct OutcomeThresholds {
  double collapse_below = 1e-6;
  double diverge_above = 1e6;
  double capture_radius = 0.05;  // relative to 1 + |fixed point|
};

template <std::size_t N>
OutcomeClassifier<N> default_classifier(std::vector<FixedPoint<N>> fixed_points,
                                        OutcomeThresholds th = {}) {
  return [fps = std::move(fixed_points), th](const System<N>& sys, const Trajectory<N>& tr) -> Outcome {
    const Vec<N>& y = tr.final_state;
    if (tr.terminal == Terminal::step_failure) return {OutcomeKind::failed, ""};
    if (tr.terminal == Terminal::singular) {
      std::string comps;
      for (std::size_t i = 0; i < N; ++i) {
        if (y[i] < th.collapse_below) comps += sys.labels[i];
      }
      if (comps.empty()) {
        for (const auto& c : classify_components(sys, tr.initial, y, tr.direction).collapsing) comps += c;
      }
      return {OutcomeKind::collapse, comps};
    }
    for (const auto& fp : fps) {
      const double radius = th.capture_radius * (1.0 + detail::norm2(fp.state));
      Vec<N> d{};
      for (std::size_t i = 0; i < N; ++i) d[i] = y[i] - fp.state[i];
      if (detail::norm2(d) <= radius) {
        std::string s = "(";
        for (std::size_t i = 0; i < N; ++i) s += (i ? "," : "") + detail::short_number(fp.state[i]);
        return {OutcomeKind::fixed, s + ")"};
      }
    }
    const Vec<N> f = sys.rhs(y);
    std::string growing;
    for (std::size_t i = 0; i < N; ++i) {
      if (y[i] > th.diverge_above || sign_of(tr.direction) * f[i] > 0.0) growing += sys.labels[i];
    }
    if (!growing.empty()) return {OutcomeKind::diverge, growing};
    return {OutcomeKind::bounded, ""};
  };
}

// ------------------------------------------------------------ phase grid

struct GridRunParams {
  double t_max = 50.0;
  IntegratorControls controls;
  std::size_t samples = 200;
  bool both_directions = true;
};

struct PhaseSeed {
  std::size_t row = 0;  // index along the second coordinate
  std::size_t col = 0;  // index along the first coordinate
  Vec<2> state{};
  std::optional<Trajectory<2>> forward;
  std::optional<Trajectory<2>> backward;
  Outcome outcome;
  std::string error;
};

struct PhaseGrid {
  Box<2> box;
  std::size_t n = 0;
  std::vector<PhaseSeed> seeds;  // row-major
};

/// Cell-centred seed of an n x n lattice on the box.
inline Vec<2> grid_seed(const Box<2>& box, std::size_t n, std::size_t row, std::size_t col) {
  return {box.lo[0] + (box.hi[0] - box.lo[0]) * (col + 0.5) / n,
          box.lo[1] + (box.hi[1] - box.lo[1]) * (row + 0.5) / n};
}

inline PhaseGrid phase_grid(const System<2>& sys, const Box<2>& box, std::size_t n, const GridRunParams& params,
                            const OutcomeClassifier<2>& classify) {
  if (n < 2) throw ConfigError("phase grid needs n >= 2");
  box.validate();
  PhaseGrid grid{box, n, {}};
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      PhaseSeed seed;
      seed.row = row;
      seed.col = col;
      seed.state = grid_seed(box, n, row, col);
      try {
        const OutputSpec out{{}, params.samples};
        seed.forward = integrate(sys, seed.state, Direction::forward, params.t_max, params.controls, out);
        seed.outcome = classify(sys, *seed.forward);
        if (params.both_directions) {
          seed.backward = integrate(sys, seed.state, Direction::backward, params.t_max, params.controls, out);
        }
      } catch (const Error& e) {
        seed.outcome = {OutcomeKind::failed, ""};
        seed.error = e.what();
      }
      grid.seeds.push_back(std::move(seed));
    }
  }
  return grid;
}

// ------------------------------------------------------------ critical curve

class NoBoundaryError : public Error {
 public:
  using Error::Error;
};

/// Outcome of the forward flow from a single point.
inline Outcome outcome_at(const System<2>& sys, const Vec<2>& y, const GridRunParams& params,
                          const OutcomeClassifier<2>& classify) {
  try {
    const auto tr = integrate(sys, y, Direction::forward, params.t_max, params.controls, OutputSpec{{}, 2});
    return classify(sys, tr);
  } catch (const Error&) {
    return {OutcomeKind::failed, ""};
  }
}

/// Points on the boundary between forward-outcome basins, found by bisection
/// along the n horizontal and n vertical lattice lines to `resolution`, and
/// ordered along their principal direction.
inline std::vector<Vec<2>> critical_curve(const System<2>& sys, const GridRunParams& params, const Box<2>& box,
                                          const OutcomeClassifier<2>& classify, std::size_t n = 24,
                                          double resolution = 1e-4) {
  if (n < 2) throw ConfigError("critical curve needs n >= 2");
  box.validate();
  auto basin = [&](const Vec<2>& y) { return outcome_at(sys, y, params, classify).basin(); };
  std::vector<Vec<2>> pts;

  for (int axis = 0; axis < 2; ++axis) {
    const int other = 1 - axis;
    for (std::size_t line = 0; line < n; ++line) {
      auto point = [&](double s) {
        Vec<2> y{};
        y[other] = box.lo[other] + (box.hi[other] - box.lo[other]) * (line + 0.5) / n;
        y[axis] = s;
        return y;
      };
      std::vector<double> s(n);
      std::vector<std::string> b(n);
      for (std::size_t k = 0; k < n; ++k) {
        s[k] = box.lo[axis] + (box.hi[axis] - box.lo[axis]) * (k + 0.5) / n;
        b[k] = basin(point(s[k]));
      }
      for (std::size_t k = 0; k + 1 < n; ++k) {
        if (b[k] == b[k + 1]) continue;
        double a = s[k], c = s[k + 1];
        const std::string& left = b[k];
        while (c - a > resolution) {
          const double m = 0.5 * (a + c);
          (basin(point(m)) == left ? a : c) = m;
        }
        pts.push_back(point(0.5 * (a + c)));
      }
    }
  }
  if (pts.empty()) throw NoBoundaryError("no outcome boundary inside the box");

  // Order along the principal axis of the point cloud.
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += Eigen::Vector2d(p[0], p[1]);
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector2d d = Eigen::Vector2d(p[0], p[1]) - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const Eigen::Vector2d dir = es.eigenvectors().col(1);
  auto key = [&](const Vec<2>& p) { return dir.dot(Eigen::Vector2d(p[0], p[1]) - mean); };
  std::sort(pts.begin(), pts.end(), [&](const Vec<2>& a, const Vec<2>& b) { return key(a) < key(b); });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](const Vec<2>& a, const Vec<2>& b) {
                          return std::hypot(a[0] - b[0], a[1] - b[1]) < resolution;
                        }),
            pts.end());
  return pts;
}

// ------------------------------------------------------------ series

struct CurvaturePoint {
  double t = 0.0;
  double scal = 0.0;
  double rc_norm_sq = 0.0;
};

template <std::size_t N>
std::vector<CurvaturePoint> curvature_series(const Trajectory<N>& traj, const System<N>& sys) {
  if (!sys.has_embedding()) throw ConfigError("system " + sys.name + " has no metric embedding");
  const auto sc = structure_constants(*sys.geometry);
  std::vector<CurvaturePoint> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    const MetricState m = sys.embed(s.state);
    out.push_back({s.t, scalar_curvature(sc, m), ricci_norm_sq(sc, m)});
  }
  return out;
}

struct AnisotropyPoint {
  double t = 0.0;
  double a_over_b = 1.0;
  double b_over_c = 1.0;
  double max_pairwise_gap = 0.0;  // max_i zeta_i / min_i zeta_i - 1
};

inline AnisotropyPoint anisotropy_at(double t, const MetricState& m) {
  const double hi = std::max({m.a, m.b, m.c});
  const double lo = std::min({m.a, m.b, m.c});
  return {t, m.a / m.b, m.b / m.c, hi / lo - 1.0};
}

template <std::size_t N>
std::vector<AnisotropyPoint> anisotropy_metrics(const Trajectory<N>& traj, const System<N>& sys) {
  if (!sys.embed) throw ConfigError("system " + sys.name + " has no metric embedding");
  std::vector<AnisotropyPoint> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) out.push_back(anisotropy_at(s.t, sys.embed(s.state)));
  return out;
}

/// All scale-factor ratios within `tol` of 1 at the last sample.
inline bool isotropizes(const std::vector<AnisotropyPoint>& series, double tol = 1e-2) {
  return !series.empty() && series.back().max_pairwise_gap < tol;
}

/// Least-squares slope of ln(v) against ln(t - t0).
inline double power_law_exponent(const std::vector<double>& t, const std::vector<double>& v, double t0 = 0.0) {
  if (t.size() != v.size() || t.size() < 2) throw ConfigError("power-law fit needs >= 2 paired samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] - t0 > 0.0) || !(v[i] > 0.0)) throw ConfigError("power-law fit needs t > t0 and v > 0");
    const double x = std::log(t[i] - t0), y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace hoflow

#endif  // HOFLOW_ANALYSIS_HPP
