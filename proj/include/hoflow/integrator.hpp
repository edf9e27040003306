// Adaptive Dormand-Prince 5(4) integration of a System<N> in either time
// direction, with the 4th-order continuous extension for dense output.
//
// Backward runs integrate tau = -t with the negated vector field; all public
// times are real flow times (t <= 0 for backward runs).

#ifndef HOFLOW_INTEGRATOR_HPP
#define HOFLOW_INTEGRATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hoflow/geometry.hpp"
#include "hoflow/systems.hpp"

namespace hoflow {

enum class Direction { forward, backward };

inline double sign_of(Direction d) { return d == Direction::forward ? 1.0 : -1.0; }

inline std::string_view to_string(Direction d) {
  return d == Direction::forward ? "forward" : "backward";
}

enum class Terminal { reached_t_max, singular, fixed_point_converged, step_failure };

inline std::string_view to_string(Terminal t) {
  switch (t) {
    case Terminal::reached_t_max: return "reached_t_max";
    case Terminal::singular: return "singular";
    case Terminal::fixed_point_converged: return "fixed_point_converged";
    case Terminal::step_failure: return "step_failure";
  }
  return "?";
}

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

struct IntegratorControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double min_scale_floor = 1e-9;  // a component at or below this is a positivity breach
  std::size_t max_steps = 2'000'000;
  double fixed_point_tol = 0.0;   // stop once max|f| <= this; 0 disables
  double blowup_ceiling = 1e12;   // a component above this ends the run as singular

  void validate() const {
    if (!(abs_tol > 0.0 && abs_tol <= rel_tol && rel_tol < 1.0)) {
      throw ConfigError("integrator tolerances need 0 < abs_tol <= rel_tol < 1");
    }
    if (!(min_scale_floor > 0.0)) throw ConfigError("min_scale_floor must be positive");
    if (!(max_step > 0.0)) throw ConfigError("max_step must be positive");
    if (max_steps == 0) throw ConfigError("max_steps must be positive");
  }
};

struct FlowParams {
  double alpha_prime = 0.0;
  Direction direction = Direction::forward;
  double t_max = 1.0;
  IntegratorControls controls;

  void validate() const {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be positive and finite");
    controls.validate();
  }
};

/// Where to sample. `times` (real flow times, in run order) wins over `count`
/// evenly spaced samples on [0, t_max]; with neither, every accepted step is
/// recorded.
struct OutputSpec {
  std::vector<double> times;
  std::size_t count = 0;
};

template <std::size_t N>
struct Sample {
  double t = 0.0;
  Vec<N> state{};
  std::optional<CurvatureBundle> curvature;
};

// One accepted step with its continuous extension, in integration time tau.
template <std::size_t N>
struct DenseSegment {
  double tau0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 5> r{};

  Vec<N> eval(double tau) const {
    const double th = (tau - tau0) / h;
    const double th1 = 1.0 - th;
    Vec<N> y{};
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
    }
    return y;
  }
};

template <std::size_t N>
struct Trajectory {
  std::vector<Sample<N>> samples;
  Direction direction = Direction::forward;
  Terminal terminal = Terminal::reached_t_max;
  std::vector<DenseSegment<N>> segments;
  Vec<N> initial{};
  Vec<N> final_state{};
  double tau_end = 0.0;  // |t| reached
  // Smallest tau known to be unreachable (singular runs only).
  double fail_tau = std::numeric_limits<double>::infinity();
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  double t_end() const { return sign_of(direction) * tau_end; }

  /// Dense-output state at real time t within the integrated span.
  Vec<N> state_at(double t) const {
    const double tau = sign_of(direction) * t;
    if (segments.empty() || tau <= segments.front().tau0) return initial;
    if (tau >= tau_end) return final_state;
    auto it = std::upper_bound(segments.begin(), segments.end(), tau,
                               [](double v, const DenseSegment<N>& s) { return v < s.tau0; });
    return std::prev(it)->eval(tau);
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

template <std::size_t N>
bool admissible(const Vec<N>& y) {
  for (double v : y) {
    if (!(v > 0.0) || !std::isfinite(v)) return false;
  }
  return true;
}

template <std::size_t N>
bool finite(const Vec<N>& y) {
  for (double v : y) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template <std::size_t N>
double max_abs(const Vec<N>& y) {
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  return m;
}

// Shortest e-folding time min_i y_i / |f_i|.
template <std::size_t N>
double time_scale(const Vec<N>& y, const Vec<N>& f) {
  double ts = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < N; ++i) {
    if (f[i] != 0.0) ts = std::min(ts, std::abs(y[i] / f[i]));
  }
  return ts;
}

template <std::size_t N>
struct RunState {
  Terminal terminal = Terminal::reached_t_max;
  double tau = 0.0;
  Vec<N> y{};
  double fail_tau = std::numeric_limits<double>::infinity();
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

// Integrates dy/dtau = sign * rhs(y) from (tau0, y0) to tau_end, invoking
// on_step(segment) for each accepted step.
template <std::size_t N, class OnStep>
RunState<N> run(const System<N>& sys, double sign, double tau0, const Vec<N>& y0, double tau_end,
                const IntegratorControls& c, OnStep&& on_step) {
  using T = Dopri;
  auto F = [&](const Vec<N>& y) {
    Vec<N> f = sys.rhs(y);
    for (auto& v : f) v *= sign;
    return f;
  };

  RunState<N> st;
  st.tau = tau0;
  st.y = y0;
  Vec<N> f = F(st.y);

  const double span = tau_end - tau0;
  double h;
  {
    const double ts = time_scale(st.y, f);
    h = std::isfinite(ts) ? 0.01 * ts : 0.01 * span;
    h = std::min({h, c.max_step, span});
    h = std::max(h, 1e-12 * std::max(1.0, std::abs(tau0)));
  }

  bool last_rejected = false;
  bool breach_recent = false;
  std::size_t steps = 0;

  auto axpy = [](const Vec<N>& y, double hh, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [coef, k] : terms) {
      if (coef == 0.0) continue;
      for (std::size_t i = 0; i < N; ++i) out[i] += hh * coef * (*k)[i];
    }
    return out;
  };

  while (st.tau < tau_end) {
    if (c.fixed_point_tol > 0.0 && max_abs(f) <= c.fixed_point_tol) {
      st.terminal = Terminal::fixed_point_converged;
      return st;
    }
    if (steps++ >= c.max_steps) {
      st.terminal = Terminal::step_failure;
      return st;
    }
    const double remaining = tau_end - st.tau;
    h = std::min({h, c.max_step, remaining});
    const double hmin = 1e-14 * std::max(1.0, std::abs(st.tau));
    if (h < hmin && h < remaining) {
      const double ts = time_scale(st.y, f);
      const bool near_singular = breach_recent || ts < 1e-6 * std::max(1.0, std::abs(st.tau));
      st.terminal = near_singular ? Terminal::singular : Terminal::step_failure;
      if (near_singular) st.fail_tau = std::min(st.fail_tau, st.tau + 4 * std::max(h, hmin));
      return st;
    }

    const Vec<N>& k1 = f;
    bool ok = true;
    auto stage = [&](const Vec<N>& y, Vec<N>& k) {
      if (!ok) return;
      if (!admissible(y)) {
        ok = false;
        return;
      }
      k = F(y);
      if (!finite(k)) ok = false;
    };
    Vec<N> k2{}, k3{}, k4{}, k5{}, k6{}, k7{};
    stage(axpy(st.y, h, {{T::a21, &k1}}), k2);
    stage(axpy(st.y, h, {{T::a31, &k1}, {T::a32, &k2}}), k3);
    stage(axpy(st.y, h, {{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}}), k4);
    stage(axpy(st.y, h, {{T::a51, &k1}, {T::a52, &k2}, {T::a53, &k3}, {T::a54, &k4}}), k5);
    stage(axpy(st.y, h, {{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3}, {T::a64, &k4}, {T::a65, &k5}}), k6);
    const Vec<N> y_new =
        axpy(st.y, h, {{T::a71, &k1}, {T::a73, &k3}, {T::a74, &k4}, {T::a75, &k5}, {T::a76, &k6}});
    stage(y_new, k7);

    if (!ok) {
      breach_recent = true;
      st.fail_tau = std::min(st.fail_tau, st.tau + h);
      h *= 0.25;
      ++st.rejected;
      last_rejected = true;
      continue;
    }

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                            T::e6 * k6[i] + T::e7 * k7[i]);
      const double sc = c.abs_tol + c.rel_tol * std::max(std::abs(st.y[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(e) / sc);
    }

    if (err <= 1.0) {
      DenseSegment<N> seg;
      seg.tau0 = st.tau;
      seg.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        const double dy = y_new[i] - st.y[i];
        const double bspl = h * k1[i] - dy;
        seg.r[0][i] = st.y[i];
        seg.r[1][i] = dy;
        seg.r[2][i] = bspl;
        seg.r[3][i] = dy - h * k7[i] - bspl;
        seg.r[4][i] = h * (T::d1 * k1[i] + T::d3 * k3[i] + T::d4 * k4[i] + T::d5 * k5[i] +
                           T::d6 * k6[i] + T::d7 * k7[i]);
      }
      const bool final_step = h >= remaining;
      st.tau = final_step ? tau_end : st.tau + h;
      seg.h = st.tau - seg.tau0;
      st.y = y_new;
      f = k7;
      ++st.accepted;
      breach_recent = false;
      on_step(seg);

      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (double v : st.y) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (lo <= c.min_scale_floor || hi >= c.blowup_ceiling) {
        st.terminal = Terminal::singular;
        const double ts = time_scale(st.y, f);
        st.fail_tau = std::min(st.fail_tau, st.tau + 2 * (std::isfinite(ts) ? ts : h));
        return st;
      }

      double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, 5.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h *= fac;
      last_rejected = false;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      ++st.rejected;
      last_rejected = true;
    }
  }
  st.terminal = Terminal::reached_t_max;
  return st;
}

}  // namespace detail

template <std::size_t N>
Sample<N> make_sample(const System<N>& sys, double t, const Vec<N>& y) {
  Sample<N> s{t, y, std::nullopt};
  if (sys.has_embedding() && detail::admissible(y)) {
    s.curvature = curvature_bundle(structure_constants(*sys.geometry), sys.embed(y));
  }
  return s;
}

/// Integrates `sys` from y0 over |t| <= t_max in the given direction.
/// Throws DegenerateMetricError / ReducedDomainError for an invalid start and
/// ConfigError for invalid controls or output times.
template <std::size_t N>
Trajectory<N> integrate(const System<N>& sys, const Vec<N>& y0, Direction direction, double t_max,
                        const IntegratorControls& controls, const OutputSpec& output = {}) {
  validate_initial(sys, y0);
  FlowParams{sys.alpha_prime, direction, t_max, controls}.validate();
  const double sign = sign_of(direction);

  std::vector<double> taus;
  if (!output.times.empty()) {
    double prev = -1.0;
    for (double t : output.times) {
      const double tau = sign * t;
      if (tau < 0.0 || tau > t_max * (1 + 1e-15) || tau < prev) {
        throw ConfigError("output times must be ordered in the run direction within [0, t_max]");
      }
      taus.push_back(std::min(tau, t_max));
      prev = tau;
    }
  } else if (output.count == 1) {
    taus.push_back(0.0);
  } else if (output.count > 1) {
    for (std::size_t j = 0; j < output.count; ++j) {
      taus.push_back(j + 1 == output.count ? t_max
                                           : t_max * static_cast<double>(j) / (output.count - 1));
    }
  }

  Trajectory<N> traj;
  traj.direction = direction;
  traj.initial = y0;
  const bool every_step = taus.empty();
  if (every_step) traj.samples.push_back(make_sample(sys, 0.0, y0));

  auto st = detail::run(sys, sign, 0.0, y0, t_max, controls, [&](const DenseSegment<N>& seg) {
    traj.segments.push_back(seg);
    if (every_step) {
      Vec<N> y_end{};
      for (std::size_t i = 0; i < N; ++i) y_end[i] = seg.r[0][i] + seg.r[1][i];
      traj.samples.push_back(make_sample(sys, sign * (seg.tau0 + seg.h), y_end));
    }
  });

  traj.terminal = st.terminal;
  traj.tau_end = st.tau;
  traj.final_state = st.y;
  traj.fail_tau = st.fail_tau;
  traj.accepted = st.accepted;
  traj.rejected = st.rejected;

  if (!every_step) {
    for (double tau : taus) {
      if (tau > traj.tau_end) break;
      traj.samples.push_back(make_sample(sys, sign * tau, traj.state_at(sign * tau)));
    }
    if (traj.terminal != Terminal::reached_t_max &&
        (traj.samples.empty() || sign * traj.samples.back().t < traj.tau_end)) {
      traj.samples.push_back(make_sample(sys, traj.t_end(), traj.final_state));
    }
  }
  return traj;
}

template <std::size_t N>
Trajectory<N> integrate(const System<N>& sys, const Vec<N>& y0, const FlowParams& params,
                        const OutputSpec& output = {}) {
  return integrate(sys, y0, params.direction, params.t_max, params.controls, output);
}

}  // namespace hoflow

#endif  // HOFLOW_INTEGRATOR_HPP
