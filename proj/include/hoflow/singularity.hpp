// Post-processing of integrated trajectories: singularity-time refinement and
// degeneracy classification, sign-change events, and the metric-scaling check.

#ifndef HOFLOW_SINGULARITY_HPP
#define HOFLOW_SINGULARITY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hoflow/integrator.hpp"

namespace hoflow {

enum class Degeneracy { pointlike, pancake, cigar, none };

inline std::string_view to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::pointlike: return "pointlike";
    case Degeneracy::pancake: return "pancake";
    case Degeneracy::cigar: return "cigar";
    case Degeneracy::none: return "none";
  }
  return "?";
}

/// detect_singularity was asked about a run that never left the admissible region.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

struct SingularityReport {
  double t_s = 0.0;
  double t_lo = 0.0;  // last time known reachable
  double t_hi = 0.0;  // first time known unreachable
  std::vector<std::string> collapsing;
  std::vector<std::string> diverging;
  Degeneracy degeneracy = Degeneracy::none;
};

// Normalised log-rate magnitude below which a component counts as neither
// collapsing nor diverging.
inline constexpr double kRateThreshold = 0.05;

namespace detail {

struct ComponentView {
  std::vector<std::string> labels;
  std::vector<double> start;
  std::vector<double> end;
  std::vector<double> log_rate;  // d ln y / d tau in the direction of travel
};

template <std::size_t N>
ComponentView component_view(const System<N>& sys, const Vec<N>& y0, const Vec<N>& y, double sign) {
  ComponentView v;
  if (sys.has_embedding()) {
    const auto sc = structure_constants(*sys.geometry);
    const MetricState m0 = sys.embed(y0), m = sys.embed(y);
    const Triple f = flow_rhs(sc, m, sys.alpha_prime);
    v.labels = {"A", "B", "C"};
    v.start = {m0.a, m0.b, m0.c};
    v.end = {m.a, m.b, m.c};
    for (int i = 0; i < 3; ++i) v.log_rate.push_back(sign * f[i] / v.end[i]);
  } else {
    const Vec<N> f = sys.rhs(y);
    for (std::size_t i = 0; i < N; ++i) {
      v.labels.push_back(sys.labels[i]);
      v.start.push_back(y0[i]);
      v.end.push_back(y[i]);
      v.log_rate.push_back(sign * f[i] / y[i]);
    }
  }
  return v;
}

}  // namespace detail

struct ComponentClassification {
  std::vector<std::string> collapsing;
  std::vector<std::string> diverging;
  Degeneracy degeneracy = Degeneracy::none;
};

/// Classifies each metric component at state y (reached from y0) by its
/// logarithmic rate relative to the fastest one.
template <std::size_t N>
ComponentClassification classify_components(const System<N>& sys, const Vec<N>& y0, const Vec<N>& y,
                                            Direction direction) {
  ComponentClassification rep;
  const auto v = detail::component_view(sys, y0, y, sign_of(direction));
  double scale = 0.0;
  for (double r : v.log_rate) scale = std::max(scale, std::abs(r));
  std::vector<int> state(v.labels.size(), 0);  // -1 collapsing, +1 diverging
  if (scale > 0.0) {
    for (std::size_t i = 0; i < v.labels.size(); ++i) {
      const double s = v.log_rate[i] / scale;
      if (s < -kRateThreshold) state[i] = -1;
      if (s > kRateThreshold) state[i] = 1;
    }
  }
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < v.labels.size(); ++i) {
    if (state[i] < 0) rep.collapsing.push_back(v.labels[i]);
    if (state[i] > 0) rep.diverging.push_back(v.labels[i]);
    if (state[i] <= 0) others.push_back(i);
  }
  const std::size_t n_comp = v.labels.size();
  if (rep.collapsing.size() == n_comp) {
    rep.degeneracy = Degeneracy::pointlike;
  } else if (rep.collapsing.size() == 1 && !rep.diverging.empty()) {
    rep.degeneracy = Degeneracy::pancake;
  } else if (rep.diverging.size() == 1 && others.size() == 2) {
    const auto i = others[0], j = others[1];
    const double gap_end = std::abs(std::log(v.end[i] / v.end[j]));
    const double gap_start = std::abs(std::log(v.start[i] / v.start[j]));
    if (gap_end <= gap_start) rep.degeneracy = Degeneracy::cigar;
  }
  return rep;
}

/// Refines the singularity time of a run that ended in Terminal::singular and
/// classifies which components collapse or diverge.
template <std::size_t N>
SingularityReport detect_singularity(const Trajectory<N>& traj, const System<N>& sys,
                                     const IntegratorControls& controls) {
  if (traj.terminal != Terminal::singular) {
    throw InconclusiveError("no singularity: run ended with " + std::string(to_string(traj.terminal)));
  }
  const double sign = sign_of(traj.direction);
  double lo = traj.tau_end;
  Vec<N> y_lo = traj.final_state;
  double hi = std::isfinite(traj.fail_tau) ? traj.fail_tau : lo * 2 + 1;

  // Probe: can the flow reach tau from (lo, y_lo)?
  auto probe = [&](double tau) {
    return detail::run(sys, sign, lo, y_lo, tau, controls, [](const DenseSegment<N>&) {});
  };

  // A floor-triggered stop only estimates hi; make sure it is really unreachable.
  for (int i = 0; i < 60; ++i) {
    auto r = probe(hi);
    if (r.terminal != Terminal::reached_t_max) {
      if (r.tau > lo) {
        lo = r.tau;
        y_lo = r.y;
      }
      hi = std::min(hi, r.fail_tau);
      break;
    }
    const double width = hi - lo;
    lo = hi;
    y_lo = r.y;
    hi = lo + 2 * width;
  }

  for (int i = 0; i < 200 && hi - lo > std::max(1e-6, 1e-3 * std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    auto r = probe(mid);
    if (r.terminal == Terminal::reached_t_max) {
      lo = mid;
      y_lo = r.y;
    } else {
      if (r.tau > lo) {
        lo = r.tau;
        y_lo = r.y;
      }
      hi = std::min(mid, r.fail_tau);
    }
  }

  SingularityReport rep;
  rep.t_lo = sign * lo;
  rep.t_hi = sign * hi;
  rep.t_s = sign * 0.5 * (lo + hi);

  const auto cls = classify_components(sys, traj.initial, y_lo, traj.direction);
  rep.collapsing = cls.collapsing;
  rep.diverging = cls.diverging;
  rep.degeneracy = cls.degeneracy;
  return rep;
}

template <std::size_t N>
struct EventSpec {
  std::string name;
  std::function<double(double t, const Vec<N>&)> g;
};

struct Event {
  double t = 0.0;
  std::string name;
  bool rising = false;  // g goes from negative to positive in the direction of travel
};

namespace detail {

template <std::size_t N>
double event_root(const DenseSegment<N>& seg, double sign, const EventSpec<N>& spec, double a, double ga,
                  double b) {
  // Bisection in tau to a flow-time resolution of 1e-8.
  while (b - a > 1e-8) {
    const double m = 0.5 * (a + b);
    const double gm = spec.g(sign * m, seg.eval(m));
    if ((gm < 0.0) == (ga < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Sign changes of each functional along the trajectory's dense output.
template <std::size_t N>
std::vector<Event> detect_events(const Trajectory<N>& traj, const std::vector<EventSpec<N>>& specs) {
  std::vector<Event> events;
  const double sign = sign_of(traj.direction);
  constexpr int kSub = 8;
  for (const auto& spec : specs) {
    double g_prev = std::numeric_limits<double>::quiet_NaN();
    for (const auto& seg : traj.segments) {
      double tau_prev = seg.tau0;
      if (std::isnan(g_prev)) g_prev = spec.g(sign * seg.tau0, seg.eval(seg.tau0));
      for (int k = 1; k <= kSub; ++k) {
        const double tau = seg.tau0 + seg.h * k / kSub;
        const double g = spec.g(sign * tau, seg.eval(tau));
        if (g != 0.0 && g_prev != 0.0 && (g < 0.0) != (g_prev < 0.0)) {
          const double root = detail::event_root(seg, sign, spec, tau_prev, g_prev, tau);
          events.push_back({sign * root, spec.name, g > 0.0});
        }
        if (g != 0.0) g_prev = g;
        tau_prev = tau;
      }
    }
  }
  std::stable_sort(events.begin(), events.end(), [&](const Event& a, const Event& b) {
    return sign * a.t < sign * b.t;
  });
  return events;
}

/// max_i |y1_i - omega y2_i| / |y1_i| where y1 is the (state, alpha') flow at t
/// and y2 the (state/omega, alpha'/omega) flow at t/omega.
inline double scaling_equivalence_check(GeometryClass cls, const MetricState& state, double alpha_prime,
                                        double omega, double t,
                                        const IntegratorControls& controls = {}) {
  if (!(omega > 0.0)) throw ConfigError("omega must be positive");
  validate(state);
  const Direction dir = t >= 0.0 ? Direction::forward : Direction::backward;
  const double span = std::abs(t);
  if (span == 0.0) return 0.0;

  auto run_to = [&](double ap, const MetricState& s0, double tt) {
    const auto sys = full_system(cls, ap);
    const auto traj = integrate(sys, s0.as_array(), dir, std::abs(tt), controls, OutputSpec{{tt}, 0});
    if (traj.terminal != Terminal::reached_t_max) {
      throw IntegrationError("scaling check: run stopped early (" + std::string(to_string(traj.terminal)) +
                             ") at t = " + std::to_string(traj.t_end()));
    }
    return traj.final_state;
  };
  const Triple y1 = run_to(alpha_prime, state, t);
  const Triple y2 = run_to(alpha_prime / omega, state.scaled(1.0 / omega), t / omega);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(y1[i] - omega * y2[i]) / std::abs(y1[i]));
  return worst;
}

}  // namespace hoflow

#endif  // HOFLOW_SINGULARITY_HPP
