// Conserved quantities known for each registered system, and drift
// measurement along trajectories.

#ifndef HOFLOW_CONSERVED_HPP
#define HOFLOW_CONSERVED_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hoflow/integrator.hpp"
#include "hoflow/reduced.hpp"

namespace hoflow {

template <std::size_t N>
struct Invariant {
  std::string name;
  std::function<double(const Vec<N>&)> value;
};

/// Invariants of `sys` at its own alpha'. Empty when none are known.
template <std::size_t N>
std::vector<Invariant<N>> invariants_for(const System<N>& sys) {
  std::vector<Invariant<N>> out;
  const double ap = sys.alpha_prime;
  if constexpr (N == 3) {
    if (sys.name == "nil") {
      out.push_back({"B/C", [](const Vec<3>& y) { return y[1] / y[2]; }});
    } else if (sys.name == "isom" && ap == 0.0) {
      out.push_back({"AB", [](const Vec<3>& y) { return isom_invariants_alpha0(y[0], y[1], y[2]).prod; }});
      out.push_back({"(A+B)C/sqrt(AB)",
                     [](const Vec<3>& y) { return isom_invariants_alpha0(y[0], y[1], y[2]).combo; }});
    } else if (sys.name == "isom-eta" && ap == 0.0) {
      out.push_back({"AB", [](const Vec<3>& y) { return y[1] * y[0] * y[0]; }});
      out.push_back({"(A+B)C/sqrt(AB)", [](const Vec<3>& y) {
                       return isom_invariants_alpha0(y[0], y[1] * y[0], y[2]).combo;
                     }});
    }
  } else if constexpr (N == 2) {
    if (sys.name == "sol-special" || sys.name == "sol-special-printed") {
      out.push_back({"A(1-4a'/B)", [ap](const Vec<2>& y) { return sol_invariant(y[0], y[1], ap); }});
    } else if (sys.name == "sl2r-special" && ap == 0.0) {
      out.push_back({"C^2A/(A+C)", [](const Vec<2>& y) { return sl2r_invariant_alpha0(y[0], y[1]); }});
    }
  }
  return out;
}

struct DriftSummary {
  std::string name;
  double initial = 0.0;
  double max_rel_drift = 0.0;
};

/// max |I(y) - I(y0)| / |I(y0)| over the samples (absolute when I(y0) = 0).
template <std::size_t N>
std::vector<DriftSummary> measure_drift(const Trajectory<N>& traj, const std::vector<Invariant<N>>& invs) {
  std::vector<DriftSummary> out;
  for (const auto& inv : invs) {
    DriftSummary d{inv.name, inv.value(traj.initial), 0.0};
    const double scale = d.initial != 0.0 ? std::abs(d.initial) : 1.0;
    for (const auto& s : traj.samples) {
      d.max_rel_drift = std::max(d.max_rel_drift, std::abs(inv.value(s.state) - d.initial) / scale);
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace hoflow

#endif  // HOFLOW_CONSERVED_HPP
