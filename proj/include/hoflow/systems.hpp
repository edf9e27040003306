// Named dynamical systems: the five full flows and the reduced special cases,
// each with its component labels and (where one exists) the embedding of its
// state into a full diagonal metric of a given class.

#ifndef HOFLOW_SYSTEMS_HPP
#define HOFLOW_SYSTEMS_HPP

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hoflow/geometry.hpp"
#include "hoflow/reduced.hpp"

namespace hoflow {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct System {
  std::string name;
  std::array<std::string, N> labels;
  double alpha_prime = 0.0;
  std::function<Vec<N>(const Vec<N>&)> rhs;
  // Full-metric embedding (for curvature and degeneracy classification).
  std::optional<GeometryClass> geometry;
  std::function<MetricState(const Vec<N>&)> embed;
  // Extra initial-state constraint beyond positivity; returns an error message or "".
  std::function<std::string(const Vec<N>&)> check_initial;

  bool has_embedding() const { return geometry.has_value() && static_cast<bool>(embed); }
};

/// Throws DegenerateMetricError naming the first non-positive component, or
/// ReducedDomainError for a violated system-specific constraint.
template <std::size_t N>
void validate_initial(const System<N>& sys, const Vec<N>& y) {
  for (std::size_t i = 0; i < N; ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) throw DegenerateMetricError(sys.labels[i], y[i]);
  }
  if (sys.check_initial) {
    if (auto msg = sys.check_initial(y); !msg.empty()) throw ReducedDomainError(msg);
  }
}

inline System<3> full_system(GeometryClass cls, double alpha_prime) {
  const auto sc = structure_constants(cls);
  System<3> s;
  s.name = std::string(to_string(cls));
  s.labels = {"A", "B", "C"};
  s.alpha_prime = alpha_prime;
  s.rhs = [sc, alpha_prime](const Vec<3>& y) {
    return flow_rhs(sc, MetricState::from_array(y), alpha_prime);
  };
  s.geometry = cls;
  s.embed = [](const Vec<3>& y) { return MetricState::from_array(y); };
  return s;
}

inline System<2> berger_system(double alpha_prime) {
  System<2> s;
  s.name = "berger";
  s.labels = {"A", "B"};
  s.alpha_prime = alpha_prime;
  s.rhs = [alpha_prime](const Vec<2>& y) { return berger_su2_rhs(y[0], y[1], alpha_prime); };
  s.geometry = GeometryClass::SU2;
  s.embed = [](const Vec<2>& y) { return MetricState{y[0], y[1], y[1]}; };
  return s;
}

inline System<1> nil_xi_system(double alpha_prime) {
  System<1> s;
  s.name = "nil-xi";
  s.labels = {"xi"};
  s.alpha_prime = alpha_prime;
  s.rhs = [alpha_prime](const Vec<1>& y) { return Vec<1>{nil_xi_rhs(y[0], alpha_prime)}; };
  return s;
}

inline System<2> nil_special_system(double alpha_prime) {
  System<2> s;
  s.name = "nil-special";
  s.labels = {"A", "B"};
  s.alpha_prime = alpha_prime;
  s.rhs = [alpha_prime](const Vec<2>& y) { return nil_special_rhs(y[0], y[1], alpha_prime); };
  s.geometry = GeometryClass::Nil;
  s.embed = [](const Vec<2>& y) { return MetricState{y[0], y[1], y[1]}; };
  return s;
}

inline System<2> sol_special_system(double alpha_prime) {
  System<2> s;
  s.name = "sol-special";
  s.labels = {"A", "B"};
  s.alpha_prime = alpha_prime;
  s.rhs = [alpha_prime](const Vec<2>& y) { return sol_special_rhs(y[0], y[1], alpha_prime); };
  s.geometry = GeometryClass::Sol;
  s.embed = [](const Vec<2>& y) { return MetricState{y[0], y[1], y[0]}; };
  return s;
}

// Same orbits as sol-special, half the speed (printed time parametrisation).
inline System<2> sol_special_printed_system(double alpha_prime) {
  auto s = sol_special_system(alpha_prime);
  s.name = "sol-special-printed";
  s.rhs = [alpha_prime](const Vec<2>& y) { return sol_special_printed_rhs(y[0], y[1], alpha_prime); };
  return s;
}

inline System<3> isom_eta_system(double alpha_prime) {
  System<3> s;
  s.name = "isom-eta";
  s.labels = {"A", "eta", "C"};
  s.alpha_prime = alpha_prime;
  s.rhs = [alpha_prime](const Vec<3>& y) { return isom_eta_rhs(y[0], y[1], y[2], alpha_prime); };
  s.geometry = GeometryClass::IsomR2;
  s.embed = [](const Vec<3>& y) { return MetricState{y[0], y[1] * y[0], y[2]}; };
  s.check_initial = [](const Vec<3>& y) -> std::string {
    return y[1] <= 1.0 ? "" : "isom-eta requires 0 < eta <= 1 at the start";
  };
  return s;
}

inline System<2> sl2r_special_system(double alpha_prime) {
  System<2> s;
  s.name = "sl2r-special";
  s.labels = {"A", "C"};
  s.alpha_prime = alpha_prime;
  s.rhs = [alpha_prime](const Vec<2>& y) { return sl2r_special_rhs(y[0], y[1], alpha_prime); };
  s.geometry = GeometryClass::SL2R;
  s.embed = [](const Vec<2>& y) { return MetricState{y[0], y[0], y[1]}; };
  return s;
}

using AnySystem = std::variant<System<1>, System<2>, System<3>>;

inline const std::vector<std::string>& system_names() {
  static const std::vector<std::string> names = {
      "su2",         "nil",         "sol",          "isom",      "sl2r",
      "berger",      "nil-xi",      "nil-special",  "sol-special", "sol-special-printed",
      "isom-eta",    "sl2r-special"};
  return names;
}

/// Looks up a system by name; std::nullopt if unknown.
inline std::optional<AnySystem> make_system(std::string_view name, double alpha_prime) {
  if (auto cls = parse_geometry_class(name)) return AnySystem{full_system(*cls, alpha_prime)};
  if (name == "berger") return AnySystem{berger_system(alpha_prime)};
  if (name == "nil-xi") return AnySystem{nil_xi_system(alpha_prime)};
  if (name == "nil-special") return AnySystem{nil_special_system(alpha_prime)};
  if (name == "sol-special") return AnySystem{sol_special_system(alpha_prime)};
  if (name == "sol-special-printed") return AnySystem{sol_special_printed_system(alpha_prime)};
  if (name == "isom-eta") return AnySystem{isom_eta_system(alpha_prime)};
  if (name == "sl2r-special") return AnySystem{sl2r_special_system(alpha_prime)};
  return std::nullopt;
}

}  // namespace hoflow

#endif  // HOFLOW_SYSTEMS_HPP
