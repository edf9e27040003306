// Milnor-frame curvature of diagonal left-invariant metrics on 3D unimodular
// Lie groups, and the second-order (Riemann-squared) flow vector field.
//
// Conventions: the metric is A eta1^2 + B eta2^2 + C eta3^2 in a Milnor frame
// with [F2,F3] = lambda F1, [F3,F1] = mu F2, [F1,F2] = nu F3. All quantities
// below are closed forms in (lambda, mu, nu) and (A, B, C).

#ifndef HOFLOW_GEOMETRY_HPP
#define HOFLOW_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hoflow {

using Triple = std::array<double, 3>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a scale factor is not strictly positive (or not finite).
class DegenerateMetricError : public Error {
 public:
  DegenerateMetricError(std::string component, double value)
      : Error("degenerate metric: component " + component + " = " + std::to_string(value) +
              " is not strictly positive"),
        component_(std::move(component)),
        value_(value) {}

  const std::string& component() const noexcept { return component_; }
  double value() const noexcept { return value_; }

 private:
  std::string component_;
  double value_;
};

enum class GeometryClass { SU2, Nil, Sol, IsomR2, SL2R };

inline constexpr std::array<GeometryClass, 5> kAllClasses = {
    GeometryClass::SU2, GeometryClass::Nil, GeometryClass::Sol, GeometryClass::IsomR2,
    GeometryClass::SL2R};

inline std::string_view to_string(GeometryClass c) {
  switch (c) {
    case GeometryClass::SU2: return "su2";
    case GeometryClass::Nil: return "nil";
    case GeometryClass::Sol: return "sol";
    case GeometryClass::IsomR2: return "isom";
    case GeometryClass::SL2R: return "sl2r";
  }
  return "?";
}

inline std::optional<GeometryClass> parse_geometry_class(std::string_view s) {
  for (auto c : kAllClasses) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

struct StructureConstants {
  double lambda = 0.0;
  double mu = 0.0;
  double nu = 0.0;

  friend bool operator==(const StructureConstants&, const StructureConstants&) = default;
};

struct MetricState {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;

  Triple as_array() const { return {a, b, c}; }
  static MetricState from_array(const Triple& v) { return {v[0], v[1], v[2]}; }

  MetricState scaled(double omega) const { return {omega * a, omega * b, omega * c}; }

  friend bool operator==(const MetricState&, const MetricState&) = default;
};

inline void validate(const MetricState& m) {
  auto check = [](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DegenerateMetricError(name, v);
  };
  check("A", m.a);
  check("B", m.b);
  check("C", m.c);
}

struct SectionalCurvatures {
  double k12 = 0.0;
  double k23 = 0.0;
  double k31 = 0.0;
};

struct CurvatureBundle {
  double k12 = 0.0, k23 = 0.0, k31 = 0.0;
  double rc1 = 0.0, rc2 = 0.0, rc3 = 0.0;
  double rh1 = 0.0, rh2 = 0.0, rh3 = 0.0;
  double scal = 0.0;
  double rc_norm_sq = 0.0;
};

inline StructureConstants structure_constants(GeometryClass c) {
  switch (c) {
    case GeometryClass::SU2: return {-2.0, -2.0, -2.0};
    case GeometryClass::Nil: return {-2.0, 0.0, 0.0};
    case GeometryClass::Sol: return {-2.0, 0.0, 2.0};
    case GeometryClass::IsomR2: return {-2.0, -2.0, 0.0};
    case GeometryClass::SL2R: return {-2.0, -2.0, 2.0};
  }
  throw Error("unknown geometry class");
}

// K(e_i ^ e_j) in the orthonormal frame e_i = F_i / sqrt(zeta_i).
inline SectionalCurvatures sectional_curvatures(const StructureConstants& sc, const MetricState& m) {
  validate(m);
  const double l = sc.lambda, u = sc.mu, n = sc.nu;
  const double A = m.a, B = m.b, C = m.c;
  SectionalCurvatures k;
  k.k12 = (l * A - u * B) * (l * A - u * B) / (4 * A * B * C) +
          n * (2 * u * B + 2 * l * A - 3 * n * C) / (4 * A * B);
  k.k23 = (u * B - n * C) * (u * B - n * C) / (4 * A * B * C) +
          l * (2 * n * C + 2 * u * B - 3 * l * A) / (4 * B * C);
  k.k31 = (n * C - l * A) * (n * C - l * A) / (4 * A * B * C) +
          u * (2 * l * A + 2 * n * C - 3 * u * B) / (4 * A * C);
  return k;
}

/// Diagonal Milnor-frame Ricci components Rc(F_i, F_i).
inline Triple ricci_milnor(const StructureConstants& sc, const MetricState& m) {
  validate(m);
  const double l = sc.lambda, u = sc.mu, n = sc.nu;
  const double A = m.a, B = m.b, C = m.c;
  const double la = l * A, mb = u * B, nc = n * C;
  return {
      (la * la - (mb - nc) * (mb - nc)) / (2 * B * C),
      (mb * mb - (nc - la) * (nc - la)) / (2 * C * A),
      (nc * nc - (la - mb) * (la - mb)) / (2 * A * B),
  };
}

namespace detail {

// Milnor-frame Riemann components Rm(F_i,F_k,F_i,F_k) = zeta_i zeta_k K(e_i ^ e_k),
// indexed symmetric with zero diagonal.
inline std::array<Triple, 3> milnor_riemann(const StructureConstants& sc, const MetricState& m) {
  const auto k = sectional_curvatures(sc, m);
  const Triple z = m.as_array();
  std::array<Triple, 3> rm{};
  rm[0][1] = rm[1][0] = z[0] * z[1] * k.k12;
  rm[1][2] = rm[2][1] = z[1] * z[2] * k.k23;
  rm[2][0] = rm[0][2] = z[2] * z[0] * k.k31;
  return rm;
}

}  // namespace detail

/// Rc(F_i,F_i) = sum_k Rm(F_i,F_k,F_i,F_k) / zeta_k, built from the sectional curvatures.
inline Triple ricci_from_frame_sum(const StructureConstants& sc, const MetricState& m) {
  const auto rm = detail::milnor_riemann(sc, m);
  const Triple z = m.as_array();
  Triple rc{};
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) rc[i] += rm[i][k] / z[k];
  }
  return rc;
}

/// RcHat(F_i,F_i) = 2 sum_k Rm(F_i,F_k,F_i,F_k)^2 / (zeta_k^2 zeta_i).
inline Triple ricci_hat_from_frame_sum(const StructureConstants& sc, const MetricState& m) {
  const auto rm = detail::milnor_riemann(sc, m);
  const Triple z = m.as_array();
  Triple rh{};
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) rh[i] += 2.0 * rm[i][k] * rm[i][k] / (z[k] * z[k] * z[i]);
  }
  return rh;
}

/// Second-order components RcHat(F_i,F_i), expanded bracket form.
inline Triple ricci_hat_milnor(const StructureConstants& sc, const MetricState& m) {
  validate(m);
  const double l = sc.lambda, u = sc.mu, n = sc.nu;
  const double A = m.a, B = m.b, C = m.c;
  // p_ij = 4 zeta_i zeta_j K(e_i ^ e_j)
  const double p12 = (l * A - u * B) * (l * A - u * B) / C + n * (2 * u * B + 2 * l * A - 3 * n * C);
  const double p31 = (n * C - l * A) * (n * C - l * A) / B + u * (2 * l * A + 2 * n * C - 3 * u * B);
  const double p23 = (u * B - n * C) * (u * B - n * C) / A + l * (2 * n * C + 2 * u * B - 3 * l * A);
  return {
      p12 * p12 / (8 * A * B * B) + p31 * p31 / (8 * A * C * C),
      p23 * p23 / (8 * B * C * C) + p12 * p12 / (8 * B * A * A),
      p31 * p31 / (8 * A * A * C) + p23 * p23 / (8 * B * B * C),
  };
}

// The general closed form; the SU(2)-only display with (B+C)^2 is not used.
inline double scalar_curvature(const StructureConstants& sc, const MetricState& m) {
  validate(m);
  const double l = sc.lambda, u = sc.mu, n = sc.nu;
  const double A = m.a, B = m.b, C = m.c;
  return -(A * A * l * l + (B * u - C * n) * (B * u - C * n) - 2 * A * l * (B * u + C * n)) /
         (2 * A * B * C);
}

inline double ricci_norm_sq(const StructureConstants& sc, const MetricState& m) {
  validate(m);
  const double l = sc.lambda, u = sc.mu, n = sc.nu;
  const double A = m.a, B = m.b, C = m.c;
  const double s = B * u + C * n;
  const double d = B * u - C * n;
  const double num1 = 3 * std::pow(A * l, 4) - 4 * std::pow(A * l, 3) * s - 4 * A * l * d * d * s +
                      2 * A * A * l * l * s * s;
  const double num2 = d * d * (3 * B * B * u * u + 2 * B * C * u * n + 3 * C * C * n * n);
  return (num1 + num2) / (4 * A * A * B * B * C * C);
}

inline CurvatureBundle curvature_bundle(const StructureConstants& sc, const MetricState& m) {
  const auto k = sectional_curvatures(sc, m);
  const auto rc = ricci_milnor(sc, m);
  const auto rh = ricci_hat_milnor(sc, m);
  CurvatureBundle out;
  out.k12 = k.k12;
  out.k23 = k.k23;
  out.k31 = k.k31;
  out.rc1 = rc[0];
  out.rc2 = rc[1];
  out.rc3 = rc[2];
  out.rh1 = rh[0];
  out.rh2 = rh[1];
  out.rh3 = rh[2];
  out.scal = scalar_curvature(sc, m);
  out.rc_norm_sq = ricci_norm_sq(sc, m);
  return out;
}

/// dA/dt, dB/dt, dC/dt = -(2 Rc(F_i,F_i) + alpha' RcHat(F_i,F_i)).
inline Triple flow_rhs(const StructureConstants& sc, const MetricState& m, double alpha_prime) {
  const auto rc = ricci_milnor(sc, m);
  const auto rh = ricci_hat_milnor(sc, m);
  return {
      -(2 * rc[0] + alpha_prime * rh[0]),
      -(2 * rc[1] + alpha_prime * rh[1]),
      -(2 * rc[2] + alpha_prime * rh[2]),
  };
}

// Per-component magnitude of the summands entering flow_rhs. Used as the scale
// for relative comparisons, where the value itself can cancel to ~0.
inline Triple flow_rhs_scale(const StructureConstants& sc, const MetricState& m, double alpha_prime) {
  validate(m);
  const double la = std::abs(sc.lambda * m.a);
  const double mb = std::abs(sc.mu * m.b);
  const double nc = std::abs(sc.nu * m.c);
  const auto rh = ricci_hat_milnor(sc, m);
  const double rc1 = (la * la + (mb + nc) * (mb + nc)) / (2 * m.b * m.c);
  const double rc2 = (mb * mb + (nc + la) * (nc + la)) / (2 * m.c * m.a);
  const double rc3 = (nc * nc + (la + mb) * (la + mb)) / (2 * m.a * m.b);
  const double ap = std::abs(alpha_prime);
  return {2 * rc1 + ap * rh[0], 2 * rc2 + ap * rh[1], 2 * rc3 + ap * rh[2]};
}

}  // namespace hoflow

#endif  // HOFLOW_GEOMETRY_HPP
