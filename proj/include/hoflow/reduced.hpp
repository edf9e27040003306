// Special-case reductions of the flow (two scale factors tied together, or a
// single effective variable) with their exact solutions and conserved
// quantities. These serve as oracles for the numerical integrator.

#ifndef HOFLOW_REDUCED_HPP
#define HOFLOW_REDUCED_HPP

#include <array>
#include <cmath>
#include <string>

#include "hoflow/geometry.hpp"

namespace hoflow {

using Pair = std::array<double, 2>;

/// Raised for a reduced-system argument outside its domain (non-positive
/// scale factor, eta out of range).
class ReducedDomainError : public Error {
 public:
  using Error::Error;
};

/// An implicit solution evaluated at its logarithmic singularity.
class LogSingularityError : public Error {
 public:
  using Error::Error;
};

/// Closed-form branch requested across the singular value xi = 3 alpha'.
class BranchError : public Error {
 public:
  using Error::Error;
};

// Integration constants fixed from initial data.
struct OracleConstants {
  double k = 0.0;   // Nil: xi + 3a' ln|xi - 3a'| = 12 t + k;  Sol: B + 4a' ln|B - 4a'| = 16 t + k
  double k1 = 0.0;  // SL(2,R) alpha'=0 invariant C^2 A / (A + C)
  double c1 = 0.0;  // Isom eta implicit relation at t = 0
};

// Which transcription of a closed form to evaluate. `rederived` reproduces the
// ODEs; `printed` is kept for comparison.
enum class Transcription { rederived, printed };

namespace detail {

inline void require_positive(const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ReducedDomainError(std::string("non-positive argument ") + name + " = " + std::to_string(v));
  }
}

}  // namespace detail

// ---------------------------------------------------------------- SU(2), B = C

inline Pair berger_su2_rhs(double A, double B, double alpha_prime) {
  detail::require_positive("A", A);
  detail::require_positive("B", B);
  const double x = A / B;
  return {
      -4 * A * A / (B * B) - 4 * alpha_prime * A * A * A / (B * B * B * B),
      -8 + 4 * x - 4 * alpha_prime * (5 / B * (x - 1) * (x - 1) + 3 / B * (1 - 2 * A / (3 * B))),
  };
}

/// B B'' + 2 B'^2 + 24 B' + 64; zero along exact alpha' = 0 Berger trajectories.
inline double berger_ode_residual(double B, double dB, double d2B) {
  return B * d2B + 2 * dB * dB + 24 * dB + 64;
}

// ------------------------------------------------------------------- Nil

inline double nil_xi_rhs(double xi, double alpha_prime) {
  detail::require_positive("xi", xi);
  return 12 - 36 * alpha_prime / xi;
}

/// k in xi + 3 a' ln|xi - 3 a'| = 12 t + k, fixed by xi(0) = xi0.
inline double nil_xi_constant(double xi0, double alpha_prime) {
  detail::require_positive("xi0", xi0);
  if (alpha_prime == 0.0) return xi0;
  if (xi0 == 3 * alpha_prime) throw LogSingularityError("xi0 sits on the fixed branch xi = 3 alpha'");
  return xi0 + 3 * alpha_prime * std::log(std::abs(xi0 - 3 * alpha_prime));
}

inline double nil_xi_implicit_residual(double xi, double t, const OracleConstants& consts,
                                       double alpha_prime) {
  detail::require_positive("xi", xi);
  if (alpha_prime == 0.0) return xi - 12 * t - consts.k;
  if (xi == 3 * alpha_prime) throw LogSingularityError("implicit Nil relation evaluated at xi = 3 alpha'");
  return xi + 3 * alpha_prime * std::log(std::abs(xi - 3 * alpha_prime)) - 12 * t - consts.k;
}

/// A(xi), B(xi) on the branch through (xi0, A0, B0).
///
/// The A exponents (1/9, -4/9) follow from integrating Adot/A against xidot.
/// Doing the same for Bdot/B = (4/xi)(1 - 5a'/xi) gives (5/9, -2/9), which is
/// the default; the printed pair (1/45, -2/225) is available for comparison and
/// does not satisfy the flow.
inline Pair nil_scale_from_xi(double xi, double xi0, double A0, double B0, double alpha_prime,
                              Transcription b_exponents = Transcription::rederived) {
  detail::require_positive("xi", xi);
  detail::require_positive("xi0", xi0);
  const double pole = 3 * alpha_prime;
  if ((xi - pole) * (xi0 - pole) <= 0.0 && alpha_prime != 0.0) {
    throw BranchError("xi and xi0 lie on opposite sides of (or on) xi = 3 alpha'");
  }
  const double ratio = xi / xi0;
  const double shifted = (xi / 3 - alpha_prime) / (xi0 / 3 - alpha_prime);
  const double A = A0 * std::pow(ratio, 1.0 / 9) * std::pow(shifted, -4.0 / 9);
  const double pb = b_exponents == Transcription::rederived ? 5.0 / 9 : 1.0 / 45;
  const double qb = b_exponents == Transcription::rederived ? -2.0 / 9 : -2.0 / 225;
  const double B = B0 * std::pow(ratio, pb) * std::pow(shifted, qb);
  return {A, B};
}

/// Exact solution on the fixed branch xi = 3 alpha' (alpha' > 0 only).
/// Rederived rates: Adot/A = -16/(9a'), Bdot/B = -8/(9a').
inline Pair nil_fixed_branch(double t, double A0, double B0, double alpha_prime,
                             Transcription rates = Transcription::rederived) {
  if (!(alpha_prime > 0.0)) {
    throw BranchError("xi = 3 alpha' is not a Riemannian branch for alpha' <= 0");
  }
  const double denom = rates == Transcription::rederived ? 9 * alpha_prime : 3 * alpha_prime;
  return {A0 * std::exp(-16 * t / denom), B0 * std::exp(-8 * t / denom)};
}

/// Nil with B = C.
inline Pair nil_special_rhs(double A, double B, double alpha_prime) {
  detail::require_positive("A", A);
  detail::require_positive("B", B);
  const double B2 = B * B;
  return {-4 * A * A / B2 - 4 * alpha_prime * A * A * A / (B2 * B2),
          4 * A / B - 20 * alpha_prime * A * A / (B2 * B)};
}

/// f(p) = 4p - 20p^2 with p = A/B^2: the sign of dB/dt for alpha' = 1, B = C.
inline double nil_turning_polynomial(double p) { return 4 * p - 20 * p * p; }

// ------------------------------------------------------------------- Sol, A = C

/// The A = C restriction of the full Sol flow. This is twice the printed
/// special-case pair; see sol_special_printed_rhs.
inline Pair sol_special_rhs(double A, double B, double alpha_prime) {
  detail::require_positive("A", A);
  detail::require_positive("B", B);
  return {-64 * alpha_prime * A / (B * B), 16 - 64 * alpha_prime / B};
}

/// The printed special-case pair: the same orbits traversed at half speed.
inline Pair sol_special_printed_rhs(double A, double B, double alpha_prime) {
  const auto full = sol_special_rhs(A, B, alpha_prime);
  return {0.5 * full[0], 0.5 * full[1]};
}

inline double sol_invariant(double A, double B, double alpha_prime) {
  return A * (1 - 4 * alpha_prime / B);
}

inline double sol_implicit_constant(double B0, double alpha_prime) {
  detail::require_positive("B0", B0);
  if (alpha_prime == 0.0) return B0;
  if (B0 == 4 * alpha_prime) throw LogSingularityError("B0 sits on the line B = 4 alpha'");
  return B0 + 4 * alpha_prime * std::log(std::abs(B0 - 4 * alpha_prime));
}

/// B + 4a' ln|B - 4a'| - 16 t - k (16 t matches the generic-consistent time).
inline double sol_implicit_residual(double B, double t, const OracleConstants& consts,
                                    double alpha_prime) {
  detail::require_positive("B", B);
  if (alpha_prime == 0.0) return B - 16 * t - consts.k;
  if (B == 4 * alpha_prime) throw LogSingularityError("implicit Sol relation evaluated at B = 4 alpha'");
  return B + 4 * alpha_prime * std::log(std::abs(B - 4 * alpha_prime)) - 16 * t - consts.k;
}

/// A(t) on the invariant line B = 4 alpha' (alpha' > 0).
inline double sol_fixed_branch_a(double t, double A0, double alpha_prime) {
  if (!(alpha_prime > 0.0)) {
    throw BranchError("B = 4 alpha' is not a Riemannian branch for alpha' <= 0");
  }
  return A0 * std::exp(-4 * t / alpha_prime);
}

// ------------------------------------------------------------ Isom(R^2), B = eta A

/// (dA/dt, deta/dt, dC/dt) with eta = B/A.
inline Triple isom_eta_rhs(double A, double eta, double C, double alpha_prime) {
  detail::require_positive("A", A);
  detail::require_positive("eta", eta);
  detail::require_positive("C", C);
  const double e = eta;
  const double em1 = e - 1;
  return {
      4 * A * (e * e - 1) / (C * e) - 4 * alpha_prime * A * em1 * em1 * (5 * e * e + 2 * e + 1) / (C * C * e * e),
      -8 * (e * e - 1) / C + 16 * alpha_prime * (e + 1) * em1 * em1 * em1 / (C * C * e),
      4 * em1 * em1 / e - 4 * alpha_prime * em1 * em1 * (5 * e * e + 6 * e + 5) / (C * e * e),
  };
}

struct IsomInvariants {
  double prod = 0.0;   // A B
  double combo = 0.0;  // (A + B) C / sqrt(A B)
};

/// Conserved along the alpha' = 0 Isom flow.
inline IsomInvariants isom_invariants_alpha0(double A, double B, double C) {
  detail::require_positive("A", A);
  detail::require_positive("B", B);
  detail::require_positive("C", C);
  return {A * B, (A + B) * C / std::sqrt(A * B)};
}

/// The two roots r = A/B of (1 + r) C / sqrt(r) = k. `smaller` is the root
/// (k - s)/(k + s), s = sqrt(k^2 - 4 C^2), i.e. the A < B branch.
inline double isom_ratio_from_combo(double k, double C, bool smaller) {
  const double disc = k * k - 4 * C * C;
  if (disc < 0.0) throw ReducedDomainError("combo k < 2C has no real ratio");
  const double s = std::sqrt(disc);
  const double r = (k - s) / (k + s);
  return smaller ? r : 1.0 / r;
}

/// 2 sqrt(eta)/(1 + eta) + ln(|sqrt(eta) - 1| / (sqrt(eta) + 1)).
inline double isom_eta_implicit_lhs(double eta) {
  detail::require_positive("eta", eta);
  if (eta >= 1.0) throw LogSingularityError("implicit eta relation needs 0 < eta < 1");
  const double s = std::sqrt(eta);
  return 2 * s / (1 + eta) + std::log(std::abs(s - 1) / (s + 1));
}

/// LHS(eta) - (-32 t / k + C1); C1 = consts.c1.
inline double isom_eta_implicit_residual(double eta, double t, const OracleConstants& consts, double k) {
  return isom_eta_implicit_lhs(eta) - (-32 * t / k + consts.c1);
}

// ------------------------------------------------------------- SL(2,R), A = B

inline Pair sl2r_special_rhs(double A, double C, double alpha_prime) {
  detail::require_positive("A", A);
  detail::require_positive("C", C);
  const double A2 = A * A;
  return {
      8 + 4 * C / A - 4 * alpha_prime * (8 * A2 + 12 * C * A + 5 * C * C) / (A2 * A),
      -4 * C * C / A2 - 4 * alpha_prime * C * C * C / (A2 * A2),
  };
}

/// J = C^2 A / (A + C), conserved for alpha' = 0.
inline double sl2r_invariant_alpha0(double A, double C) {
  detail::require_positive("A", A);
  detail::require_positive("C", C);
  return C * C * A / (A + C);
}

}  // namespace hoflow

#endif  // HOFLOW_REDUCED_HPP
