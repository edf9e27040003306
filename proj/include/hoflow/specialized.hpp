// Hand-transcribed per-class flow equations. These exist as an independent
// route to the same vector field as flow_rhs(); they are never used to drive
// the integrator.

#ifndef HOFLOW_SPECIALIZED_HPP
#define HOFLOW_SPECIALIZED_HPP

#include "hoflow/geometry.hpp"

namespace hoflow {

namespace detail {

inline double sq(double x) { return x * x; }

inline Triple su2_printed(double A, double B, double C, double ap) {
  const double dA = (4 * sq(B - C) - 4 * A * A) / (B * C) -
                    2 * ap *
                        (sq(sq(A - B) / C + (2 * B + 2 * A - 3 * C)) / (A * B * B) +
                         sq(sq(A - C) / B + (2 * C + 2 * A - 3 * B)) / (A * C * C));
  const double dB = (4 * sq(C - A) - 4 * B * B) / (A * C) -
                    2 * ap *
                        (sq(sq(C - B) / A + (2 * C + 2 * B - 3 * A)) / (B * C * C) +
                         sq(sq(B - A) / C + (2 * B + 2 * A - 3 * C)) / (B * A * A));
  const double dC = (4 * sq(A - B) - 4 * C * C) / (A * B) -
                    2 * ap *
                        (sq(sq(A - C) / B + (2 * A + 2 * C - 3 * B)) / (C * A * A) +
                         sq(sq(C - B) / A + (2 * C + 2 * B - 3 * A)) / (C * B * B));
  return {dA, dB, dC};
}

inline Triple nil_printed(double A, double B, double C, double ap) {
  return {
      -4 * A * A / (B * C) - 4 * ap * A * A * A / (B * B * C * C),
      4 * A / C - 20 * ap * A * A / (B * C * C),
      4 * A / B - 20 * ap * A * A / (B * B * C),
  };
}

inline Triple sol_printed(double A, double B, double C, double ap) {
  const double s2 = sq(A + C);
  return {
      -4 * (A * A - C * C) / (B * C) -
          4 * ap * s2 * (A * A - 2 * A * C + 5 * C * C) / (A * B * B * C * C),
      4 * s2 / (A * C) - 4 * ap * s2 * (5 * A * A - 6 * A * C + 5 * C * C) / (A * A * B * C * C),
      -4 * (C * C - A * A) / (A * B) -
          4 * ap * s2 * (5 * A * A - 2 * A * C + C * C) / (A * A * B * B * C),
  };
}

inline Triple isom_printed(double A, double B, double C, double ap) {
  const double d2 = sq(A - B);
  return {
      -4 * (A * A - B * B) / (B * C) - 4 * ap * d2 * (A * A + 2 * A * B + 5 * B * B) / (A * B * B * C * C),
      -4 * (B * B - A * A) / (A * C) - 4 * ap * d2 * (5 * A * A + 2 * A * B + B * B) / (A * A * B * C * C),
      4 * d2 / (A * B) - 4 * ap * d2 * (5 * A * A + 6 * A * B + 5 * B * B) / (A * A * B * B * C),
  };
}

inline Triple sl2r_printed(double A, double B, double C, double ap) {
  const double s2 = sq(B + C);
  const double A2 = A * A, A3 = A2 * A, A4 = A2 * A2;
  const double dA = -4 * (A2 - s2) / (B * C) -
                    2 * ap * 2 * (A4 + 2 * A2 * s2 - 8 * A * (B - C) * s2) / (B * B * C * C * A) -
                    2 * ap * 2 * s2 * (5 * B * B - 6 * B * C + 5 * C * C) / (B * B * C * C * A);
  const double dB = -4 * (B * B - sq(A + C)) / (A * C) -
                    2 * ap * 2 * (5 * A4 + 4 * A * C * s2 + A3 * (-8 * B + 4 * C)) / (A2 * C * C * B) -
                    2 * ap * 2 * (2 * A2 * (B * B - 4 * B * C - C * C) + s2 * (B * B - 2 * B * C + 5 * C * C)) /
                        (A2 * C * C * B);
  const double dC = -2 * (2 * C * C - 2 * sq(A - B)) / (A * B) -
                    2 * ap * 2 * (5 * A4 - 4 * A3 * (B - 2 * C) - 4 * A * B * s2) / (A2 * B * B * C) -
                    2 * ap * 2 * (-2 * A2 * (B * B + 4 * B * C - C * C) + s2 * (5 * B * B - 2 * B * C + C * C)) /
                        (A2 * B * B * C);
  return {dA, dB, dC};
}

}  // namespace detail

inline Triple specialized_rhs(GeometryClass cls, const MetricState& m, double alpha_prime) {
  validate(m);
  switch (cls) {
    case GeometryClass::SU2: return detail::su2_printed(m.a, m.b, m.c, alpha_prime);
    case GeometryClass::Nil: return detail::nil_printed(m.a, m.b, m.c, alpha_prime);
    case GeometryClass::Sol: return detail::sol_printed(m.a, m.b, m.c, alpha_prime);
    case GeometryClass::IsomR2: return detail::isom_printed(m.a, m.b, m.c, alpha_prime);
    case GeometryClass::SL2R: return detail::sl2r_printed(m.a, m.b, m.c, alpha_prime);
  }
  throw Error("unknown geometry class");
}

/// SU(2) pairwise-difference equations: d(A-B)/dt, d(A-C)/dt, d(B-C)/dt.
inline Triple su2_difference_rhs(const MetricState& m, double alpha_prime) {
  validate(m);
  const double A = m.a, B = m.b, C = m.c;
  const double A2 = A * A, B2 = B * B, C2 = C * C;
  const double g1 = A2 * A2 - 4 * A2 * A * B + 6 * A2 * B2 - 4 * A * B2 * B + B2 * B2 + 2 * A2 * C2 +
                    12 * A * B * C2 + 2 * B2 * C2 - 8 * A * C2 * C - 8 * B * C2 * C + 5 * C2 * C2;
  const double g2 = A2 * A2 + 2 * A2 * B2 - 8 * A * B2 * B + 5 * B2 * B2 - 4 * A2 * A * C + 12 * A * B2 * C -
                    8 * B2 * B * C + 6 * A2 * C2 + 2 * B2 * C2 - 4 * A * C2 * C + C2 * C2;
  const double g3 = 5 * A2 * A2 - 8 * A2 * A * B + 2 * A2 * B2 + B2 * B2 - 8 * A2 * A * C + 12 * A2 * B * C -
                    4 * B2 * B * C + 2 * A2 * C2 + 6 * B2 * C2 - 4 * B * C2 * C + C2 * C2;
  const double abc = A * B * C;
  const double abc2 = abc * abc;
  return {
      -4 * (A - B) * (A2 + 2 * A * B + B2 - C2) / abc - 4 * alpha_prime * (A - B) * g1 / abc2,
      -4 * (A - C) * (A2 + 2 * A * C + C2 - B2) / abc - 4 * alpha_prime * (A - C) * g2 / abc2,
      -4 * (B - C) * (B2 + 2 * B * C + C2 - A2) / abc - 4 * alpha_prime * (B - C) * g3 / abc2,
  };
}

}  // namespace hoflow

#endif  // HOFLOW_SPECIALIZED_HPP
