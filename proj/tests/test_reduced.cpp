#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hoflow/integrator.hpp"
#include "hoflow/reduced.hpp"
#include "hoflow/systems.hpp"

using namespace hoflow;

namespace {

Triple full(GeometryClass c, const MetricState& m, double ap) { return flow_rhs(structure_constants(c), m, ap); }

}  // namespace

TEST(Berger, FixedPointsAndValues) {
  const Pair a = berger_su2_rhs(1, 1, -1);
  EXPECT_NEAR(a[0], 0.0, 1e-14);
  EXPECT_NEAR(a[1], 0.0, 1e-14);
  const Pair b = berger_su2_rhs(16.0 / 9, 4.0 / 3, -1);
  EXPECT_NEAR(b[0], 0.0, 1e-13);
  EXPECT_NEAR(b[1], 0.0, 1e-13);
  const Pair c = berger_su2_rhs(1, 1, 0);
  EXPECT_NEAR(c[0], -4.0, 1e-14);
  EXPECT_NEAR(c[1], -4.0, 1e-14);
  EXPECT_THROW(berger_su2_rhs(0, 1, 0), ReducedDomainError);
}

TEST(Berger, OdeResidualExamples) {
  for (double B : {0.5, 1.0, 9.0}) {
    EXPECT_DOUBLE_EQ(berger_ode_residual(B, -8, 0), 0.0);
    EXPECT_DOUBLE_EQ(berger_ode_residual(B, -4, 0), 0.0);
  }
  EXPECT_DOUBLE_EQ(berger_ode_residual(1, 0, -64), 0.0);
}

TEST(NilXi, RhsValues) {
  EXPECT_DOUBLE_EQ(nil_xi_rhs(3, 1), 0.0);
  EXPECT_DOUBLE_EQ(nil_xi_rhs(1, 0), 12.0);
  EXPECT_DOUBLE_EQ(nil_xi_rhs(6, -1), 18.0);
  EXPECT_THROW(nil_xi_rhs(0, 1), ReducedDomainError);
}

TEST(NilXi, ImplicitResidualBasics) {
  const double xi0 = 2.5;
  OracleConstants k{nil_xi_constant(xi0, 0.0), 0, 0};
  for (double t : {0.0, 0.3, 2.0}) EXPECT_NEAR(nil_xi_implicit_residual(xi0 + 12 * t, t, k, 0.0), 0.0, 1e-13);
  for (double ap : {-1.0, 1.0}) {
    k.k = nil_xi_constant(xi0, ap);
    EXPECT_NEAR(nil_xi_implicit_residual(xi0, 0.0, k, ap), 0.0, 1e-14);
  }
  EXPECT_NEAR(nil_xi_constant(6, 1), 6 + 3 * std::log(3.0), 1e-14);
  EXPECT_THROW(nil_xi_constant(3, 1), LogSingularityError);
  EXPECT_THROW(nil_xi_implicit_residual(3, 0, k, 1), LogSingularityError);
}

TEST(NilXi, ImplicitResidualAlongIntegration) {
  const auto sys = nil_xi_system(1.0);
  const auto tr = integrate(sys, Vec<1>{6.0}, Direction::forward, 1.0, IntegratorControls{}, OutputSpec{{}, 50});
  const OracleConstants k{6 + 3 * std::log(3.0), 0, 0};
  for (const auto& s : tr.samples) EXPECT_LT(std::abs(nil_xi_implicit_residual(s.state[0], s.t, k, 1.0)), 1e-8);
}

TEST(NilScale, IdentityAndAlphaZeroPowers) {
  for (auto tr : {Transcription::rederived, Transcription::printed}) {
    const Pair id = nil_scale_from_xi(4.0, 4.0, 2.0, 3.0, 0.5, tr);
    EXPECT_DOUBLE_EQ(id[0], 2.0);
    EXPECT_DOUBLE_EQ(id[1], 3.0);
  }
  for (double r : {0.5, 2.0, 10.0}) {
    const Pair ab = nil_scale_from_xi(r * 2.0, 2.0, 1.0, 1.0, 0.0);
    EXPECT_NEAR(ab[0], std::pow(r, -1.0 / 3), 1e-14);
    EXPECT_NEAR(ab[1], std::pow(r, 1.0 / 3), 1e-14);
    const Pair printed = nil_scale_from_xi(r * 2.0, 2.0, 1.0, 1.0, 0.0, Transcription::printed);
    EXPECT_GT(std::abs(printed[1] - std::pow(r, 1.0 / 3)), 1e-3);
  }
  EXPECT_THROW(nil_scale_from_xi(2.0, 4.0, 1, 1, 1.0), BranchError);
}

TEST(NilScale, MatchesNilFlowDerivatives) {
  // d/dt of the closed form equals the Nil flow at the same point.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.5, 6.0);
  for (double ap : {-1.0, 0.0, 1.0}) {
    for (int n = 0; n < 50; ++n) {
      const double A = U(rng), B = U(rng), C = U(rng);
      const double xi = B * C / A;
      if (std::abs(xi - 3 * ap) < 0.2) continue;
      const double dxi = nil_xi_rhs(xi, ap);
      const double h = 1e-6 * xi;
      const Pair p = nil_scale_from_xi(xi + h, xi, A, B, ap), m = nil_scale_from_xi(xi - h, xi, A, B, ap);
      const Triple f = full(GeometryClass::Nil, {A, B, C}, ap);
      EXPECT_NEAR((p[0] - m[0]) / (2 * h) * dxi, f[0], 1e-6 * (1 + std::abs(f[0])));
      EXPECT_NEAR((p[1] - m[1]) / (2 * h) * dxi, f[1], 1e-6 * (1 + std::abs(f[1])));
    }
  }
}

TEST(NilFixedBranch, RatesAndDomain) {
  const Pair ab = nil_fixed_branch(0.9, 2.0, 3.0, 1.0);
  EXPECT_NEAR(ab[0], 2.0 * std::exp(-16 * 0.9 / 9), 1e-14);
  EXPECT_NEAR(ab[1], 3.0 * std::exp(-8 * 0.9 / 9), 1e-14);
  // The Nil flow on xi = 3: dA/dt / A = -16/9 at A = 1, B = C = sqrt(3).
  const Triple f = full(GeometryClass::Nil, {1, std::sqrt(3.0), std::sqrt(3.0)}, 1.0);
  EXPECT_NEAR(f[0], -16.0 / 9, 1e-13);
  EXPECT_NEAR(f[1] / std::sqrt(3.0), -8.0 / 9, 1e-13);
  EXPECT_THROW(nil_fixed_branch(0.1, 1, 1, 0.0), BranchError);
  EXPECT_THROW(nil_fixed_branch(0.1, 1, 1, -1.0), BranchError);
}

TEST(NilSpecial, TurningPolynomial) {
  EXPECT_DOUBLE_EQ(nil_turning_polynomial(0.1), 0.2);
  EXPECT_NEAR(nil_turning_polynomial(0.2), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(nil_turning_polynomial(0.0), 0.0);
  double best = -1, arg = 0;
  for (int i = 1; i < 2000; ++i) {
    const double p = i * 1e-4;
    const double f = nil_turning_polynomial(p);
    if (p < 0.2) {
      EXPECT_GT(f, 0.0) << p;
    }
    if (f > best) {
      best = f;
      arg = p;
    }
  }
  EXPECT_NEAR(arg, 0.1, 1e-4);
  EXPECT_LT(nil_turning_polynomial(0.25), 0.0);
}

TEST(SolSpecial, ValuesAndFactorTwo) {
  const Pair z = sol_special_rhs(3.0, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(z[0], 0.0);
  EXPECT_DOUBLE_EQ(z[1], 16.0);
  for (double A : {0.5, 2.0, 7.0}) {
    const Pair on = sol_special_rhs(A, 4.0, 1.0);
    EXPECT_DOUBLE_EQ(on[0], -4 * A);
    EXPECT_DOUBLE_EQ(on[1], 0.0);
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.1, 10.0);
  for (int n = 0; n < 500; ++n) {
    const double A = U(rng), B = U(rng), ap = n % 3 - 1.0;
    const Pair g = sol_special_rhs(A, B, ap), p = sol_special_printed_rhs(A, B, ap);
    EXPECT_EQ(g[0], 2 * p[0]);
    EXPECT_EQ(g[1], 2 * p[1]);
    const Triple f = full(GeometryClass::Sol, {A, B, A}, ap);
    EXPECT_NEAR(g[0], f[0], 1e-12 * (1 + std::abs(f[0])));
    EXPECT_NEAR(g[1], f[1], 1e-12 * (1 + std::abs(f[1])));
  }
}

TEST(SolSpecial, Invariant) {
  EXPECT_DOUBLE_EQ(sol_invariant(3, 9, 0), 3.0);
  EXPECT_NEAR(sol_invariant(3, 7, 1), 9.0 / 7, 1e-15);
  EXPECT_NEAR(sol_invariant(3, 5, -1), 27.0 / 5, 1e-15);
  for (double ap : {-1.0, 1.0}) {
    const Pair y0 = ap > 0 ? Pair{3, 7} : Pair{3, 5};
    const auto tr = integrate(sol_special_system(ap), y0, Direction::forward, 1.0, IntegratorControls{});
    const double i0 = sol_invariant(y0[0], y0[1], ap);
    for (const auto& s : tr.samples) {
      EXPECT_NEAR(sol_invariant(s.state[0], s.state[1], ap) / i0, 1.0, 1e-8);
    }
  }
}

TEST(SolSpecial, FixedBranchDomain) {
  EXPECT_NEAR(sol_fixed_branch_a(0.5, 2.0, 1.0), 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_THROW(sol_fixed_branch_a(0.5, 2.0, 0.0), BranchError);
  EXPECT_THROW(sol_implicit_constant(4.0, 1.0), LogSingularityError);
}

TEST(IsomEta, Values) {
  for (double ap : {-1.0, 0.0, 1.0}) {
    for (double A : {0.5, 3.0}) EXPECT_DOUBLE_EQ(isom_eta_rhs(A, 1.0, 2.0, ap)[1], 0.0);
  }
  EXPECT_NEAR(isom_eta_rhs(1, 0.5, 1, 1.0)[1], 0.0, 1e-14);
  EXPECT_NEAR(isom_eta_rhs(1, 0.5, 1, 0.0)[1], 6.0, 1e-14);
  EXPECT_THROW(isom_eta_rhs(1, 0, 1, 0), ReducedDomainError);
}

TEST(IsomInvariants, ValuesAndRatioRecovery) {
  const auto v = isom_invariants_alpha0(7, 5, 3);
  EXPECT_DOUBLE_EQ(v.prod, 35.0);
  EXPECT_NEAR(v.combo, 36.0 / std::sqrt(35.0), 1e-14);
  EXPECT_NEAR(isom_invariants_alpha0(4, 4, 2.5).combo, 5.0, 1e-14);

  // Along the alpha' = 0 flow both stay fixed and k reproduces A/B.
  const auto tr = integrate(full_system(GeometryClass::IsomR2, 0.0), Triple{7, 5, 3}, Direction::forward, 1.0,
                            IntegratorControls{}, OutputSpec{{}, 40});
  for (const auto& s : tr.samples) {
    const auto w = isom_invariants_alpha0(s.state[0], s.state[1], s.state[2]);
    EXPECT_NEAR(w.prod / v.prod, 1.0, 1e-8);
    EXPECT_NEAR(w.combo / v.combo, 1.0, 1e-8);
    const double r = isom_ratio_from_combo(v.combo, s.state[2], false);
    EXPECT_NEAR(r / (s.state[0] / s.state[1]), 1.0, 1e-6);
  }
  EXPECT_THROW(isom_ratio_from_combo(1.0, 1.0, true), ReducedDomainError);
}

TEST(IsomEtaImplicit, Basics) {
  const double eta0 = 0.3, k = 4.0;
  const OracleConstants c{0, 0, isom_eta_implicit_lhs(eta0)};
  EXPECT_NEAR(isom_eta_implicit_residual(eta0, 0.0, c, k), 0.0, 1e-15);
  EXPECT_LT(isom_eta_implicit_lhs(1 - 1e-12), -20.0);
  EXPECT_THROW(isom_eta_implicit_lhs(1.0), LogSingularityError);
}

TEST(Sl2rSpecial, Values) {
  const Pair near_fixed = sl2r_special_rhs(4.0, 1e-12, 1.0);
  EXPECT_NEAR(near_fixed[0], 0.0, 1e-10);
  EXPECT_NEAR(near_fixed[1], 0.0, 1e-10);
  const Pair u = sl2r_special_rhs(1, 1, 0);
  EXPECT_DOUBLE_EQ(u[0], 12.0);
  EXPECT_DOUBLE_EQ(u[1], -4.0);
  EXPECT_NEAR(sl2r_special_rhs(7, 5, 0)[0], 8 + 20.0 / 7, 1e-14);
}

TEST(Sl2rInvariant, ValuesAndZeroDerivative) {
  EXPECT_DOUBLE_EQ(sl2r_invariant_alpha0(1, 1), 0.5);
  EXPECT_NEAR(sl2r_invariant_alpha0(7, 5), 175.0 / 12, 1e-14);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.1, 10.0);
  for (int n = 0; n < 200; ++n) {
    const double A = U(rng), C = U(rng);
    const Pair f = sl2r_special_rhs(A, C, 0.0);
    const double h = 1e-7;
    const double jp = sl2r_invariant_alpha0(A + h * f[0], C + h * f[1]);
    const double jm = sl2r_invariant_alpha0(A - h * f[0], C - h * f[1]);
    const double J = sl2r_invariant_alpha0(A, C);
    EXPECT_NEAR((jp - jm) / (2 * h) / J, 0.0, 1e-6);
    const double dlog = f[0] / A + 2 * f[1] / C - (f[0] + f[1]) / (A + C);
    EXPECT_NEAR(dlog, 0.0, 1e-12 * (std::abs(f[0] / A) + std::abs(f[1] / C) + 1));
  }
}

TEST(Registry, ReducedSystemsMatchEmbeddings) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.1, 10.0);
  for (double ap : {-1.0, 0.0, 1.0}) {
    for (int n = 0; n < 200; ++n) {
      const double A = U(rng), B = U(rng), C = U(rng);
      auto close = [](double a, double b, double s) { return std::abs(a - b) <= 1e-10 * (1 + s); };
      {
        const auto s = berger_system(ap);
        const Pair r = s.rhs({A, B});
        const Triple f = full(GeometryClass::SU2, s.embed({A, B}), ap);
        EXPECT_TRUE(close(r[0], f[0], std::abs(f[0]) + std::abs(f[1])));
        EXPECT_TRUE(close(r[1], f[1], std::abs(f[0]) + std::abs(f[1])));
        EXPECT_TRUE(close(f[1], f[2], std::abs(f[1])));
      }
      {
        const auto s = sl2r_special_system(ap);
        const Triple f = full(GeometryClass::SL2R, s.embed({A, C}), ap);
        const Pair r = s.rhs({A, C});
        const Triple w = flow_rhs_scale(structure_constants(GeometryClass::SL2R), s.embed({A, C}), ap);
        EXPECT_LE(std::abs(r[0] - f[0]), 1e-12 * w[0]);
        EXPECT_LE(std::abs(r[1] - f[2]), 1e-12 * w[2]);
      }
      {
        const auto s = nil_special_system(ap);
        const Triple f = full(GeometryClass::Nil, s.embed({A, B}), ap);
        const Pair r = s.rhs({A, B});
        EXPECT_TRUE(close(r[0], f[0], std::abs(f[0])));
        EXPECT_TRUE(close(r[1], f[1], std::abs(f[1]) + 20 * A * A / (B * B * B)));
      }
    }
  }
}

TEST(Registry, NamesAndValidation) {
  for (const auto& n : system_names()) EXPECT_TRUE(make_system(n, 0.5).has_value()) << n;
  EXPECT_FALSE(make_system("bianchi-ix", 0.0).has_value());
  const auto s = isom_eta_system(0.0);
  EXPECT_THROW(validate_initial(s, Triple{1, 1.5, 1}), ReducedDomainError);
  EXPECT_NO_THROW(validate_initial(s, Triple{1, 1.0, 1}));
  try {
    validate_initial(berger_system(0.0), Pair{1, -2});
    FAIL();
  } catch (const DegenerateMetricError& e) {
    EXPECT_EQ(e.component(), "B");
  }
}
