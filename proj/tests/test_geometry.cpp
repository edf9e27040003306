#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hoflow/geometry.hpp"
#include "hoflow/specialized.hpp"

using namespace hoflow;

namespace {

constexpr double kTight = 1e-12;

void expect_triple(const Triple& got, const Triple& want, double tol = kTight) {
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], tol * std::max(1.0, std::abs(want[i]))) << "component " << i;
}

const MetricState kUnit{1, 1, 1};

std::vector<MetricState> random_states(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.1, 10.0);
  std::vector<MetricState> v(n);
  for (auto& m : v) m = {U(rng), U(rng), U(rng)};
  return v;
}

}  // namespace

TEST(StructureConstants, ClassTable) {
  EXPECT_EQ(structure_constants(GeometryClass::SU2), (StructureConstants{-2, -2, -2}));
  EXPECT_EQ(structure_constants(GeometryClass::Nil), (StructureConstants{-2, 0, 0}));
  EXPECT_EQ(structure_constants(GeometryClass::Sol), (StructureConstants{-2, 0, 2}));
  EXPECT_EQ(structure_constants(GeometryClass::IsomR2), (StructureConstants{-2, -2, 0}));
  EXPECT_EQ(structure_constants(GeometryClass::SL2R), (StructureConstants{-2, -2, 2}));
  for (auto c : kAllClasses) {
    const auto sc = structure_constants(c);
    for (double v : {sc.lambda, sc.mu, sc.nu}) EXPECT_TRUE(v == -2 || v == 0 || v == 2);
    EXPECT_EQ(parse_geometry_class(to_string(c)), c);
  }
  EXPECT_FALSE(parse_geometry_class("bianchi"));
}

TEST(Validation, NonPositiveComponentIsTypedError) {
  const auto sc = structure_constants(GeometryClass::SU2);
  try {
    (void)ricci_milnor(sc, {7, -5, 3});
    FAIL() << "expected DegenerateMetricError";
  } catch (const DegenerateMetricError& e) {
    EXPECT_EQ(e.component(), "B");
    EXPECT_EQ(e.value(), -5);
  }
  EXPECT_THROW((void)flow_rhs(sc, {0, 1, 1}, 1.0), DegenerateMetricError);
  EXPECT_THROW((void)scalar_curvature(sc, {1, 1, std::nan("")}), DegenerateMetricError);
}

TEST(Sectional, UnitStateValues) {
  auto k = sectional_curvatures(structure_constants(GeometryClass::SU2), kUnit);
  expect_triple({k.k12, k.k23, k.k31}, {1, 1, 1});
  k = sectional_curvatures(structure_constants(GeometryClass::Nil), kUnit);
  expect_triple({k.k12, k.k23, k.k31}, {1, -3, 1});
  k = sectional_curvatures(structure_constants(GeometryClass::Sol), kUnit);
  expect_triple({k.k12, k.k23, k.k31}, {-4, -4, 4});
}

TEST(Ricci, UnitStateValues) {
  expect_triple(ricci_milnor(structure_constants(GeometryClass::SU2), kUnit), {2, 2, 2});
  expect_triple(ricci_milnor(structure_constants(GeometryClass::Nil), kUnit), {2, -2, -2});
}

TEST(RicciHat, UnitStateValues) {
  expect_triple(ricci_hat_milnor(structure_constants(GeometryClass::SU2), kUnit), {4, 4, 4});
  expect_triple(ricci_hat_milnor(structure_constants(GeometryClass::Nil), kUnit), {4, 20, 20});
}

TEST(Scalar, ValuesAndSignChange) {
  const auto su2 = structure_constants(GeometryClass::SU2);
  EXPECT_NEAR(scalar_curvature(su2, kUnit), 6.0, kTight);
  EXPECT_NEAR(scalar_curvature(structure_constants(GeometryClass::Nil), kUnit), -2.0, kTight);
  for (double A : {0.3, 1.0, 2.5, 7.0}) EXPECT_NEAR(scalar_curvature(su2, {A, A, A}), 6.0 / A, kTight);
  for (double B : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(scalar_curvature(su2, {4 * B, B, B}), 0.0, kTight);
    EXPECT_GT(scalar_curvature(su2, {3 * B, B, B}), 0.0);
    EXPECT_LT(scalar_curvature(su2, {5 * B, B, B}), 0.0);
  }
}

TEST(RicciNorm, Values) {
  EXPECT_NEAR(ricci_norm_sq(structure_constants(GeometryClass::SU2), kUnit), 12.0, kTight);
  EXPECT_NEAR(ricci_norm_sq(structure_constants(GeometryClass::Nil), kUnit), 12.0, kTight);
  // Isom(R^2) at A = B is flat.
  EXPECT_NEAR(ricci_norm_sq(structure_constants(GeometryClass::IsomR2), {2, 2, 5}), 0.0, kTight);
  expect_triple(ricci_milnor(structure_constants(GeometryClass::IsomR2), {2, 2, 5}), {0, 0, 0});
}

TEST(FlowRhs, UnitStateValues) {
  const auto su2 = structure_constants(GeometryClass::SU2);
  expect_triple(flow_rhs(su2, kUnit, 0.0), {-4, -4, -4});
  expect_triple(flow_rhs(su2, kUnit, 1.0), {-8, -8, -8});
  expect_triple(flow_rhs(structure_constants(GeometryClass::Nil), kUnit, 1.0), {-8, -16, -16});
}

TEST(SpecializedRhs, UnitStateValues) {
  expect_triple(specialized_rhs(GeometryClass::SU2, kUnit, 1.0), {-8, -8, -8});
  expect_triple(specialized_rhs(GeometryClass::Sol, kUnit, 0.0), {0, 16, 0});
  expect_triple(specialized_rhs(GeometryClass::SL2R, kUnit, 0.0), {12, 12, -4});
}

// ------------------------------------------------------------ properties

class ClassProperty : public ::testing::TestWithParam<GeometryClass> {};

TEST_P(ClassProperty, GenericMatchesSpecialized) {
  const auto cls = GetParam();
  const auto sc = structure_constants(cls);
  for (double ap : {-1.0, 0.0, 1.0}) {
    for (const auto& m : random_states(1000, 11)) {
      const Triple g = flow_rhs(sc, m, ap), s = specialized_rhs(cls, m, ap), w = flow_rhs_scale(sc, m, ap);
      for (int i = 0; i < 3; ++i) ASSERT_LE(std::abs(g[i] - s[i]), kTight * w[i]);
    }
  }
}

TEST_P(ClassProperty, FrameSumsMatchClosedForms) {
  const auto sc = structure_constants(GetParam());
  for (const auto& m : random_states(500, 12)) {
    const Triple w = flow_rhs_scale(sc, m, 1.0);
    const Triple rc = ricci_milnor(sc, m), rcs = ricci_from_frame_sum(sc, m);
    const Triple rh = ricci_hat_milnor(sc, m), rhs = ricci_hat_from_frame_sum(sc, m);
    for (int i = 0; i < 3; ++i) {
      ASSERT_LE(std::abs(rc[i] - rcs[i]), kTight * w[i]);
      ASSERT_LE(std::abs(rh[i] - rhs[i]), kTight * w[i]);
    }
  }
}

TEST_P(ClassProperty, BundleIdentities) {
  const auto sc = structure_constants(GetParam());
  for (const auto& m : random_states(500, 13)) {
    const auto b = curvature_bundle(sc, m);
    const double r1 = b.rc1 / m.a, r2 = b.rc2 / m.b, r3 = b.rc3 / m.c;
    const double mag = std::abs(r1) + std::abs(r2) + std::abs(r3);
    ASSERT_NEAR(b.scal, r1 + r2 + r3, kTight * std::max(1.0, mag));
    ASSERT_NEAR(b.rc_norm_sq, r1 * r1 + r2 * r2 + r3 * r3, kTight * std::max(1.0, mag * mag));
    ASSERT_GE(b.rc_norm_sq * (1 + 1e-12), b.scal * b.scal / 3);
  }
}

TEST_P(ClassProperty, ScalingDegrees) {
  const auto sc = structure_constants(GetParam());
  for (const auto& m : random_states(200, 14)) {
    for (double om : {0.5, 3.0}) {
      const MetricState s = m.scaled(om);
      const auto k = sectional_curvatures(sc, m), ks = sectional_curvatures(sc, s);
      const auto tol = [](double v) { return 1e-12 * std::max(1.0, std::abs(v)); };
      ASSERT_NEAR(ks.k12 * om, k.k12, tol(k.k12));
      ASSERT_NEAR(ks.k23 * om, k.k23, tol(k.k23));
      ASSERT_NEAR(ks.k31 * om, k.k31, tol(k.k31));
      const Triple rc = ricci_milnor(sc, m), rcs = ricci_milnor(sc, s);
      const Triple rh = ricci_hat_milnor(sc, m), rhs = ricci_hat_milnor(sc, s);
      for (int i = 0; i < 3; ++i) {
        ASSERT_NEAR(rcs[i], rc[i], tol(rc[i]));
        ASSERT_NEAR(rhs[i] * om, rh[i], tol(rh[i]));
      }
      ASSERT_NEAR(scalar_curvature(sc, s) * om, scalar_curvature(sc, m), tol(scalar_curvature(sc, m)));
      ASSERT_NEAR(ricci_norm_sq(sc, s) * om * om, ricci_norm_sq(sc, m), tol(ricci_norm_sq(sc, m)));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllClasses, ClassProperty, ::testing::ValuesIn(kAllClasses),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Symmetry, Su2PermutationEquivariance) {
  const auto sc = structure_constants(GeometryClass::SU2);
  for (const auto& m : random_states(300, 15)) {
    Triple y = m.as_array();
    const Triple f = flow_rhs(sc, m, 1.0);
    std::array<int, 3> p{0, 1, 2};
    do {
      const MetricState pm{y[p[0]], y[p[1]], y[p[2]]};
      const Triple pf = flow_rhs(sc, pm, 1.0);
      const Triple w = flow_rhs_scale(sc, pm, 1.0);
      for (int i = 0; i < 3; ++i) ASSERT_NEAR(pf[i], f[p[i]], kTight * w[i]);
    } while (std::next_permutation(p.begin(), p.end()));
  }
}

TEST(Symmetry, SolSwapAC) {
  const auto sc = structure_constants(GeometryClass::Sol);
  for (const auto& m : random_states(300, 16)) {
    for (double ap : {-1.0, 0.0, 1.0}) {
      const Triple f = flow_rhs(sc, m, ap);
      const Triple g = flow_rhs(sc, {m.c, m.b, m.a}, ap);
      const Triple w = flow_rhs_scale(sc, m, ap);
      ASSERT_NEAR(g[0], f[2], kTight * w[2]);
      ASSERT_NEAR(g[1], f[1], kTight * w[1]);
      ASSERT_NEAR(g[2], f[0], kTight * w[0]);
    }
  }
}

TEST(Su2Differences, OrderingDerivativeSign) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.1, 10.0);
  for (int n = 0; n < 1000; ++n) {
    std::array<double, 3> v{U(rng), U(rng), U(rng)};
    std::sort(v.rbegin(), v.rend());
    if (v[0] == v[1]) continue;
    for (double ap : {0.0, 1.0}) {
      EXPECT_LT(su2_difference_rhs({v[0], v[1], v[2]}, ap)[0], 0.0);
    }
  }
}
