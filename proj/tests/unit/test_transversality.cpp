#include <cmath>

#include <gtest/gtest.h>

#include "sigchange/transversality.hpp"

namespace sigchange {
namespace {

// Image is a boost orbit: (2 sinh t, 2 cosh t, x). K is tangent everywhere.
EmbeddingMap orbit_map() {
  auto value = [](const ChartPoint& p) {
    return MinkowskiEvent(2.0 * std::sinh(p.t), {2.0 * std::cosh(p.t), p.spatial(0)});
  };
  auto jac = [](const ChartPoint& p) {
    Matrix J = Matrix::Zero(3, 2);
    J(0, 0) = 2.0 * std::cosh(p.t);
    J(1, 0) = 2.0 * std::sinh(p.t);
    J(2, 1) = 1.0;
    return J;
  };
  return EmbeddingMap(2, 3, value, EmbeddingMap::JacobianFn(jac), [](const ChartPoint&) { return true; });
}

// Image (2 sinh x, 2 cosh x + x^2, t) touches the orbit through (0, 2, *) at x = 0 and lies
// outside it elsewhere. The chart time read along that orbit has an interior extremum.
EmbeddingMap touching_map() {
  auto value = [](const ChartPoint& p) {
    const double x = p.spatial(0);
    return MinkowskiEvent(2.0 * std::sinh(x), {2.0 * std::cosh(x) + x * x, p.t});
  };
  auto jac = [](const ChartPoint& p) {
    const double x = p.spatial(0);
    Matrix J = Matrix::Zero(3, 2);
    J(2, 0) = 1.0;
    J(0, 1) = 2.0 * std::cosh(x);
    J(1, 1) = 2.0 * std::sinh(x) + 2.0 * x;
    return J;
  };
  auto membership = [](const MinkowskiEvent& e) {
    const double x = std::asinh(0.5 * e.tau);
    return e.y1() - std::sqrt(4.0 + e.tau * e.tau) - x * x;
  };
  ChartInverse inv;
  inv.membership = membership;
  inv.retract = [membership](const MinkowskiEvent& e) {
    return ChartPoint(e.y(1) - membership(e), {std::asinh(0.5 * e.tau)});
  };
  return EmbeddingMap(2, 3, value, EmbeddingMap::JacobianFn(jac), [](const ChartPoint&) { return true; }, inv);
}

EmbeddingMap boosted(const EmbeddingMap& map, double s) {
  auto value = [map, s](const ChartPoint& p) { return boost_by(map(p), s); };
  auto jac = [map, s](const ChartPoint& p) {
    return Matrix(boost_matrix(map.target_dim(), s) * map.jacobian(p, JacobianMode::analytic));
  };
  return EmbeddingMap(map.source_dim(), map.target_dim(), value, EmbeddingMap::JacobianFn(jac),
                      [map](const ChartPoint& p) { return map.in_domain(p); });
}

TEST(KillingField, Components) {
  const Vector k = killing_at(MinkowskiEvent(0.5, {2.0, 9.0}));
  EXPECT_EQ(k(0), 2.0);
  EXPECT_EQ(k(1), 0.5);
  EXPECT_EQ(k(2), 0.0);
}

TEST(KillingField, IsTheBoostGenerator) {
  const MinkowskiEvent e(-0.3, {1.7, 4.0});
  const double h = 1e-6;
  const Vector d = (boost_by(e, h).coords() - boost_by(e, -h).coords()) / (2.0 * h);
  EXPECT_LT((d - killing_at(e)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(TangencyPolynomial, ValuesAndDiscriminant) {
  EXPECT_EQ(toy_tangency_poly(0.0).value, 2.0);
  EXPECT_EQ(toy_tangency_poly(-0.25).value, 1.875);  // the minimum
  EXPECT_EQ(toy_tangency_poly(3.0).discriminant, -15.0);
}

TEST(TangencyResidual, PsiIsNeverTangent) {
  const EmbeddingMap map = psi_toy_map(2);
  for (double t : {-0.99, -0.5, -0.3496, -0.17, 0.0, 1.0, 10.0}) {
    const TangencyResult r = tangency_residual(map, ChartPoint(t, {0.0}));
    EXPECT_GT(r.residual, 0.69) << t;
    EXPECT_TRUE(r.rank_hypothesis_holds);  // the x row of the Jacobian is never zero
  }
}

TEST(TangencyResidual, OrbitImageIsTangent) {
  const EmbeddingMap map = orbit_map();
  for (double t : {-3.0, 0.0, 0.4, 5.0}) {
    EXPECT_LE(tangency_residual(map, ChartPoint(t, {1.0})).residual, 1e-10) << t;
  }
}

TEST(TangencyResidual, FixedPointRaisesDegenerateOrbit) {
  // Shift 0 sends t = 0 to the origin of the (tau, y1) plane.
  EXPECT_THROW(tangency_residual(explicit_map(2), ChartPoint(0.0, {0.0})), DegenerateOrbitError);
}

TEST(TangencyResidual, RankDeficientJacobian) {
  EmbeddingMap flat(
      2, 3, [](const ChartPoint& p) { return MinkowskiEvent(p.t, {2.0, 0.0}); },
      EmbeddingMap::JacobianFn([](const ChartPoint&) {
        Matrix J = Matrix::Zero(3, 2);
        J(0, 0) = 1.0;
        return J;
      }),
      [](const ChartPoint&) { return true; });
  EXPECT_THROW(tangency_residual(flat, ChartPoint(0.0, {0.0})), ImmersionError);
}

TEST(TangencyResidual, InvariantUnderBoosts) {
  const EmbeddingMap psi = psi_toy_map(2);
  const ChartPoint p(1.3, {0.0});
  const double base = tangency_residual(psi, p).residual;
  for (double s : {-4.0, -0.7, 0.5, 3.0}) {
    EXPECT_NEAR(tangency_residual(boosted(psi, s), p).residual, base, 1e-12) << s;
  }
}

TEST(TangencyResidual, ContinuousAcrossNullLine) {
  // psi crosses y1 = tau near the region threshold; the residual must not jump there.
  const EmbeddingMap map = psi_toy_map(2);
  const double t0 = psi_toy_region_threshold();
  const double left = tangency_residual(map, ChartPoint(t0 - 1e-7, {0.0})).residual;
  const double mid = tangency_residual(map, ChartPoint(t0, {0.0})).residual;
  const double right = tangency_residual(map, ChartPoint(t0 + 1e-7, {0.0})).residual;
  EXPECT_NEAR(left, mid, 1e-5);
  EXPECT_NEAR(right, mid, 1e-5);
}

TEST(OrbitCount, PsiImagePoints) {
  const EmbeddingMap map = psi_toy_map(2);
  for (double t : {-0.2, 0.5, 1.0, 4.0}) {
    EXPECT_EQ(orbit_intersection_count(map, map(ChartPoint(t, {0.0}))), 1) << t;
  }
  // Invariant y1^2 - tau^2 = 4 exceeds its supremum (1) on the psi image.
  EXPECT_EQ(orbit_intersection_count(map, MinkowskiEvent(0.0, {2.0, 0.0})), 0);
}

TEST(OrbitCount, ExplicitImagePoints) {
  const EmbeddingMap map = explicit_map(2, HyperbolaFamily(1.0));
  for (double t : {-3.0, -0.5, 0.0, 0.5, 3.0}) {
    EXPECT_EQ(orbit_intersection_count(map, map(ChartPoint(t, {0.0}))), 1) << t;
  }
}

TEST(OrbitCount, Contracts) {
  EXPECT_THROW(orbit_intersection_count(orbit_map(), MinkowskiEvent(0.0, {2.0, 0.0})), CapabilityError);
  EXPECT_THROW(orbit_intersection_count(psi_toy_map(2), MinkowskiEvent(1.0, {1.0, 0.0})), RegionError);
  EXPECT_THROW(orbit_intersection_count(psi_toy_map(2), MinkowskiEvent(0.0, {2.0})), PreconditionError);
  OrbitScanOptions bad;
  bad.samples = 2;
  EXPECT_THROW(orbit_time_profile(psi_toy_map(2), MinkowskiEvent(0.0, {2.0, 0.0}), bad), PreconditionError);
}

TEST(OrbitProfile, PsiChartTimeIsMonotone) {
  const EmbeddingMap map = psi_toy_map(2);
  const OrbitProfile prof = orbit_time_profile(map, map(ChartPoint(1.0, {0.0})));
  ASSERT_EQ(prof.intersection_s.size(), 1u);
  EXPECT_NEAR(prof.intersection_s[0], 0.0, 1e-9);
  EXPECT_NEAR(prof.intersection_t[0], 1.0, 1e-9);
  EXPECT_EQ(prof.shape, ProfileShape::strictly_monotone);
  EXPECT_FALSE(prof.extremum_s.has_value());
}

TEST(OrbitProfile, TouchingOrbitHasInteriorExtremum) {
  const EmbeddingMap map = touching_map();
  // The image is tangent to the orbit where it touches it.
  EXPECT_LE(tangency_residual(map, ChartPoint(0.3, {0.0})).residual, 1e-12);

  OrbitScanOptions opts;
  opts.s_lo = -3.0;
  opts.s_hi = 2.0;
  const OrbitProfile prof = orbit_time_profile(map, MinkowskiEvent(0.0, {2.0, 0.3}), opts);
  ASSERT_EQ(prof.intersection_s.size(), 1u);
  EXPECT_NEAR(prof.intersection_s[0], 0.0, 1e-4);
  EXPECT_EQ(prof.shape, ProfileShape::interior_extremum);
  ASSERT_TRUE(prof.extremum_s.has_value());
  EXPECT_NEAR(*prof.extremum_s, 0.0, 1e-6);
  ASSERT_TRUE(prof.extremum_slope.has_value());
  EXPECT_NEAR(*prof.extremum_slope, 0.0, 1e-6);
  EXPECT_STREQ(to_string(prof.shape), "interior_extremum");
}

}  // namespace
}  // namespace sigchange
