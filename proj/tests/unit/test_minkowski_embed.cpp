#include <cmath>

#include <gtest/gtest.h>

#include "sigchange/minkowski_embed.hpp"

namespace sigchange {
namespace {

TEST(TemporalFunction, Values) {
  EXPECT_DOUBLE_EQ(temporal_f(0.0), -2.0 / 3.0);
  EXPECT_DOUBLE_EQ(temporal_f(3.0), -16.0 / 3.0);
  const double near = temporal_f(-1.0 + 1e-12);
  EXPECT_LT(near, 0.0);
  EXPECT_GT(near, -1e-17);
  EXPECT_DOUBLE_EQ(temporal_f_prime(3.0), -2.0);
}

TEST(TemporalFunction, DomainIsOpenAtMinusOne) {
  EXPECT_THROW(temporal_f(-1.0), DomainError);
  EXPECT_THROW(temporal_f(-2.0), DomainError);
  EXPECT_THROW(temporal_f(std::nan("")), DomainError);
  EXPECT_THROW(temporal_f_prime(-1.0), DomainError);
}

TEST(PsiToy, Examples) {
  const MinkowskiEvent a = psi_toy(ChartPoint(0.0, {5.0}));
  EXPECT_DOUBLE_EQ(a.tau, -2.0 / 3.0);
  EXPECT_EQ(a.y(0), 0.0);
  EXPECT_EQ(a.y(1), 5.0);

  const MinkowskiEvent b = psi_toy(ChartPoint(3.0, {0.0}));
  EXPECT_DOUBLE_EQ(b.tau, -16.0 / 3.0);
  EXPECT_EQ(b.y1(), 3.0);

  const MinkowskiEvent c = psi_toy(ChartPoint(0.0, {1.0, 2.0}));
  ASSERT_EQ(c.dimension(), 4);
  EXPECT_DOUBLE_EQ(c.tau, -2.0 / 3.0);
  EXPECT_EQ(c.y(0), 0.0);
  EXPECT_EQ(c.y(1), 1.0);
  EXPECT_EQ(c.y(2), 2.0);
}

TEST(PsiToy, OutsideDomainThrowsDomainError) {
  EXPECT_THROW(psi_toy(ChartPoint(-1.0, {0.0})), DomainError);
  EXPECT_THROW(psi_toy_map(2)(ChartPoint(-3.0, {0.0})), DomainError);
  EXPECT_THROW(psi_toy_map(2)(ChartPoint(0.0, {0.0, 1.0})), PreconditionError);
}

TEST(Pullback, ToyExamples) {
  const MetricModel toy = MetricModel::toy(2);
  const EmbeddingMap map = psi_toy_map(2);
  Matrix expected(2, 2);

  expected << -1, 0, 0, 1;
  EXPECT_LT(max_abs(pullback(map, toy, ChartPoint(1.0, {0.0}), JacobianMode::analytic) - expected), 1e-15);
  EXPECT_LT(max_abs(pullback(map, toy, ChartPoint(1.0, {0.0}), JacobianMode::finite_difference) - expected), 1e-9);

  expected << 0, 0, 0, 1;
  EXPECT_LT(max_abs(pullback(map, toy, ChartPoint(0.0, {0.0}), JacobianMode::analytic) - expected), 1e-15);

  expected << 0.5, 0, 0, 1;
  EXPECT_LT(max_abs(pullback(map, toy, ChartPoint(-0.5, {0.0}), JacobianMode::analytic) - expected), 1e-15);
  EXPECT_LT(max_abs(pullback(map, toy, ChartPoint(-0.5, {0.0}), JacobianMode::finite_difference) - expected), 1e-9);
}

TEST(Pullback, IsSymmetric) {
  const Matrix g = pullback(psi_toy_map(3), MetricModel::toy(3), ChartPoint(2.5, {1.0, -1.0}),
                            JacobianMode::finite_difference);
  EXPECT_EQ(g, g.transpose());
}

TEST(Pullback, RankDeficientJacobianRaisesImmersionError) {
  // Collapses the spatial direction: rank 1 < 2.
  EmbeddingMap flat(
      2, 3, [](const ChartPoint& p) { return MinkowskiEvent(p.t, {0.0, 0.0}); },
      EmbeddingMap::JacobianFn([](const ChartPoint&) {
        Matrix J = Matrix::Zero(3, 2);
        J(0, 0) = 1.0;
        return J;
      }),
      [](const ChartPoint&) { return true; });
  try {
    pullback(flat, MetricModel::toy(2), ChartPoint(0.0, {0.0}), JacobianMode::analytic);
    FAIL() << "expected ImmersionError";
  } catch (const ImmersionError& e) {
    EXPECT_EQ(e.rank(), 1);
  }
}

TEST(Pullback, DimensionMismatchIsPrecondition) {
  EXPECT_THROW(pullback(psi_toy_map(2), MetricModel::toy(3), ChartPoint(0.0, {0.0}), JacobianMode::analytic),
               PreconditionError);
}

TEST(IsometryResidual, PerturbedMapRegression) {
  // psi with f scaled by 1.01: residual |(1.01^2 - 1)(1 + t)| = 0.0402 at t = 1.
  const double r = isometry_residual(psi_toy_map(2, 1.01), MetricModel::toy(2), ChartPoint(1.0, {0.0}),
                                     JacobianMode::analytic);
  EXPECT_NEAR(r, (1.01 * 1.01 - 1.0) * 2.0, 1e-14);
  EXPECT_NEAR(r, 0.0402, 1e-12);
}

TEST(IsometryResidual, AnalyticAndFiniteDifferenceAgree) {
  const MetricModel toy = MetricModel::toy(2);
  const EmbeddingMap map = psi_toy_map(2);
  NumericConfig cfg;
  for (double t : {-0.9, -0.3, 0.0, 0.7, 4.0, 9.5}) {
    const ChartPoint p(t, {1.0});
    const Matrix a = pullback(map, toy, p, JacobianMode::analytic, cfg);
    const Matrix f = pullback(map, toy, p, JacobianMode::finite_difference, cfg);
    const double h = cfg.fd_step * std::max(1.0, std::abs(t));
    EXPECT_LE(max_abs(a - f), 10.0 * h) << "t = " << t;
  }
}

TEST(JacobianRank, FullRankForPsiEverywhereOnDomain) {
  const EmbeddingMap map = psi_toy_map(3);
  for (double t : {-1.0 + 1e-9, -0.5, 0.0, 10.0, 1e6}) {
    EXPECT_EQ(jacobian_rank(map.jacobian(ChartPoint(t, {0.0, 0.0}), JacobianMode::analytic)), 3) << t;
  }
}

TEST(EmbeddingMap, ConstructionContracts) {
  auto value = [](const ChartPoint& p) { return MinkowskiEvent(p.t, p.spatial); };
  auto domain = [](const ChartPoint&) { return true; };
  EXPECT_THROW(EmbeddingMap(1, 2, value, std::nullopt, domain), PreconditionError);
  EXPECT_THROW(EmbeddingMap(3, 2, value, std::nullopt, domain), PreconditionError);
  const EmbeddingMap wrong(2, 3, value, std::nullopt, domain);
  EXPECT_THROW(wrong(ChartPoint(0.0, {1.0})), PreconditionError);  // returns N = 2
}

TEST(PsiChartInverse, RetractsAndMeasuresMembership) {
  const EmbeddingMap map = psi_toy_map(3);
  ASSERT_TRUE(map.inverse().has_value());
  const ChartPoint p(1.7, {0.25, -4.0});
  const MinkowskiEvent e = map(p);
  const ChartPoint back = map.inverse()->retract(e);
  EXPECT_EQ(back.t, p.t);
  EXPECT_EQ(back.spatial, p.spatial);
  EXPECT_EQ(map.inverse()->membership(e), 0.0);
  MinkowskiEvent off = e;
  off.tau += 0.5;
  EXPECT_DOUBLE_EQ(map.inverse()->membership(off), 0.5);
  off.y(0) = -2.0;
  EXPECT_TRUE(std::isnan(map.inverse()->membership(off)));
}

}  // namespace
}  // namespace sigchange
