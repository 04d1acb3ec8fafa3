#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "linkarea/cyclic.hpp"
#include "linkarea/indices.hpp"
#include "linkarea/oracle.hpp"
#include "support/linkages.hpp"

using namespace linkarea;

namespace {

struct Problem {
  AngleChart chart;
  TrigObjective area;
};

Problem polygon_problem(const std::vector<double>& l, std::optional<std::size_t> gauge = std::nullopt) {
  auto p = fixtures::polygon(l);
  AngleChart chart(p.graph, gauge);
  auto obj = area_objective(chart, p.cycle);
  return {chart, obj};
}

LinkageGraph three_chain_222(const std::vector<double>& l) {
  return LinkageGraph({"I", "T", "A1", "B1", "Z1"}, {{"I", "A1", l[0]}, {"A1", "T", l[1]}, {"I", "B1", l[2]},
                                                     {"B1", "T", l[3]}, {"I", "Z1", l[4]}, {"Z1", "T", l[5]}});
}

}  // namespace

TEST(AngleChart, Dimensions) {
  auto pg = polygon_problem({1, 1.2, 0.9, 1.1, 1.3});
  EXPECT_EQ(pg.chart.variable_count(), 4U);
  EXPECT_EQ(pg.chart.constraint_count(), 2U);
  EXPECT_EQ(pg.chart.dimension(), 2);

  AngleChart tc(three_chain_222({1, 1, 1, 1, 1, 1}));
  EXPECT_EQ(tc.variable_count(), 5U);
  EXPECT_EQ(tc.constraint_count(), 4U);
  EXPECT_EQ(tc.dimension(), 1);

  AngleChart chain(fixtures::open_chain({1, 2, 3}));
  EXPECT_EQ(chain.dimension(), 2);
  EXPECT_EQ(chain.constraint_count(), 0U);
}

TEST(Projection, Examples) {
  auto sq = polygon_problem({1, 1, 1, 1});
  Configuration c;
  c["p0"] = Vec2(0, 0);
  c["p1"] = Vec2(1, 0);
  c["p2"] = Vec2(1, 1);
  c["p3"] = Vec2(0, 1);
  VectorXd x = sq.chart.coordinates(c);
  EXPECT_LE((project_to_manifold(sq.chart, x) - x).norm(), 1e-15);

  auto tri = polygon_problem({1, 1, 1});
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    VectorXd y = random_feasible(tri.chart, rng);
    EXPECT_NEAR(std::abs(tri.area.value(tri.chart.full(y))), std::sqrt(3.0) / 4, 1e-12);
  }
  for (int t = 0; t < 50; ++t) {
    VectorXd y = random_feasible(sq.chart, rng);
    EXPECT_LE(sq.chart.residual(y).norm(), 4e-12);
    EXPECT_LE(max_length_residual(sq.chart.graph(), sq.chart.configuration(y)), 1e-11);
  }
}

TEST(FindCritical, Square) {
  // The rhombus linkage sits on a wall (1 + 1 - 1 - 1 = 0): besides the convex
  // circle its space has two folded circles (p0 = p2 or p1 = p3) on which the
  // area vanishes identically, so every folded point is critical. Only the two
  // convex squares carry nonzero area.
  auto sq = polygon_problem({1, 1, 1, 1});
  OracleOptions opts;
  opts.n_seeds = 200;
  std::vector<NumericCritical> nonzero;
  for (auto& f : find_critical_numeric(sq.chart, sq.area, opts)) {
    if (std::abs(f.value) > 1e-9) {
      nonzero.push_back(f);
    } else {
      const auto& c = f.configuration;
      EXPECT_TRUE((c.at("p0") - c.at("p2")).norm() < 1e-6 || (c.at("p1") - c.at("p3")).norm() < 1e-6);
    }
  }
  ASSERT_EQ(nonzero.size(), 2U);
  EXPECT_NEAR(nonzero[0].value, -1.0, 1e-10);
  EXPECT_NEAR(nonzero[1].value, 1.0, 1e-10);
  EXPECT_EQ(nonzero[0].inertia.negative, 0);
  EXPECT_EQ(nonzero[0].inertia.positive, 1);
  EXPECT_EQ(nonzero[1].inertia.negative, 1);
  EXPECT_EQ(nonzero[1].inertia.positive, 0);
}

TEST(FindCritical, GenericQuadrilateralMatchesCyclicCount) {
  const std::vector<double> l{1, 1.3, 0.85, 1.2};
  auto q = polygon_problem(l);
  OracleOptions opts;
  opts.n_seeds = 300;
  auto found = find_critical_numeric(q.chart, q.area, opts);
  EXPECT_EQ(found.size(), enumerate_cyclic(l).size());
  int alternating = 0;
  for (const auto& f : found) alternating += f.inertia.negative % 2 ? -1 : 1;
  EXPECT_EQ(alternating, 0);
}

TEST(FindCritical, Triangle) {
  auto tri = polygon_problem({1, 1, 1});
  OracleOptions opts;
  opts.n_seeds = 50;
  auto found = find_critical_numeric(tri.chart, tri.area, opts);
  ASSERT_EQ(found.size(), 2U);
  for (const auto& f : found) EXPECT_EQ(f.inertia.dimension(), 0);
}

TEST(FindCritical, StationarityResidual) {
  std::mt19937_64 rng(12);
  auto pg = polygon_problem(fixtures::generic_lengths(rng, 6));
  OracleOptions opts;
  opts.n_seeds = 100;
  for (const auto& f : find_critical_numeric(pg.chart, pg.area, opts)) {
    const double g = pg.chart.reduce(pg.area.gradient(pg.chart.full(f.x))).norm();
    EXPECT_LE(f.stationarity, 1e-8 * g + 1e-12);
  }
}

TEST(Inertia, InvariantUnderRegauging) {
  std::mt19937_64 rng(13);
  const auto l = fixtures::generic_lengths(rng, 5);
  auto a = polygon_problem(l, 0);
  auto b = polygon_problem(l, 3);
  for (const auto& p : enumerate_cyclic(l)) {
    Configuration c;
    for (std::size_t i = 0; i < l.size(); ++i) c["p" + std::to_string(i)] = p.vertices[i];
    EXPECT_EQ(constrained_inertia(a.chart, a.area, c), constrained_inertia(b.chart, b.area, c));
  }
}

TEST(Inertia, NotCritical) {
  auto sq = polygon_problem({1, 1, 1, 1});
  Configuration c;
  c["p0"] = Vec2(0, 0);
  c["p1"] = Vec2(1, 0);
  c["p2"] = Vec2(1 + std::cos(1.2), std::sin(1.2));
  c["p3"] = Vec2(std::cos(1.2), std::sin(1.2));
  try {
    constrained_inertia(sq.chart, sq.area, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotCritical);
  }
}

TEST(OpenChain, IndexMatchesDistanceInertia) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int r = 1; r <= 5; ++r) {
    std::vector<double> l;
    for (int i = 0; i < r; ++i) l.push_back(u(rng));
    auto g = fixtures::open_chain(l);
    AngleChart chart(g);
    auto obj = pair_distance_objective(chart, {{"z0", "z" + std::to_string(r), 1.0}});
    for (int mask = 0; mask < (1 << r); ++mask) {
      // mask bit set = backward edge
      Configuration c;
      double x = 0;
      c["z0"] = Vec2(0, 0);
      for (int i = 0; i < r; ++i) {
        x += ((mask >> i) & 1) ? -l[i] : l[i];
        c["z" + std::to_string(i + 1)] = Vec2(x, 0);
      }
      if (std::abs(x) < 1e-9) continue;
      auto z = open_chain_critical_from(c, g.vertices(), 1e-9);
      auto in = constrained_inertia(chart, obj, c);
      EXPECT_EQ(in.zero, 0);
      EXPECT_EQ(in.negative, open_chain_index(z)) << "r=" << r << " mask=" << mask;
    }
  }
}

TEST(CyclicIndex, MatchesOracleOnRandomPolygons) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 12; ++t) {
    const std::size_t n = 4 + t % 3;
    const auto l = fixtures::generic_lengths(rng, n);
    auto pg = polygon_problem(l);
    auto all = enumerate_cyclic(l);
    ASSERT_FALSE(all.empty());
    for (const auto& p : all) {
      Configuration c;
      for (std::size_t i = 0; i < n; ++i) c["p" + std::to_string(i)] = p.vertices[i];
      auto in = constrained_inertia(pg.chart, pg.area, c);
      EXPECT_EQ(in.zero, 0);
      const int mu = cyclic_index(p);
      EXPECT_EQ(in.negative, mu);
      EXPECT_GE(mu, 0);
      EXPECT_LE(mu, static_cast<int>(n) - 3);
      EXPECT_EQ(mu + cyclic_index(p.mirrored()), static_cast<int>(n) - 3);
    }
  }
}

TEST(FdCheck, PassesAndCatchesCorruption) {
  std::mt19937_64 rng(31);
  auto sq = polygon_problem({1, 1, 1, 1});
  AngleChart tc(three_chain_222({1, 1.1, 0.9, 1.3, 1.2, 0.8}));
  auto tca = area_objective(tc, {"I", "A1", "T", "B1"});
  for (int t = 0; t < 10; ++t) {
    EXPECT_NO_THROW(fd_check_chart(sq.chart, sq.area, random_feasible(sq.chart, rng)));
    EXPECT_NO_THROW(fd_check_chart(tc, tca, random_feasible(tc, rng)));
  }
  struct Corrupted {
    ChartFunction inner;
    double value(const VectorXd& x) const { return inner.value(x); }
    VectorXd gradient(const VectorXd& x) const {
      VectorXd g = inner.gradient(x);
      g(0) += 1e-3 * (1 + std::abs(g(0)));
      return g;
    }
    MatrixXd hessian(const VectorXd& x) const { return inner.hessian(x); }
  };
  Corrupted bad{{&sq.chart, &sq.area}};
  try {
    fd_check(bad, random_feasible(sq.chart, rng));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CheckFailed);
  }
}

TEST(EulerEstimate, CircleAndTorus) {
  OracleOptions opts;
  opts.n_seeds = 300;
  AngleChart sq(fixtures::polygon({1, 1.3, 0.85, 1.2}).graph);
  EXPECT_EQ(euler_characteristic_estimate(sq, opts), 0);
  // the equilateral pentagon space is a closed surface of genus 4
  AngleChart pent(fixtures::polygon({1, 1, 1, 1, 1}).graph);
  opts.n_seeds = 3000;
  EXPECT_EQ(euler_characteristic_estimate(pent, opts), -6);
}
