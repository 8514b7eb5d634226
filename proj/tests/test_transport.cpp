#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>

#include "mlot/transport.hpp"
#include "oracles.hpp"

namespace {

using mlot::ActiveSet;
using mlot::IndexPair;
using mlot::Point;
using mlot::TransportSolution;

std::map<std::pair<std::uint32_t, std::uint32_t>, double> plan_map(const TransportSolution& s) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> m;
  for (const auto& e : s.plan) m[{e.row, e.col}] = e.mass;
  return m;
}

std::vector<double> dense_costs(const std::vector<double>& x, const std::vector<double>& y,
                                double p) {
  const auto c = mlot::CostFunction::power(p);
  std::vector<double> out;
  for (double a : x) {
    for (double b : y) out.push_back(c(Point{a, 0.0}, Point{b, 0.0}));
  }
  return out;
}

// Marginals, complementary slackness, dual feasibility on the solved set,
// strong duality.
void expect_certificate(const TransportSolution& s, std::span<const double> a,
                        std::span<const double> b, const ActiveSet& active,
                        std::span<const double> c) {
  ASSERT_TRUE(s.optimal());
  const std::size_t m = a.size(), n = b.size();
  std::vector<double> rows(m, 0.0), cols(n, 0.0);
  for (const auto& e : s.plan) {
    EXPECT_GE(e.mass, 0.0);
    rows[e.row] += e.mass;
    cols[e.col] += e.mass;
    const std::size_t k = active.find({e.row, e.col});
    ASSERT_LT(k, active.size());
    EXPECT_NEAR(s.phi[e.row] + s.psi[e.col], c[k], 1e-9);
  }
  const double tol = 1e-12 * static_cast<double>(std::max(m, n));
  for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(rows[i], a[i], tol);
  for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(cols[j], b[j], tol);
  for (std::size_t k = 0; k < active.size(); ++k) {
    EXPECT_LE(s.phi[active[k].row] + s.psi[active[k].col], c[k] + 1e-9);
  }
  double dual = 0.0;
  for (std::size_t i = 0; i < m; ++i) dual += s.phi[i] * a[i];
  for (std::size_t j = 0; j < n; ++j) dual += s.psi[j] * b[j];
  EXPECT_NEAR(s.objective, dual, 1e-9 * std::max(1.0, std::abs(s.objective)));
  EXPECT_LE(s.plan.size(), m + n - 1);
  EXPECT_EQ(s.basis.size(), m + n - 1);
}

TEST(Assemble, CostValues) {
  const auto m0 = mlot::build_mesh(mlot::Domain::interval(0.0, 1.0), 0);
  const auto all = ActiveSet::full(2, 2);
  const auto c = mlot::assemble(m0, m0, mlot::CostFunction::power(2.0), all);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_DOUBLE_EQ(c[0], 0.0);
  EXPECT_DOUBLE_EQ(c[1], 0.5);
  EXPECT_DOUBLE_EQ(c[2], 0.5);
  EXPECT_DOUBLE_EQ(c[3], 0.0);
  const auto c32 = mlot::CostFunction::power(1.5);
  EXPECT_NEAR(c32(Point{0.0, 0.0}, Point{1.0, 1.0}), 2.0 / 3.0 * std::pow(2.0, 0.75), 1e-15);
}

TEST(Assemble, FollowsActiveSetOrder) {
  const auto m = mlot::build_mesh(mlot::Domain::interval(0.0, 1.0), 1);
  const auto active = ActiveSet::from_pairs({{2, 0}, {0, 2}, {1, 1}});
  const auto c = mlot::assemble(m, m, mlot::CostFunction::power(2.0), active);
  EXPECT_DOUBLE_EQ(c[0], 0.5);  // (0, 2)
  EXPECT_DOUBLE_EQ(c[1], 0.0);  // (1, 1)
  EXPECT_DOUBLE_EQ(c[2], 0.5);  // (2, 0)
}

TEST(CostFunction, PowerCosts) {
  const Point x{0.0, 0.0}, y{3.0, 4.0};
  EXPECT_DOUBLE_EQ(mlot::CostFunction::power(2.0)(x, y), 12.5);
  EXPECT_DOUBLE_EQ(mlot::CostFunction::power(3.0)(x, y), 125.0 / 3.0);
  EXPECT_DOUBLE_EQ(mlot::CostFunction::power(1.0)(x, y), 5.0);
  EXPECT_NEAR(mlot::CostFunction::power(2.5)(x, y), std::pow(5.0, 2.5) / 2.5, 1e-12);
  EXPECT_DOUBLE_EQ(mlot::CostFunction::power(1.5)(x, x), 0.0);
  EXPECT_DOUBLE_EQ(mlot::CostFunction::power(1.5).regularity(), 0.5);
  EXPECT_DOUBLE_EQ(mlot::CostFunction::power(3.0).regularity(), 1.0);
  EXPECT_THROW(mlot::CostFunction::power(0.5), std::invalid_argument);
  const auto custom = mlot::CostFunction::custom([](const Point& a, const Point& b) {
    return std::abs(a[0] - b[0]);
  });
  EXPECT_DOUBLE_EQ(custom(x, y), 3.0);
}

TEST(SolveReduced, SingleAtom) {
  const std::vector<double> a{1.0}, b{1.0}, c{0.7};
  const auto s = mlot::solve_reduced(c, a, b, ActiveSet::full(1, 1));
  ASSERT_TRUE(s.optimal());
  ASSERT_EQ(s.plan.size(), 1u);
  EXPECT_DOUBLE_EQ(s.plan[0].mass, 1.0);
  EXPECT_DOUBLE_EQ(s.objective, 0.7);
}

TEST(SolveReduced, DiagonalIsOptimal) {
  const std::vector<double> a{0.5, 0.5}, b{0.5, 0.5};
  const auto c = dense_costs({0.0, 1.0}, {0.0, 1.0}, 2.0);
  const auto s = mlot::solve_reduced(c, a, b, ActiveSet::full(2, 2));
  const auto m = plan_map(s);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m.at({0, 0}), 0.5);
  EXPECT_DOUBLE_EQ(m.at({1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(s.objective, 0.0);
}

TEST(SolveReduced, TwoByTwoUnbalanced) {
  const std::vector<double> a{0.3, 0.7}, b{0.6, 0.4};
  const auto c = dense_costs({0.0, 1.0}, {0.0, 1.0}, 2.0);
  const auto all = ActiveSet::full(2, 2);
  const auto s = mlot::solve_reduced(c, a, b, all);
  const auto m = plan_map(s);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_NEAR(m.at({0, 0}), 0.3, 1e-15);
  EXPECT_NEAR(m.at({1, 0}), 0.3, 1e-15);
  EXPECT_NEAR(m.at({1, 1}), 0.4, 1e-15);
  EXPECT_NEAR(s.objective, 0.15, 1e-15);
  expect_certificate(s, a, b, all, c);
}

TEST(SolveReduced, ZeroWeightRow) {
  const std::vector<double> a{0.0, 1.0}, b{0.5, 0.5};
  const auto c = dense_costs({0.0, 1.0}, {0.0, 1.0}, 2.0);
  const auto all = ActiveSet::full(2, 2);
  const auto s = mlot::solve_reduced(c, a, b, all);
  const auto m = plan_map(s);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m.at({1, 0}), 0.5);
  EXPECT_DOUBLE_EQ(m.at({1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(s.objective, 0.25);
  expect_certificate(s, a, b, all, c);
}

TEST(SolveReduced, GaugePinsFirstColumn) {
  const std::vector<double> a{0.3, 0.7}, b{0.6, 0.4};
  const auto c = dense_costs({0.0, 1.0}, {0.0, 1.0}, 2.0);
  EXPECT_EQ(mlot::solve_reduced(c, a, b, ActiveSet::full(2, 2)).psi[0], 0.0);
}

TEST(SolveReduced, InfeasibleActiveSetIsReported) {
  const std::vector<double> a{0.5, 0.5}, b{0.5, 0.5};
  const auto active = ActiveSet::from_pairs({{0, 0}, {1, 0}});
  const std::vector<double> c{0.0, 0.0};
  const auto s = mlot::solve_reduced(c, a, b, active);
  EXPECT_FALSE(s.optimal());
}

TEST(SolveReduced, ArtificialArcsLeaveWhenRoutingExists) {
  // north-west cells (0,0), (0,1), (1,1) are not all admissible
  const std::vector<double> a{0.5, 0.5}, b{0.5, 0.5};
  const auto active = ActiveSet::from_pairs({{0, 1}, {1, 0}});
  const std::vector<double> c{2.0, 3.0};
  const auto s = mlot::solve_reduced(c, a, b, active);
  ASSERT_TRUE(s.optimal());
  EXPECT_GE(s.stats.artificial_arcs, 1u);
  EXPECT_NEAR(s.objective, 2.5, 1e-15);
}

TEST(SolveReduced, InputValidation) {
  const std::vector<double> c{0.0};
  const std::vector<double> one{1.0}, half{0.5};
  EXPECT_THROW(mlot::solve_reduced(c, one, half, ActiveSet::full(1, 1)), std::invalid_argument);
  const std::vector<double> neg{-1.0, 2.0};
  const std::vector<double> c2{0.0, 0.0};
  EXPECT_THROW(mlot::solve_reduced(c2, neg, one, ActiveSet::full(2, 1)), std::invalid_argument);
  EXPECT_THROW(mlot::solve_reduced(c2, one, one, ActiveSet::full(1, 1)), std::invalid_argument);
  const auto outside = ActiveSet::from_pairs({{0, 3}});
  EXPECT_THROW(mlot::solve_reduced(c, one, one, outside), std::out_of_range);
}

TEST(SolveReduced, WarmStartFromOptimalBasisNeedsNoPivots) {
  std::mt19937_64 rng(11);
  const auto inst = mlot::testing::random_instance(rng, 8, 8);
  const auto all = ActiveSet::full(inst.rows(), inst.cols());
  const auto cold = mlot::solve_reduced(inst.cost, inst.supply, inst.demand, all);
  const auto warm = mlot::solve_reduced(inst.cost, inst.supply, inst.demand, all, {}, cold.basis);
  EXPECT_TRUE(warm.stats.warm_started);
  EXPECT_EQ(warm.stats.pivots, 0u);
  EXPECT_NEAR(warm.objective, cold.objective, 1e-14);
}

TEST(SolveReduced, InvalidWarmBasisFallsBackToNorthWest) {
  const std::vector<double> a{0.3, 0.7}, b{0.6, 0.4};
  const auto c = dense_costs({0.0, 1.0}, {0.0, 1.0}, 2.0);
  const std::vector<IndexPair> cycle{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  const auto s = mlot::solve_reduced(c, a, b, ActiveSet::full(2, 2), {}, cycle);
  EXPECT_FALSE(s.stats.warm_started);
  EXPECT_NEAR(s.objective, 0.15, 1e-15);
  // a tree whose flows would be negative
  const std::vector<IndexPair> bad{{0, 0}, {1, 0}, {1, 1}};
  const std::vector<double> a2{0.9, 0.1}, b2{0.1, 0.9};
  const auto s2 = mlot::solve_reduced(c, a2, b2, ActiveSet::full(2, 2), {}, bad);
  EXPECT_FALSE(s2.stats.warm_started);
}

TEST(NorthWestCorner, SpanningTreeWithDegenerateCells) {
  const std::vector<double> a{0.5, 0.5}, b{0.5, 0.5};
  const auto cells = mlot::north_west_corner(a, b);
  ASSERT_EQ(cells.size(), 3u);
  double total = 0.0;
  for (const auto& e : cells) total += e.mass;
  EXPECT_DOUBLE_EQ(total, 1.0);
  int zeros = 0;
  for (const auto& e : cells) zeros += e.mass == 0.0;
  EXPECT_EQ(zeros, 1);
}

TEST(SolveFull, MatchesDualityOnFirstExample) {
  auto mesh = std::make_shared<const mlot::Mesh>(
      mlot::build_mesh(mlot::Domain::interval(0.0, 1.0), 1));
  const auto mu = mlot::discretize_density(
      mesh, [](const Point& x) { return 2.0 / 3.0 * (x[0] + 1.0); });
  const auto nu = mlot::discretize_density(mesh, [](const Point&) { return 1.0; });
  const auto cost = mlot::CostFunction::power(2.0);
  const auto s = mlot::solve_full(*mesh, *mesh, cost, mu, nu);
  EXPECT_GE(s.objective, 0.0);
  const auto all = ActiveSet::full(3, 3);
  expect_certificate(s, mu.weights(), nu.weights(), all, mlot::assemble(*mesh, *mesh, cost, all));
}

TEST(SolveFull, EqualMarginalsHaveZeroCost) {
  for (double p : {1.5, 2.0, 3.0}) {
    auto mesh = std::make_shared<const mlot::Mesh>(
        mlot::build_mesh(mlot::Domain::rectangle(0.0, 1.0, 0.0, 1.0), 2));
    const auto mu = mlot::discretize_density(mesh, [](const Point& x) { return 1.0 + x[0]; });
    const auto s = mlot::solve_full(*mesh, *mesh, mlot::CostFunction::power(p), mu, mu);
    EXPECT_NEAR(s.objective, 0.0, 1e-15) << "p = " << p;
  }
}

TEST(SolveFull, CapIsEnforced) {
  auto mesh = std::make_shared<const mlot::Mesh>(
      mlot::build_mesh(mlot::Domain::interval(0.0, 1.0), 4));
  const auto mu = mlot::discretize_density(mesh, [](const Point&) { return 1.0; });
  mlot::SolverOptions opt;
  opt.full_lp_cap = 100;
  EXPECT_THROW(mlot::solve_full(*mesh, *mesh, mlot::CostFunction::power(2.0), mu, mu, opt),
               std::length_error);
}

TEST(SolveReduced, MatchesSpanningTreeOracle) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 60; ++k) {
    const auto inst = mlot::testing::random_instance(rng, 5, 5);
    const auto all = ActiveSet::full(inst.rows(), inst.cols());
    const auto s = mlot::solve_reduced(inst.cost, inst.supply, inst.demand, all);
    mlot::testing::SpanningTreeOracle oracle(inst.supply, inst.demand, inst.cost);
    EXPECT_NEAR(s.objective, oracle.solve(), 1e-10) << "instance " << k;
    expect_certificate(s, inst.supply, inst.demand, all, inst.cost);
  }
}

TEST(SolveReduced, OracleCountsSpanningTrees) {
  // Cayley-type count for K_{m,n}: m^(n-1) n^(m-1)
  const std::vector<double> a(3, 1.0 / 3.0), b(4, 0.25);
  mlot::testing::SpanningTreeOracle oracle(a, b, std::vector<double>(12, 0.0));
  oracle.solve();
  EXPECT_EQ(oracle.trees_enumerated(), 3u * 3u * 3u * 4u * 4u);
}

TEST(SolveReduced, PricingRulesAgree) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    const auto inst = mlot::testing::random_instance(rng, 12, 12);
    const auto all = ActiveSet::full(inst.rows(), inst.cols());
    mlot::SolverOptions dantzig;
    dantzig.pricing = mlot::PricingRule::kDantzig;
    mlot::SolverOptions bland;
    bland.stall_limit = 1;  // switch to Bland's rule almost immediately
    const auto a = mlot::solve_reduced(inst.cost, inst.supply, inst.demand, all);
    const auto b = mlot::solve_reduced(inst.cost, inst.supply, inst.demand, all, dantzig);
    const auto c = mlot::solve_reduced(inst.cost, inst.supply, inst.demand, all, bland);
    EXPECT_NEAR(a.objective, b.objective, 1e-12);
    EXPECT_NEAR(a.objective, c.objective, 1e-12);
  }
}

TEST(SolveReduced, CostShiftCovariance) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 40; ++k) {
    const auto inst = mlot::testing::random_instance(rng, 7, 7);
    const auto all = ActiveSet::full(inst.rows(), inst.cols());
    const double kappa = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    auto shifted = inst.cost;
    for (auto& v : shifted) v += kappa;
    const auto s0 = mlot::solve_reduced(inst.cost, inst.supply, inst.demand, all);
    const auto s1 = mlot::solve_reduced(shifted, inst.supply, inst.demand, all);
    EXPECT_NEAR(s1.objective, s0.objective + kappa, 1e-12);
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < inst.rows(); ++i) {
      d0 += s0.phi[i] * inst.supply[i];
      d1 += s1.phi[i] * inst.supply[i];
    }
    for (std::size_t j = 0; j < inst.cols(); ++j) {
      d0 += s0.psi[j] * inst.demand[j];
      d1 += s1.psi[j] * inst.demand[j];
    }
    EXPECT_NEAR(d1 - d0, kappa, 1e-12);
    // same pivots on the same tie-breaking order, hence the same support
    std::vector<std::pair<std::uint32_t, std::uint32_t>> p0, p1;
    for (const auto& e : s0.plan) p0.push_back({e.row, e.col});
    for (const auto& e : s1.plan) p1.push_back({e.row, e.col});
    std::sort(p0.begin(), p0.end());
    std::sort(p1.begin(), p1.end());
    EXPECT_EQ(p0, p1);
  }
}

TEST(SolveReduced, OneDimensionalSupportIsMonotone) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double p : {1.5, 2.0, 3.0}) {
    for (int k = 0; k < 30; ++k) {
      auto inst = mlot::testing::random_instance(rng, 5, 5);
      std::vector<double> x(inst.rows()), y(inst.cols());
      for (auto& v : x) v = unit(rng);
      for (auto& v : y) v = unit(rng);
      std::sort(x.begin(), x.end());
      std::sort(y.begin(), y.end());
      inst.cost = dense_costs(x, y, p);
      const auto s = mlot::solve_reduced(inst.cost, inst.supply, inst.demand,
                                         ActiveSet::full(inst.rows(), inst.cols()));
      mlot::testing::SpanningTreeOracle oracle(inst.supply, inst.demand, inst.cost);
      EXPECT_NEAR(s.objective, oracle.solve(), 1e-10);
      for (const auto& e : s.plan) {
        for (const auto& f : s.plan) {
          if (e.mass > 1e-14 && f.mass > 1e-14) {
            EXPECT_FALSE(e.row < f.row && e.col > f.col) << "crossing pairs, p = " << p;
          }
        }
      }
    }
  }
}

TEST(SolveReduced, LargerRandomInstancesPassCertificates) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const auto inst = mlot::testing::random_instance(rng, 60, 60);
    // sparse admissible set plus the north-west cells so it stays feasible
    std::vector<IndexPair> pairs;
    std::vector<double> c;
    for (std::uint32_t i = 0; i < inst.rows(); ++i) {
      for (std::uint32_t j = 0; j < inst.cols(); ++j) {
        if (unit(rng) < 0.3) pairs.push_back({i, j});
      }
    }
    const auto active = ActiveSet::from_pairs(pairs).united(
        mlot::ActiveSet::from_pairs([&] {
          std::vector<IndexPair> nw;
          for (const auto& e : mlot::north_west_corner(inst.supply, inst.demand)) {
            nw.push_back({e.row, e.col});
          }
          return nw;
        }()));
    for (const auto& p : active) c.push_back(inst.cost[p.row * inst.cols() + p.col]);
    const auto s = mlot::solve_reduced(c, inst.supply, inst.demand, active);
    expect_certificate(s, inst.supply, inst.demand, active, c);
  }
}

}  // namespace
