#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "d2d/boundary.hpp"
#include "d2d/config.hpp"
#include "gen.hpp"
#include "oracles.hpp"

namespace d2d {
namespace {

using test::for_all;
using test::Gen;

const ChannelPool& two_pair_pool() {
  static const ChannelPool pool = [] {
    Rng rng(60);
    return ChannelPool(ChannelModel::rayleigh_default(2), 1.0, 1.0, 20000, rng);
  }();
  return pool;
}

TEST(DualSchedule, Examples) {
  const std::vector<double> r{1.7, 0.4, 2.2}, pg{0.3, 0.2, 0.9};
  EXPECT_EQ(dual_schedule(r, pg, {{1.0, 1.0}, 0.0}, 0, kInfinity), 2u);

  const std::vector<double> r2{1.0, 0.5}, pg2{1.0, 0.1};
  EXPECT_EQ(dual_schedule(r2, pg2, {{1.0}, 1.0}, 0, kInfinity), 1u);
  EXPECT_FALSE(dual_schedule(r2, pg2, {{1.0}, 10.0}, 0, kInfinity));
}

TEST(DualSchedule, FromGainsMatchesFromRates) {
  const std::vector<double> h{1.0, 3.0}, g{0.5, 0.2};
  const Multipliers mult{{0.7}, 0.4};
  const std::vector<double> r{std::log1p(1.0), std::log1p(3.0)};
  EXPECT_EQ(dual_schedule(h, g, mult, 0, 1.0, 1.0, kInfinity), dual_schedule(r, g, mult, 0, kInfinity));
}

TEST(DualSchedule, MatchesEnumeration) {
  for_all(10000, 61, [](Gen& gen) {
    const std::size_t n = gen.size(1, 6), target = gen.size(0, n - 1);
    const auto r = gen.coin() ? gen.lattice(n, 0, 3) : gen.vector(n, 0, 3);
    const auto pg = gen.lattice(n, 0, 3);
    const auto lambda = gen.coin() ? gen.lattice(n - 1, 0, 2) : gen.vector(n - 1, 0, 3);
    const double mu = gen.coin(0.3) ? 0.0 : gen.uniform(0, 2);
    const double nu = gen.coin(0.5) ? kInfinity : gen.uniform(0.5, 3);
    EXPECT_EQ(dual_schedule(r, pg, {lambda, mu}, target, nu), oracle::dual_activation(r, pg, lambda, mu, target, nu));
  });
}

TEST(BoundaryPoint, LonePairGetsItsFullRate) {
  const auto& pool = two_pair_pool();
  const std::vector<double> alpha{0.0};
  const auto p = solve_boundary_point(pool, 0, alpha, kInfinity, kInfinity);
  EXPECT_TRUE(p.feasible);
  EXPECT_EQ(p.multipliers.lambda[0], 0.0);
  EXPECT_EQ(p.multipliers.mu, 0.0);
  EXPECT_NEAR(p.rates[0], pool.max_rate(0, kInfinity), 1e-3 * pool.max_rate(0, kInfinity));
}

TEST(BoundaryPoint, SymmetricPointSplitsTheMaxRate) {
  const auto& pool = two_pair_pool();
  double best = 0.0;
  for (std::size_t s = 0; s < pool.size(); ++s) best += std::max(pool.rates(s)[0], pool.rates(s)[1]);
  best /= static_cast<double>(pool.size());
  const std::vector<double> alpha{best / 2};
  const auto p = solve_boundary_point(pool, 0, alpha, kInfinity, kInfinity);
  ASSERT_TRUE(p.feasible);
  EXPECT_NEAR(p.rates[1], best / 2, 1e-3 * best);
  EXPECT_NEAR(p.rates[0], best / 2, 1e-3 * best);
}

TEST(BoundaryPoint, ZeroInterferenceBudgetSilencesEveryone) {
  const auto& pool = two_pair_pool();
  const std::vector<double> alpha{0.0};
  const auto p = solve_boundary_point(pool, 0, alpha, 0.0, kInfinity);
  EXPECT_NEAR(p.rates[0], 0.0, 1e-3);
  EXPECT_NEAR(p.rates[1], 0.0, 1e-3);
  EXPECT_LE(p.interference, 1e-5);
}

TEST(BoundaryPoint, InfeasibleTargetIsReported) {
  const auto& pool = two_pair_pool();
  const std::vector<double> alpha{pool.max_rate(1, kInfinity) * 1.05};
  EXPECT_FALSE(solve_boundary_point(pool, 0, alpha, kInfinity, kInfinity).feasible);
  EXPECT_FALSE(solve_unconstrained_point(pool, 0, alpha).feasible);
}

TEST(BoundaryPoint, KktResidualAndConstraintsAtConvergence) {
  const auto& pool = two_pair_pool();
  for (double gamma : {0.05, 0.2, 0.5, kInfinity}) {
    for (double a : {0.1, 0.4, 0.8}) {
      const std::vector<double> alpha{a};
      const auto p = solve_boundary_point(pool, 0, alpha, gamma, kInfinity);
      if (!p.feasible) continue;
      EXPECT_TRUE(p.converged) << gamma << " " << a;
      EXPECT_LE(p.interference, gamma * (1 + 1e-3) + 1e-9);
      EXPECT_LE(p.kkt_residual, 1e-3 * std::max(1.0, p.multipliers.lambda[0]));
      EXPECT_NEAR(p.rates[1], a, 1e-3 * a + 1e-9);
    }
  }
}

TEST(BoundaryPoint, RateMonotoneInTargetAndGamma) {
  const auto& pool = two_pair_pool();
  const double gammas[] = {0.05, 0.1, 0.5, kInfinity};
  const double targets[] = {0.0, 0.2, 0.4, 0.6, 0.8};
  for (double gamma : gammas) {
    double prev = HUGE_VAL;
    for (double a : targets) {
      const std::vector<double> alpha{a};
      const auto p = solve_boundary_point(pool, 0, alpha, gamma, kInfinity);
      if (!p.feasible) continue;
      EXPECT_LE(p.rates[0], prev * (1 + 2e-3)) << gamma << " " << a;
      prev = p.rates[0];
    }
  }
  for (double a : targets) {
    const std::vector<double> alpha{a};
    double prev = -1.0;
    for (double gamma : gammas) {
      const auto p = solve_boundary_point(pool, 0, alpha, gamma, kInfinity);
      if (!p.feasible) continue;
      EXPECT_GE(p.rates[0], prev * (1 - 2e-3)) << gamma << " " << a;
      prev = p.rates[0];
    }
  }
}

TEST(BoundaryPoint, UnlimitedInterferenceReproducesUnconstrainedPolicy) {
  const auto& pool = two_pair_pool();
  for (double a : {0.1, 0.5, 0.9}) {
    const std::vector<double> alpha{a};
    const auto dual = solve_boundary_point(pool, 0, alpha, kInfinity, kInfinity);
    const auto free = solve_unconstrained_point(pool, 0, alpha);
    ASSERT_TRUE(dual.feasible && free.feasible);
    EXPECT_FALSE(free.constrained);
    EXPECT_EQ(dual.multipliers.mu, 0.0);
    EXPECT_NEAR(dual.rates[0], free.rates[0], 1e-3 * free.rates[0]);
    EXPECT_NEAR(dual.multipliers.lambda[0], free.multipliers.lambda[0], 1e-6 * free.multipliers.lambda[0]);
    // Same multipliers: the per-state decisions coincide on the shared draws.
    for (std::size_t s = 0; s < pool.size(); ++s) {
      const auto r = pool.rates(s);
      const auto d = dual_schedule(r, pool.interference(s), free.multipliers, 0, kInfinity);
      const std::size_t expected = free.multipliers.lambda[0] * r[1] > r[0] ? 1 : 0;
      ASSERT_EQ(d.value_or(99), expected);
    }
  }
}

TEST(BoundaryPoint, SubgradientAgreesWithBisection) {
  const auto& pool = two_pair_pool();
  const std::vector<double> alpha{0.3};
  BoundaryOptions sub;
  sub.method = BoundaryMethod::Subgradient;
  sub.tol = 5e-3;
  const auto a = solve_boundary_point(pool, 0, alpha, 0.3, kInfinity);
  const auto b = solve_boundary_point(pool, 0, alpha, 0.3, kInfinity, sub);
  ASSERT_TRUE(a.feasible && b.feasible);
  EXPECT_NEAR(a.rates[0], b.rates[0], 0.02 * a.rates[0]);
}

TEST(BoundaryPoint, InstantaneousLimitIsRespected) {
  const auto& pool = two_pair_pool();
  const std::vector<double> alpha{0.2};
  const double nu = 0.8;
  const auto p = solve_boundary_point(pool, 0, alpha, kInfinity, nu);
  ASSERT_TRUE(p.feasible);
  for (std::size_t s = 0; s < pool.size(); ++s) {
    const auto d = dual_schedule(pool.rates(s), pool.interference(s), p.multipliers, 0, nu);
    if (d) {
      ASSERT_LE(pool.interference(s)[*d], nu);
    }
  }
  EXPECT_LE(p.rates[0], pool.max_rate(0, nu) + 1e-12);
}

TEST(TraceRegion, GammaMajorAndThreadCountInvariant) {
  const auto& pool = two_pair_pool();
  const auto grid = two_pair_grid(pool, 0, kInfinity, 4);
  ASSERT_EQ(grid.size(), 4u);
  EXPECT_EQ(grid.front()[0], 0.0);
  EXPECT_DOUBLE_EQ(grid.back()[0], pool.max_rate(1, kInfinity));
  const std::vector<double> gammas{0.1, kInfinity};
  const auto one = trace_region(pool, 0, grid, gammas, kInfinity, {}, 1);
  const auto two = trace_region(pool, 0, grid, gammas, kInfinity, {}, 2);
  ASSERT_EQ(one.size(), 8u);
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].gamma, gammas[k / 4]);
    EXPECT_EQ(one[k].alpha, grid[k % 4]);
    EXPECT_EQ(one[k].rates, two[k].rates);
    EXPECT_EQ(one[k].multipliers.mu, two[k].multipliers.mu);
  }
}

TEST(TraceRegion, RejectsEmptyGrid) {
  const std::vector<std::vector<double>> grid;
  const std::vector<double> gammas{1.0};
  EXPECT_THROW(trace_region(two_pair_pool(), 0, grid, gammas, kInfinity), std::invalid_argument);
}

}  // namespace
}  // namespace d2d
