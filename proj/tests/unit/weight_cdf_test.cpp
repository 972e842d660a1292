#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "d2d/control.hpp"
#include "d2d/weight_cdf.hpp"
#include "gen.hpp"
#include "oracles.hpp"

namespace d2d {
namespace {

using test::for_all;
using test::Gen;

TEST(WeightCdf, KeepsPositivesOnly) {
  const auto cdf = WeightCdf::from_samples(std::vector<double>{-1, 0, 2, 1, 4});
  EXPECT_EQ(cdf.sample_count(), 5u);
  EXPECT_DOUBLE_EQ(cdf.prob_positive(), 0.6);
  EXPECT_EQ(cdf.cdf(-3), 0.0);
  EXPECT_EQ(cdf.cdf(0), 0.0);
  EXPECT_EQ(cdf.cdf(4), 1.0);
  EXPECT_EQ(cdf.cdf(1e300), 1.0);
  EXPECT_NEAR(cdf.cdf(1), 1.0 / 3, 1e-15);
  EXPECT_NEAR(cdf.cdf(1.5), 0.5, 1e-15);
}

TEST(WeightCdf, DefaultIsDegenerate) {
  const WeightCdf cdf;
  EXPECT_TRUE(cdf.degenerate());
  EXPECT_EQ(cdf.prob_positive(), 0.0);
  EXPECT_EQ(cdf.cdf(5), 0.0);
}

TEST(WeightCdf, MonotoneAndQuantileInverts) {
  for_all(200, 20, [](Gen& gen) {
    std::vector<double> s(gen.size(1, 500));
    for (auto& x : s) x = gen.uniform(-2, 10);
    const auto cdf = WeightCdf::from_samples(s);
    double prev = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double x = -3 + 14.0 * k / 200;
      const double f = cdf.cdf(x);
      EXPECT_GE(f, prev);
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
      prev = f;
    }
    for (double x : cdf.support()) EXPECT_NEAR(cdf.quantile(cdf.cdf(x)), x, 1e-9 * (1 + x));
    for (int k = 0; k <= 50; ++k) {
      const double u = k / 50.0;
      EXPECT_NEAR(cdf.cdf(cdf.quantile(u)), u, 1e-9);
    }
  });
}

TEST(EstimateWeightCdf, NoInterferenceTermGivesRateCdf) {
  const auto model = ChannelModel::rayleigh_default(1);
  Rng rng(21);
  const auto cdf = estimate_weight_cdf(model, 0, 1.0, 0.0, 1.0, 1.0, 1000, rng);
  EXPECT_EQ(cdf.prob_positive(), 1.0);

  // Same draws, replayed: the estimate is the empirical rate distribution.
  Rng replay(21);
  std::vector<double> rates(1000);
  for (auto& r : rates) {
    const double h = model.direct[0].draw(replay);
    model.interference[0].draw(replay);
    r = rate(h, 1.0, 1.0);
  }
  std::sort(rates.begin(), rates.end());
  EXPECT_TRUE(std::equal(rates.begin(), rates.end(), cdf.support().begin()));
}

TEST(EstimateWeightCdf, EmptyQueueWithDebtIsDegenerate) {
  const auto model = ChannelModel::rayleigh_default(1);
  Rng rng(22);
  const auto cdf = estimate_weight_cdf(model, 0, 0.0, 3.0, 1.0, 1.0, 500, rng);
  EXPECT_TRUE(cdf.degenerate());
  EXPECT_EQ(cdf.prob_positive(), 0.0);
}

TEST(EstimateWeightCdf, KolmogorovDistanceToAnalyticRateCdf) {
  const auto model = ChannelModel::rayleigh_default(1);
  Rng rng(23);
  const auto cdf = estimate_weight_cdf(model, 0, 1.0, 0.0, 1.0, 1.0, 1000000, rng);
  const auto s = cdf.support();
  const auto n = static_cast<double>(s.size());
  double distance = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = oracle::rayleigh_rate_cdf(s[k], 2.0);
    distance = std::max({distance, std::abs(f - (k + 1) / n), std::abs(f - k / n)});
  }
  EXPECT_LT(distance, 0.01);
}

TEST(EstimateWeightCdf, RejectsBadArguments) {
  const auto model = ChannelModel::rayleigh_default(2);
  Rng rng(1);
  EXPECT_THROW(estimate_weight_cdf(model, 0, 1, 0, 1, 1, 0, rng), std::invalid_argument);
  EXPECT_THROW(estimate_weight_cdf(model, 2, 1, 0, 1, 1, 10, rng), std::out_of_range);
}

TEST(WeightSamplePool, ConditionalCdfMatchesSortedEstimateExactly) {
  for_all(300, 24, [](Gen& gen) {
    const GainSpec direct{GainDistribution::Exponential, gen.uniform(0.5, 3)};
    const GainSpec interference{GainDistribution::Exponential, gen.uniform(0.2, 2)};
    const WeightSamplePool pool(direct, interference, 1.0, 1.0, gen.size(1, 3000), gen.rng());
    for (int k = 0; k < 20; ++k) {
      const double q = gen.coin(0.1) ? 0.0 : gen.uniform(0, 300);
      const double z = gen.coin(0.2) ? 0.0 : gen.uniform(0, 50);
      const WeightCdf cdf = pool.cdf_at(q, z);
      const double w = gen.coin(0.3) && !cdf.degenerate()
                           ? cdf.support()[gen.size(0, cdf.support().size() - 1)]
                           : gen.uniform(-10, 1.2 * q * 3);
      std::size_t positive = 99;
      const double u = pool.conditional_cdf(q, z, w, positive);
      EXPECT_EQ(u, cdf.cdf(w)) << "q=" << q << " z=" << z << " w=" << w;
      EXPECT_EQ(positive, cdf.support().size());
      EXPECT_EQ(pool.conditional_cdf(q, z, w), u);
    }
  });
}

}  // namespace
}  // namespace d2d
