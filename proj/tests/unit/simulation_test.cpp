#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "d2d/control.hpp"
#include "d2d/simulation.hpp"
#include "gen.hpp"

namespace d2d {
namespace {

using test::for_all;
using test::Gen;

SimConfig small_config(SchedulerKind kind, std::uint64_t horizon = 3000) {
  SimConfig c;
  c.n_pairs = 4;
  c.minislots = 20;
  c.tau = 1e-3;
  c.horizon = horizon;
  c.scheduler = kind;
  c.cdf_samples = 300;
  c.threshold_samples = 500;
  c.threshold_refresh = 500;
  return c;
}

const SchedulerKind kAllKinds[] = {SchedulerKind::Centralized, SchedulerKind::CadsUniform,
                                   SchedulerKind::CadsLinear, SchedulerKind::CadsOptimal, SchedulerKind::Irds};

TEST(Simulation, ZeroHorizonIsEmpty) {
  SimConfig c = small_config(SchedulerKind::Centralized, 0);
  const auto m = run_simulation(c);
  EXPECT_EQ(m.horizon, 0u);
  EXPECT_EQ(m.x, std::vector<double>(4, 0.0));
  EXPECT_EQ(m.scheduled_slots + m.idle_slots + m.collision_slots, 0u);
  EXPECT_FALSE(m.beta_hat);
  EXPECT_FALSE(m.weight_ratio);
}

TEST(Simulation, SinglePairWithFixedGainsMatchesScalarRecursion) {
  SimConfig c;
  c.n_pairs = 1;
  c.channel = GainDistribution::PointMass;
  c.direct_mean = 2.0;
  c.interference_mean = 0.5;
  c.gamma = 0.2;
  c.horizon = 400000;

  // Hand-rolled recursion: the lone pair transmits whenever its weight is nonnegative.
  const double r = std::log(3.0);
  const UtilityFn u{UtilityKind::Log};
  double q = 0.0, z = 0.0, admitted = 0.0, served = 0.0, interference = 0.0;
  for (std::uint64_t t = 0; t < c.horizon; ++t) {
    const double a = flow_control(q, c.v, u, c.a_max);
    const bool on = q * r - z * 0.5 >= 0.0;
    const double s = on ? r : 0.0;
    served += std::min(q, s);
    interference += on ? 0.5 : 0.0;
    q = std::max(q - s, 0.0) + a;
    z = std::max(z - c.gamma + (on ? 0.5 : 0.0), 0.0);
    admitted += a;
  }
  const auto m = run_simulation(c);
  const double h = static_cast<double>(c.horizon);
  EXPECT_NEAR(m.x[0], admitted / h, 1e-12);
  EXPECT_NEAR(m.served[0], served / h, 1e-12);
  EXPECT_NEAR(m.avg_interference, interference / h, 1e-12);
  // The interference budget caps the on-fraction at gamma / (P g).
  EXPECT_NEAR(m.avg_interference, c.gamma, 0.02 * c.gamma);
  EXPECT_NEAR(m.x[0], 0.4 * r, 0.02 * r);
}

TEST(Simulation, DeterministicForEveryScheduler) {
  for (auto kind : kAllKinds) {
    SimConfig c = small_config(kind);
    c.record_trace = true;
    EXPECT_EQ(run_simulation(c), run_simulation(c)) << to_string(kind);
  }
}

TEST(Simulation, SlotFractionsAndInvariants) {
  for (auto kind : kAllKinds) {
    SimConfig c = small_config(kind);
    c.record_trace = true;
    const auto m = run_simulation(c);
    EXPECT_EQ(m.scheduled_slots + m.idle_slots + m.collision_slots, c.horizon) << to_string(kind);
    EXPECT_NEAR(m.scheduled_fraction + m.idle_fraction + m.collision_fraction, 1.0, 1e-12);
    for (double x : m.x) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, c.a_max);
    }
    if (kind != SchedulerKind::Irds) {
      ASSERT_TRUE(m.beta_hat);
      EXPECT_GE(*m.beta_hat, 0.0);
      EXPECT_LE(*m.beta_hat, 1.0);
    }
    if (kind != SchedulerKind::CadsUniform && kind != SchedulerKind::CadsLinear &&
        kind != SchedulerKind::CadsOptimal) {
      EXPECT_EQ(m.collision_slots, 0u);
    }
    ASSERT_EQ(m.trace.size(), c.horizon);
    // Queue bookkeeping: Q(t+1) = [Q(t) - eff R]^+ + A(t).
    const double eff = kind == SchedulerKind::Centralized || kind == SchedulerKind::Irds
                           ? 1.0
                           : 1.0 - static_cast<double>(c.minislots) * c.tau;
    std::vector<double> q(c.n_pairs, 0.0);
    double z = 0.0;
    for (const auto& row : m.trace) {
      double interference = 0.0;
      for (std::size_t i = 0; i < c.n_pairs; ++i) {
        const bool on = row.winner && *row.winner == i;
        const double s = on ? eff * rate(row.h[i], c.power, c.noise) : 0.0;
        interference += on ? eff * c.power * row.g[i] : 0.0;
        ASSERT_NEAR(row.queues[i], std::max(q[i] - s, 0.0) + row.admitted[i], 1e-9 * (1 + q[i]));
        q[i] = row.queues[i];
      }
      ASSERT_NEAR(row.interference, interference, 1e-12);
      ASSERT_NEAR(row.z, std::max(z - c.gamma + interference, 0.0), 1e-9 * (1 + z));
      z = row.z;
    }
  }
}

TEST(Simulation, InstantaneousLimitIsNeverViolated) {
  for (auto kind : kAllKinds) {
    SimConfig c = small_config(kind);
    c.nu = 0.7;
    c.record_trace = true;
    const auto m = run_simulation(c);
    for (const auto& row : m.trace) {
      if (row.winner) {
        ASSERT_LE(c.power * row.g[*row.winner], c.nu) << to_string(kind);
      }
    }
  }
}

TEST(Simulation, ContinuesFromGivenState) {
  SimConfig c = small_config(SchedulerKind::Centralized, 2000);
  NetworkState state(4);
  run_simulation(c, state);
  EXPECT_EQ(state.slot, 2000u);
  EXPECT_GT(std::accumulate(state.queues.begin(), state.queues.end(), 0.0), 0.0);
  NetworkState wrong(3);
  EXPECT_THROW(run_simulation(c, wrong), std::invalid_argument);
}

TEST(Simulation, AutomaticWmaxIsDeterministicAndPositive) {
  SimConfig c = small_config(SchedulerKind::CadsLinear);
  const double w = automatic_w_max(c);
  EXPECT_GT(w, 0.0);
  EXPECT_EQ(w, automatic_w_max(c));
  EXPECT_EQ(run_simulation(c).w_max, w);
  c.w_max = 123.0;
  EXPECT_EQ(run_simulation(c).w_max, 123.0);
}

TEST(Sweep, RowsKeepOrderSeedsAndThreadInvariance) {
  SimConfig c = small_config(SchedulerKind::CadsUniform, 800);
  const std::vector<double> values{50, 100, 200, 400};
  const auto one = sweep(c, SweepParameter::V, values, 1);
  const auto three = sweep(c, SweepParameter::V, values, 3);
  ASSERT_EQ(one.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(one[k].value, values[k]);
    EXPECT_EQ(one[k].seed, derive_seed(c.seed, k));
    EXPECT_TRUE(one[k].valid);
    EXPECT_EQ(one[k].metrics, three[k].metrics);
    SimConfig alone = c;
    alone.v = values[k];
    alone.seed = derive_seed(c.seed, k);
    EXPECT_EQ(one[k].metrics, run_simulation(alone));
  }
}

TEST(Sweep, InvalidValuesBecomeInvalidRows) {
  SimConfig c = small_config(SchedulerKind::Centralized, 100);
  const std::vector<double> values{10, 2.5, 0};
  const auto rows = sweep(c, SweepParameter::N, values);
  EXPECT_TRUE(rows[0].valid);
  EXPECT_EQ(rows[0].metrics.pairs, 10u);
  EXPECT_FALSE(rows[1].valid);
  EXPECT_FALSE(rows[2].valid);
  EXPECT_NE(rows[1].error.find("N"), std::string::npos);

  const std::vector<double> taus{1e-3, 0.05};  // M tau = 1 for the second
  const auto tau_rows = sweep(c, SweepParameter::Tau, taus);
  EXPECT_TRUE(tau_rows[0].valid);
  EXPECT_FALSE(tau_rows[1].valid);
  EXPECT_THROW(sweep(c, SweepParameter::V, std::vector<double>{}), std::invalid_argument);
}

TEST(SweepParameter, NamesRoundTrip) {
  for (auto p : {SweepParameter::V, SweepParameter::Gamma, SweepParameter::N, SweepParameter::M,
                 SweepParameter::Tau}) {
    EXPECT_EQ(parse_sweep_parameter(to_string(p)), p);
  }
  EXPECT_FALSE(parse_sweep_parameter("v"));
}

TEST(Noniid, PointRangesAtDefaultMeansReproduceIidRun) {
  SimConfig c = small_config(SchedulerKind::Centralized, 1500);
  NoniidOptions o;
  o.runs = 1;
  o.direct_range = {c.direct_mean, c.direct_mean};
  o.interference_range = {c.interference_mean, c.interference_mean};
  const auto r = run_noniid(c, o);
  EXPECT_EQ(r.runs[0], run_simulation(c));
  EXPECT_EQ(r.average.x, r.runs[0].x);
}

TEST(Noniid, MeansStayInRangeAndRunsAreIndependentOfJobs) {
  SimConfig c = small_config(SchedulerKind::Centralized, 500);
  NoniidOptions o;
  o.runs = 4;
  const auto one = run_noniid(c, o, 1);
  const auto two = run_noniid(c, o, 2);
  ASSERT_EQ(one.runs.size(), 4u);
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(one.runs[r], two.runs[r]);
    for (double d : one.direct_means[r]) {
      EXPECT_GE(d, 1.2);
      EXPECT_LE(d, 2.8);
    }
    for (double g : one.interference_means[r]) {
      EXPECT_GE(g, 0.2);
      EXPECT_LE(g, 1.8);
    }
  }
  EXPECT_NE(one.direct_means[0], one.direct_means[1]);
  o.direct_range = {2.0, 1.0};
  EXPECT_THROW(run_noniid(c, o), ConfigError);
}

TEST(AverageMetrics, FieldwiseMean) {
  for_all(100, 70, [](Gen& gen) {
    const std::size_t n = gen.size(1, 5), k = gen.size(1, 6);
    std::vector<Metrics> runs(k);
    for (auto& m : runs) {
      m.pairs = n;
      m.x = gen.vector(n, 0, 10);
      m.served = gen.vector(n, 0, 10);
      m.utility_sum = gen.uniform(-5, 5);
      m.idle_slots = gen.size(0, 100);
      if (gen.coin()) m.beta_hat = gen.uniform(0, 1);
      m.trace.resize(2);
    }
    const auto avg = average_metrics(runs);
    double u = 0.0, beta = 0.0, count = 0.0;
    std::uint64_t idle = 0;
    for (const auto& m : runs) {
      u += m.utility_sum;
      idle += m.idle_slots;
      if (m.beta_hat) {
        beta += *m.beta_hat;
        count += 1;
      }
    }
    EXPECT_NEAR(avg.utility_sum, u / k, 1e-12);
    EXPECT_EQ(avg.idle_slots, idle);
    EXPECT_EQ(avg.beta_hat.has_value(), count > 0);
    if (count > 0) {
      EXPECT_NEAR(*avg.beta_hat, beta / count, 1e-12);
    }
    EXPECT_TRUE(avg.trace.empty());
    for (std::size_t i = 0; i < n; ++i) {
      double x = 0.0;
      for (const auto& m : runs) x += m.x[i];
      EXPECT_NEAR(avg.x[i], x / k, 1e-12);
    }
  });
  std::vector<Metrics> mixed(2);
  mixed[0].pairs = 1;
  mixed[0].x = mixed[0].served = {0.0};
  mixed[1].pairs = 2;
  mixed[1].x = mixed[1].served = {0.0, 0.0};
  EXPECT_THROW(average_metrics(mixed), std::invalid_argument);
}

}  // namespace
}  // namespace d2d
