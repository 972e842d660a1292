#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "d2d/cads.hpp"
#include "d2d/config.hpp"

namespace d2d {

// Mini-slot thresholds expressed as quantiles of each pair's conditional
// weight CDF, shared by all pairs: u_1 >= u_2 >= ... >= u_M = 0. A positive
// weight with quantile u contends in the first slot m with u >= u_m. Uniform
// mapping is the special case u_m = (M - m) / M.
struct QuantileKnots {
  std::vector<double> knots;

  static QuantileKnots uniform(std::size_t minislots);

  std::size_t minislots() const { return knots.size(); }
  std::size_t slot(double u) const;
};

// One synthetic contention round reduced to what decides its outcome: the
// highest quantile among positive-weight pairs (that pair always holds the
// earliest slot), the runner-up quantile (-inf when it contended alone), and
// the weight of the top pair. The round succeeds iff some knot x satisfies
// runner_up < x <= top.
struct ContentionTrial {
  double top = 0.0;
  double runner_up = 0.0;
  double weight = 0.0;
};

struct ThresholdProblem {
  std::vector<ContentionTrial> trials;  // rounds with no positive weight are dropped
  std::size_t rounds = 0;               // all rounds drawn, including dropped ones
  std::size_t minislots = 1;
  double tau = 0.0;
};

// Draws `rounds` iid channel realizations, forms every pair's weight at the
// given backlogs and maps it through that pair's CDF.
ThresholdProblem sample_threshold_problem(const ChannelModel& channel, std::span<const WeightCdf> cdfs,
                                          std::span<const double> q, double z, double power, double noise,
                                          std::size_t minislots, double tau, std::size_t rounds, Rng& rng);

// Monte Carlo estimate of E[W_winner 1{success}] (1 - M tau).
double threshold_objective(const ThresholdProblem& problem, const QuantileKnots& knots);

// Expected success-weighted winner weight for a set of knots, computed from
// the pairs' conditional CDFs rather than sampled rounds. Under its own CDF a
// pair's quantile is uniform, so with independent pairs
//   J = (1 - M tau) sum_m sum_i p_i [G_i(u_{m-1}) - G_i(u_m)] prod_{j != i} (1 - p_j + p_j u_m)
// where p_i = P(W_i > 0), G_i(v) is the integral of the quantile function up
// to v, and u_0 = 1.
class KnotObjective {
 public:
  KnotObjective(std::span<const WeightCdf> cdfs, std::size_t minislots, double tau);

  double operator()(const QuantileKnots& knots) const;

  // Best position of knot m (0-based, m < M-1) in [knots[m+1], knots[m-1]],
  // holding the others fixed.
  double best_position(const std::vector<double>& knots, std::size_t m) const;

  std::size_t minislots() const { return minislots_; }
  bool degenerate() const { return active_.empty(); }

 private:
  struct Pair {
    std::vector<double> support;  // sorted positive samples
    std::vector<double> cumulative;  // G at k/n
    double p = 0.0;
    double integral(double v) const;
  };

  // Contribution of band [lo, hi) whose winners beat everyone below lo.
  double band(double lo, double hi) const;

  std::vector<Pair> active_;
  std::size_t minislots_;
  double overhead_;
};

struct KnotSearchOptions {
  std::size_t restarts = 3;  // the first start is `initial`, else the uniform mapping
  std::size_t max_sweeps = 200;
  std::vector<double> initial;  // warm start; ignored unless it has M knots
};

// Coordinate ascent over the free knots u_1..u_{M-1}. Each step maximizes J
// over the interval between the neighbouring knots (coarse grid, then golden
// section), so a sweep never lowers J.
QuantileKnots optimize_knots(const KnotObjective& objective, Rng& rng, const KnotSearchOptions& options = {});

struct OptimizedThresholds {
  QuantileKnots knots;
  std::vector<ThresholdMap> maps;  // per-pair weight thresholds
  double objective = 0.0;          // sampled-round score of knots
  double uniform_objective = 0.0;  // same rounds, uniform knots
};

// Searches knots for the given conditional CDFs, then scores the result and
// the uniform knots on config.threshold_samples sampled contention rounds
// and keeps whichever scores higher there.
OptimizedThresholds fit_thresholds(const ChannelModel& channel, std::span<const WeightCdf> cdfs,
                                   std::span<const double> q, double z, const SimConfig& config, Rng& rng,
                                   const KnotSearchOptions& options = {});

// Optimal-weight mapping for the current backlogs: estimates each pair's
// conditional CDF from config.cdf_samples fresh draws, then fit_thresholds.
// When every pair's CDF is degenerate the maps abstain everywhere.
OptimizedThresholds optimize_thresholds(const ChannelModel& channel, std::span<const double> q, double z,
                                        const SimConfig& config, Rng& rng);

}  // namespace d2d
