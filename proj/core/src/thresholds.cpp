#include "d2d/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "d2d/control.hpp"

namespace d2d {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool succeeds(const ContentionTrial& t, const QuantileKnots& k) { return k.slot(t.top) != k.slot(t.runner_up); }

std::vector<double> random_knots(std::size_t minislots, Rng& rng) {
  std::vector<double> knots(minislots, 0.0);
  for (std::size_t m = 0; m + 1 < minislots; ++m) knots[m] = rng.uniform();
  std::sort(knots.begin(), knots.end(), std::greater<>());
  knots.back() = 0.0;
  return knots;
}

}  // namespace

QuantileKnots QuantileKnots::uniform(std::size_t minislots) {
  QuantileKnots out;
  out.knots.resize(minislots);
  const auto m = static_cast<double>(minislots);
  for (std::size_t k = 0; k < minislots; ++k) out.knots[k] = (m - static_cast<double>(k + 1)) / m;
  return out;
}

std::size_t QuantileKnots::slot(double u) const {
  // knots are descending; the slot is the first knot at or below u.
  const auto it = std::partition_point(knots.begin(), knots.end(), [u](double k) { return k > u; });
  return static_cast<std::size_t>(it - knots.begin()) + 1;
}

ThresholdProblem sample_threshold_problem(const ChannelModel& channel, std::span<const WeightCdf> cdfs,
                                          std::span<const double> q, double z, double power, double noise,
                                          std::size_t minislots, double tau, std::size_t rounds, Rng& rng) {
  const std::size_t n = channel.pairs();
  if (cdfs.size() != n || q.size() != n) throw std::invalid_argument("sample_threshold_problem: size mismatch");
  ThresholdProblem problem;
  problem.rounds = rounds;
  problem.minislots = minislots;
  problem.tau = tau;
  problem.trials.reserve(rounds);
  ChannelState state;
  for (std::size_t r = 0; r < rounds; ++r) {
    sample_channel(channel, rng, r, state);
    ContentionTrial trial{kNegInf, kNegInf, 0.0};
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = weight(q[i], rate(state.h[i], power, noise), z, power, state.g[i]);
      if (!(w > 0.0) || cdfs[i].degenerate()) continue;
      const double u = cdfs[i].cdf(w);
      any = true;
      if (u > trial.top) {
        trial.runner_up = trial.top;
        trial.top = u;
        trial.weight = w;
      } else if (u > trial.runner_up) {
        trial.runner_up = u;
      }
    }
    if (any) problem.trials.push_back(trial);
  }
  return problem;
}

double threshold_objective(const ThresholdProblem& problem, const QuantileKnots& knots) {
  if (problem.rounds == 0) return 0.0;
  double total = 0.0;
  for (const auto& t : problem.trials) {
    if (succeeds(t, knots)) total += t.weight;
  }
  const double overhead = static_cast<double>(problem.minislots) * problem.tau;
  return (1.0 - overhead) * total / static_cast<double>(problem.rounds);
}

KnotObjective::KnotObjective(std::span<const WeightCdf> cdfs, std::size_t minislots, double tau)
    : minislots_(minislots), overhead_(1.0 - static_cast<double>(minislots) * tau) {
  for (const WeightCdf& cdf : cdfs) {
    if (cdf.degenerate()) continue;
    Pair pair;
    pair.support.assign(cdf.support().begin(), cdf.support().end());
    pair.p = cdf.prob_positive();
    const auto n = static_cast<double>(pair.support.size());
    pair.cumulative.assign(pair.support.size() + 1, 0.0);
    double prev = 0.0;
    for (std::size_t k = 0; k < pair.support.size(); ++k) {
      pair.cumulative[k + 1] = pair.cumulative[k] + 0.5 * (prev + pair.support[k]) / n;
      prev = pair.support[k];
    }
    active_.push_back(std::move(pair));
  }
}

double KnotObjective::Pair::integral(double v) const {
  const std::size_t n = support.size();
  const double position = std::clamp(v, 0.0, 1.0) * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(position);
  if (k >= n) return cumulative[n];
  const double lower = k == 0 ? 0.0 : support[k - 1];
  const double s = position - static_cast<double>(k);
  return cumulative[k] + (lower * s + 0.5 * (support[k] - lower) * s * s) / static_cast<double>(n);
}

double KnotObjective::band(double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  // prod_{j != i} (1 - p_j + p_j lo) from prefix and suffix products.
  const std::size_t n = active_.size();
  std::vector<double> below(n + 1, 1.0);
  for (std::size_t i = n; i-- > 0;) below[i] = below[i + 1] * (1.0 - active_[i].p + active_[i].p * lo);
  double prefix = 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Pair& pair = active_[i];
    total += pair.p * (pair.integral(hi) - pair.integral(lo)) * prefix * below[i + 1];
    prefix *= 1.0 - pair.p + pair.p * lo;
  }
  return total;
}

double KnotObjective::operator()(const QuantileKnots& knots) const {
  double total = 0.0;
  double hi = 1.0;
  for (double u : knots.knots) {
    total += band(u, hi);
    hi = u;
  }
  return overhead_ * total;
}

double KnotObjective::best_position(const std::vector<double>& knots, std::size_t m) const {
  const double lo = knots[m + 1];
  const double hi = m == 0 ? 1.0 : knots[m - 1];
  const double current = knots[m];
  auto phi = [&](double x) { return band(x, hi) + band(lo, x); };
  if (!(hi > lo)) return current;

  constexpr int kGrid = 8;
  double grid[kGrid + 1];
  double value[kGrid + 1];
  int best = 0;
  for (int k = 0; k <= kGrid; ++k) {
    grid[k] = lo + (hi - lo) * k / kGrid;
    value[k] = phi(grid[k]);
    if (value[k] > value[best]) best = k;
  }
  // Golden section inside the grid cell pair around the best grid point.
  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, kGrid)];
  double best_x = grid[best];
  double best_v = value[best];
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 40 && b - a > 1e-12; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = phi(d);
    }
  }
  for (const auto& [x, v] : {std::pair{c, fc}, std::pair{d, fd}}) {
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double now = phi(current);
  return best_v > now + 1e-12 * std::abs(now) ? best_x : current;
}

QuantileKnots optimize_knots(const KnotObjective& objective, Rng& rng, const KnotSearchOptions& options) {
  const std::size_t minislots = objective.minislots();
  QuantileKnots best = QuantileKnots::uniform(minislots);
  if (minislots < 2 || objective.degenerate()) return best;
  if (options.initial.size() == minislots) best.knots = options.initial;

  double best_value = objective(best);
  const std::size_t starts = std::max<std::size_t>(options.restarts, 1);
  for (std::size_t start = 0; start < starts; ++start) {
    QuantileKnots candidate;
    candidate.knots = start == 0 ? best.knots : random_knots(minislots, rng);
    double value = objective(candidate);
    for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
      for (std::size_t m = 0; m + 1 < minislots; ++m) candidate.knots[m] = objective.best_position(candidate.knots, m);
      const double next = objective(candidate);
      const bool stalled = next <= value + 1e-10 * std::abs(value);
      value = next;
      if (stalled) break;
    }
    if (value > best_value) {
      best_value = value;
      best = std::move(candidate);
    }
  }
  return best;
}

OptimizedThresholds fit_thresholds(const ChannelModel& channel, std::span<const WeightCdf> cdfs,
                                   std::span<const double> q, double z, const SimConfig& config, Rng& rng,
                                   const KnotSearchOptions& options) {
  const KnotObjective objective(cdfs, config.minislots, config.tau);
  OptimizedThresholds out;
  out.knots = optimize_knots(objective, rng, options);
  const ThresholdProblem problem = sample_threshold_problem(channel, cdfs, q, z, config.power, config.noise,
                                                            config.minislots, config.tau,
                                                            config.threshold_samples, rng);
  out.objective = threshold_objective(problem, out.knots);
  out.uniform_objective = threshold_objective(problem, QuantileKnots::uniform(config.minislots));
  if (out.uniform_objective > out.objective) {
    out.knots = QuantileKnots::uniform(config.minislots);
    out.objective = out.uniform_objective;
  }
  out.maps.reserve(cdfs.size());
  for (const auto& cdf : cdfs) out.maps.push_back(ThresholdMap::from_quantiles(out.knots.knots, cdf));
  return out;
}

OptimizedThresholds optimize_thresholds(const ChannelModel& channel, std::span<const double> q, double z,
                                        const SimConfig& config, Rng& rng) {
  const std::size_t n = channel.pairs();
  std::vector<WeightCdf> cdfs;
  cdfs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cdfs.push_back(estimate_weight_cdf(channel, i, q[i], z, config.power, config.noise, config.cdf_samples, rng));
  }
  return fit_thresholds(channel, cdfs, q, z, config, rng);
}

}  // namespace d2d
