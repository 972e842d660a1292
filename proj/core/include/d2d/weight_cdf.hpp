#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "d2d/channel.hpp"

namespace d2d {

// Conditional CDF of a pair's weight given that the weight is positive,
// estimated from samples. The estimate is the continuous piecewise-linear
// interpolation through (0, 0) and (x_(k), k/n) for the sorted positive
// samples x_(1) <= ... <= x_(n), so quantile() is its exact inverse and
// quantile(U) with U uniform is distributed exactly as the estimate.
//
// A default-constructed (or all-nonpositive) estimate is degenerate:
// prob_positive() == 0 and the owning pair abstains from contention.
class WeightCdf {
 public:
  WeightCdf() = default;

  // Keeps the positive entries of an arbitrary weight sample.
  static WeightCdf from_samples(std::span<const double> weights);

  bool degenerate() const { return support_.empty(); }
  double prob_positive() const;
  std::size_t sample_count() const { return total_; }
  std::span<const double> support() const { return support_; }

  // 0 for x <= 0, 1 at and beyond the largest sample.
  double cdf(double x) const;
  // Inverse of cdf() on [0, 1].
  double quantile(double u) const;

 private:
  std::vector<double> support_;  // sorted positive samples
  std::size_t total_ = 0;
};

// Fixed pool of (rate, interference power) draws for one pair. Because the
// weight is Q*R - Z*P*g, every conditional weight CDF at any backlog state
// can be evaluated against the same draws.
class WeightSamplePool {
 public:
  WeightSamplePool() = default;
  WeightSamplePool(const GainSpec& direct, const GainSpec& interference, double power, double noise,
                   std::size_t samples, Rng& rng);

  std::size_t size() const { return rates_.size(); }
  std::span<const double> rates() const { return rates_; }
  std::span<const double> interference_powers() const { return interference_powers_; }

  WeightCdf cdf_at(double q, double z) const;

  // Equals cdf_at(q, z).cdf(w) bit for bit in a single pass without sorting.
  double conditional_cdf(double q, double z, double w) const;

  // As above; also reports how many pool weights are positive (0 means the
  // CDF at (q, z) is degenerate).
  double conditional_cdf(double q, double z, double w, std::size_t& positive) const;

 private:
  std::vector<double> rates_;
  std::vector<double> interference_powers_;
};

// Draws `samples` fresh channel realizations for `pair` and returns the
// empirical conditional CDF of W = Q ln(1 + P h / N0) - Z P g.
WeightCdf estimate_weight_cdf(const ChannelModel& channel, std::size_t pair, double q, double z,
                              double power, double noise, std::size_t samples, Rng& rng);

}  // namespace d2d
