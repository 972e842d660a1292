#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "d2d/schedule.hpp"
#include "d2d/weight_cdf.hpp"

namespace d2d {

// Channel-aware distributed scheduling: each pair maps its own weight to a
// mini-slot index in {1..M}, or M+1 to abstain; the earliest unique
// contender wins and a tie in the earliest mini-slot idles the whole slot.
//
// All mappings send larger weights to earlier mini-slots.

// Slot from the quantile of the weight under the pair's conditional CDF:
// slot m covers the quantile band [(M-m)/M, (M-m+1)/M), so a positive weight
// drawn from `cdf` lands in every slot with probability 1/M.
std::size_t map_uniform(double w, const WeightCdf& cdf, std::size_t minislots);

// Same banding applied to an already computed quantile u in [0, 1].
std::size_t quantile_to_slot(double u, std::size_t minislots);

// Slot m covers [(M-m) w_max / M, (M-m+1) w_max / M); weights at or above
// w_max clamp to slot 1.
std::size_t map_linear(double w, double w_max, std::size_t minislots);

// Descending weight thresholds a_1 >= ... >= a_M. Slot m iff
// a_m <= W < a_{m-1} with a_0 = +inf. Negative weights, and weights below a_M,
// abstain with M+1.
struct ThresholdMap {
  std::vector<double> thresholds;

  std::size_t minislots() const { return thresholds.size(); }
  bool valid() const;

  // Threshold a_m = cdf.quantile(u_m) for descending quantile knots u_m.
  static ThresholdMap from_quantiles(std::span<const double> knots, const WeightCdf& cdf);
};

std::size_t map_threshold(double w, const ThresholdMap& map);

// Resolves one contention round. slots holds one 1-based entry per pair.
ScheduleDecision cads_contend(std::span<const std::size_t> slots, std::size_t minislots, double tau);

struct ContentionSample {
  double winner_weight = 0.0;
  double max_weight = 0.0;
  bool success = false;
};

// Imperfect-scheduling loss 1 - sum(winner)/sum(max) over successful rounds,
// clamped to [0, 1]. Empty when no round succeeded.
std::optional<double> estimate_beta(std::span<const ContentionSample> trace);

}  // namespace d2d
