#include "d2d/cads.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace d2d {

std::size_t quantile_to_slot(double u, std::size_t minislots) {
  const auto m = static_cast<double>(minislots);
  const double band = std::floor(std::clamp(u, 0.0, 1.0) * m);
  return static_cast<std::size_t>(std::clamp(m - band, 1.0, m));
}

std::size_t map_uniform(double w, const WeightCdf& cdf, std::size_t minislots) {
  if (w < 0.0 || cdf.degenerate()) return minislots + 1;
  return quantile_to_slot(cdf.cdf(w), minislots);
}

std::size_t map_linear(double w, double w_max, std::size_t minislots) {
  if (w < 0.0) return minislots + 1;
  const auto m = static_cast<double>(minislots);
  const double band = std::floor(w * m / w_max);
  return static_cast<std::size_t>(std::clamp(m - band, 1.0, m));
}

bool ThresholdMap::valid() const {
  if (thresholds.empty()) return false;
  for (std::size_t m = 1; m < thresholds.size(); ++m) {
    if (thresholds[m] > thresholds[m - 1]) return false;
  }
  return std::none_of(thresholds.begin(), thresholds.end(), [](double a) { return std::isnan(a); });
}

ThresholdMap ThresholdMap::from_quantiles(std::span<const double> knots, const WeightCdf& cdf) {
  ThresholdMap map;
  map.thresholds.reserve(knots.size());
  for (double u : knots) {
    // A degenerate CDF has no positive support; every pair of it abstains.
    map.thresholds.push_back(cdf.degenerate() ? std::numeric_limits<double>::infinity() : cdf.quantile(u));
  }
  return map;
}

std::size_t map_threshold(double w, const ThresholdMap& map) {
  const std::size_t m = map.minislots();
  if (w < 0.0) return m + 1;
  // First slot whose threshold is at or below w.
  const auto it = std::find_if(map.thresholds.begin(), map.thresholds.end(), [w](double a) { return a <= w; });
  return static_cast<std::size_t>(it - map.thresholds.begin()) + 1;
}

ScheduleDecision cads_contend(std::span<const std::size_t> slots, std::size_t minislots, double tau) {
  ScheduleDecision decision;
  decision.contention_slots.assign(slots.begin(), slots.end());
  std::size_t earliest = minislots + 1;
  std::size_t holders = 0;
  std::size_t holder = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const std::size_t s = slots[i];
    if (s > minislots) continue;
    if (s < earliest) {
      earliest = s;
      holders = 1;
      holder = i;
    } else if (s == earliest) {
      ++holders;
    }
  }
  if (holders == 0) {
    decision.cause = ScheduleCause::IdleNoContender;
  } else if (holders > 1) {
    decision.cause = ScheduleCause::IdleCollision;
  } else {
    decision.winner = holder;
    decision.cause = ScheduleCause::Scheduled;
    decision.effective_fraction = 1.0 - static_cast<double>(minislots) * tau;
  }
  return decision;
}

std::optional<double> estimate_beta(std::span<const ContentionSample> trace) {
  double winner = 0.0;
  double best = 0.0;
  bool any = false;
  for (const auto& s : trace) {
    if (!s.success) continue;
    any = true;
    winner += s.winner_weight;
    best += s.max_weight;
  }
  if (!any) return std::nullopt;
  if (!(best > 0.0)) return 0.0;
  return std::clamp(1.0 - winner / best, 0.0, 1.0);
}

}  // namespace d2d
