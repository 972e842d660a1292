#include "d2d/centralized.hpp"

#include <cassert>

namespace d2d {

std::string_view to_string(ScheduleCause cause) {
  switch (cause) {
    case ScheduleCause::Scheduled: return "scheduled";
    case ScheduleCause::IdleAllNegative: return "idle-all-negative";
    case ScheduleCause::IdleCollision: return "idle-collision";
    case ScheduleCause::IdleNoContender: return "idle-no-contender";
    case ScheduleCause::IdleInstantaneousLimit: return "idle-instantaneous-limit";
  }
  return "unknown";
}

ScheduleDecision centralized_schedule(std::span<const double> weights, std::span<const double> g,
                                      double power, double nu) {
  assert(weights.size() == g.size());
  std::optional<std::size_t> best;
  bool any_nonnegative = false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) continue;
    any_nonnegative = true;
    if (power * g[i] > nu) continue;
    if (!best || weights[i] > weights[*best]) best = i;
  }
  if (best) return ScheduleDecision::scheduled(*best);
  return ScheduleDecision::idle(any_nonnegative ? ScheduleCause::IdleInstantaneousLimit
                                                : ScheduleCause::IdleAllNegative);
}

}  // namespace d2d
