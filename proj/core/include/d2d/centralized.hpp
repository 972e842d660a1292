#pragma once

#include <span>

#include "d2d/schedule.hpp"

namespace d2d {

// Max-weight scheduler with global knowledge. Picks the largest weight among
// pairs with w >= 0 and P*g <= nu; ties go to the lowest index.
ScheduleDecision centralized_schedule(std::span<const double> weights, std::span<const double> g,
                                      double power, double nu);

}  // namespace d2d
