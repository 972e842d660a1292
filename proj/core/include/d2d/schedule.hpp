#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace d2d {

enum class ScheduleCause {
  Scheduled,
  IdleAllNegative,         // every weight below zero
  IdleCollision,           // two or more pairs won the same earliest mini-slot
  IdleNoContender,         // nobody contended (or IRDS scheduled nobody)
  IdleInstantaneousLimit,  // a nonnegative weight existed but its interference exceeded nu
};

std::string_view to_string(ScheduleCause cause);

struct ScheduleDecision {
  std::optional<std::size_t> winner;
  ScheduleCause cause = ScheduleCause::IdleNoContender;
  std::vector<std::size_t> contention_slots;  // CADS only, one entry per pair, 1-based
  double effective_fraction = 1.0;            // share of the slot left for data

  static ScheduleDecision idle(ScheduleCause cause) { return {std::nullopt, cause, {}, 1.0}; }
  static ScheduleDecision scheduled(std::size_t pair, double fraction = 1.0) {
    return {pair, ScheduleCause::Scheduled, {}, fraction};
  }
};

}  // namespace d2d
