#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "d2d/random.hpp"
#include "d2d/schedule.hpp"

namespace d2d {

// Single-round random contention with one slot of memory. Every pair hears
// every other pair.
struct IrdsState {
  std::vector<bool> prev;  // I_i(t-1)

  explicit IrdsState(std::size_t pairs = 0) : prev(pairs, false) {}
};

// Deterministic part of one IRDS slot given the drawn contention variables
// a_i and transmission variables p_i:
//   case 1  a_i wins alone, no other pair was on last slot, p_i = 1  -> 1
//   case 2  a_i did not win alone and p_i = 1                        -> I_i(t-1)
//   case 3  otherwise                                                -> 0
std::vector<bool> irds_decide(const std::vector<bool>& prev, const std::vector<bool>& a,
                              const std::vector<bool>& p);

// P(p_i = 1) = e^W / (e^W + 1), evaluated without overflow.
double irds_transmit_probability(double w);

struct IrdsOutcome {
  std::vector<bool> active;   // I_i(t)
  ScheduleDecision decision;  // first active pair, or IdleNoContender
};

// Draws a_1..a_N ~ Bernoulli(1/N), then p_1..p_N, and applies irds_decide.
// A pair with blocked[i] set (interference above nu) never transmits, as if
// p_i = 0. Updates state.prev.
IrdsOutcome irds_step(IrdsState& state, std::span<const double> weights, Rng& rng,
                      const std::vector<bool>& blocked = {});

}  // namespace d2d
