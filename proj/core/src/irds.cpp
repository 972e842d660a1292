#include "d2d/irds.hpp"

#include <cassert>
#include <cmath>

namespace d2d {

std::vector<bool> irds_decide(const std::vector<bool>& prev, const std::vector<bool>& a,
                              const std::vector<bool>& p) {
  const std::size_t n = prev.size();
  assert(a.size() == n && p.size() == n);
  std::size_t contenders = 0;
  std::size_t previously_on = 0;
  for (std::size_t i = 0; i < n; ++i) {
    contenders += a[i];
    previously_on += prev[i];
  }
  std::vector<bool> out(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const bool won_alone = a[i] && contenders == 1;
    const bool neighbours_quiet = previously_on - prev[i] == 0;
    if (won_alone && neighbours_quiet && p[i]) {
      out[i] = true;
    } else if (!won_alone && p[i]) {
      out[i] = prev[i];
    }
  }
  return out;
}

double irds_transmit_probability(double w) {
  if (w >= 0.0) return 1.0 / (1.0 + std::exp(-w));
  const double e = std::exp(w);
  return e / (1.0 + e);
}

IrdsOutcome irds_step(IrdsState& state, std::span<const double> weights, Rng& rng,
                      const std::vector<bool>& blocked) {
  const std::size_t n = weights.size();
  assert(state.prev.size() == n);
  assert(blocked.empty() || blocked.size() == n);
  const double contend = 1.0 / static_cast<double>(n);
  std::vector<bool> a(n), p(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = rng.bernoulli(contend);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = rng.bernoulli(irds_transmit_probability(weights[i])) && (blocked.empty() || !blocked[i]);
  }
  IrdsOutcome out;
  out.active = irds_decide(state.prev, a, p);
  out.decision = ScheduleDecision::idle(ScheduleCause::IdleNoContender);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.active[i]) {
      out.decision = ScheduleDecision::scheduled(i);
      break;
    }
  }
  state.prev = out.active;
  return out;
}

}  // namespace d2d
