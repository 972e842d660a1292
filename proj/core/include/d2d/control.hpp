#pragma once

#include "d2d/config.hpp"

namespace d2d {

// Shannon rate in nats per slot, ln(1 + P h / N0).
double rate(double h, double power, double noise);

// Max-weight score of one pair: backlog-weighted rate minus the
// interference debt priced at the pair's interference power.
//   W = Q R - Z P g
double weight(double q, double r, double z, double power, double g);

struct UtilityFn {
  UtilityKind kind = UtilityKind::Log;

  double operator()(double x) const;
};

// argmax over x in [0, a_max] of v*U(x) - q*x. An empty queue admits a_max.
double flow_control(double q, double v, const UtilityFn& utility, double a_max);

// Q' = [Q - served]^+ + arrived
double update_real_queue(double q, double served, double arrived);

// Z' = [Z - gamma + interference]^+
double update_virtual_queue(double z, double gamma, double interference);

}  // namespace d2d
