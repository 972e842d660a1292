#include "d2d/control.hpp"

#include <algorithm>
#include <cmath>

namespace d2d {

double rate(double h, double power, double noise) {
  return std::log1p(power * h / noise);
}

double weight(double q, double r, double z, double power, double g) {
  return q * r - z * power * g;
}

double UtilityFn::operator()(double x) const {
  switch (kind) {
    case UtilityKind::Log:
      return std::log1p(x);
  }
  return 0.0;
}

double flow_control(double q, double v, const UtilityFn& utility, double a_max) {
  switch (utility.kind) {
    case UtilityKind::Log:
      // Stationary point of v*ln(1+x) - q*x is x = v/q - 1.
      if (q <= 0.0) return a_max;
      return std::clamp(v / q - 1.0, 0.0, a_max);
  }
  return 0.0;
}

double update_real_queue(double q, double served, double arrived) {
  return std::max(q - served, 0.0) + arrived;
}

double update_virtual_queue(double z, double gamma, double interference) {
  return std::max(z - gamma + interference, 0.0);
}

}  // namespace d2d
