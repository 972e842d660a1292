#include "d2d/config.hpp"

#include <cmath>

namespace d2d {

std::string_view to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::Centralized: return "centralized";
    case SchedulerKind::CadsUniform: return "cads-uniform";
    case SchedulerKind::CadsLinear: return "cads-linear";
    case SchedulerKind::CadsOptimal: return "cads-optimal";
    case SchedulerKind::Irds: return "irds";
  }
  return "unknown";
}

std::string_view to_string(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::Log: return "log";
  }
  return "unknown";
}

std::optional<SchedulerKind> parse_scheduler(std::string_view name) {
  for (auto kind : {SchedulerKind::Centralized, SchedulerKind::CadsUniform, SchedulerKind::CadsLinear,
                    SchedulerKind::CadsOptimal, SchedulerKind::Irds}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::optional<UtilityKind> parse_utility(std::string_view name) {
  if (name == "log") return UtilityKind::Log;
  return std::nullopt;
}

void SimConfig::validate() const {
  if (n_pairs < 1) throw ConfigError("N", "must be at least 1");
  if (!(power > 0.0) || !std::isfinite(power)) throw ConfigError("P", "must be positive and finite");
  if (!(noise > 0.0) || !std::isfinite(noise)) throw ConfigError("N0", "must be positive and finite");
  if (!(gamma >= 0.0)) throw ConfigError("gamma", "must be nonnegative");
  if (!(nu > 0.0)) throw ConfigError("nu", "must be positive");
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("V", "must be positive and finite");
  if (!(a_max > 0.0) || !std::isfinite(a_max)) throw ConfigError("A_max", "must be positive and finite");
  if (minislots < 1) throw ConfigError("M", "must be at least 1");
  const double overhead = static_cast<double>(minislots) * tau;
  if (!(tau > 0.0) || !(overhead > 0.0 && overhead < 1.0)) {
    throw ConfigError(tau > 0.0 ? "M" : "tau", "contention overhead M*tau must lie in (0, 1)");
  }
  if (!(w_max >= 0.0) || !std::isfinite(w_max)) throw ConfigError("W_max", "must be nonnegative (0 = automatic)");
  if (cdf_samples < 1) throw ConfigError("cdf_samples", "must be at least 1");
  if (threshold_refresh < 1) throw ConfigError("threshold_refresh", "must be at least 1");
  if (threshold_samples < 1) throw ConfigError("threshold_samples", "must be at least 1");

  const bool point = channel == GainDistribution::PointMass;
  auto check_mean = [point](double m, const char* key) {
    if (!std::isfinite(m) || (point ? m < 0.0 : !(m > 0.0))) throw ConfigError(key, "invalid gain mean");
  };
  check_mean(direct_mean, "direct_mean");
  check_mean(interference_mean, "interference_mean");
  if (!direct_means.empty() && direct_means.size() != n_pairs) {
    throw ConfigError("direct_means", "needs exactly N entries");
  }
  if (!interference_means.empty() && interference_means.size() != n_pairs) {
    throw ConfigError("interference_means", "needs exactly N entries");
  }
  for (double m : direct_means) check_mean(m, "direct_means");
  for (double m : interference_means) check_mean(m, "interference_means");
}

ChannelModel SimConfig::channel_model() const {
  ChannelModel model;
  model.direct.resize(n_pairs);
  model.interference.resize(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    model.direct[i] = {channel, direct_means.empty() ? direct_mean : direct_means[i]};
    model.interference[i] = {channel, interference_means.empty() ? interference_mean : interference_means[i]};
  }
  return model;
}

}  // namespace d2d
