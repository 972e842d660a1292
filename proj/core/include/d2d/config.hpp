#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "d2d/channel.hpp"

namespace d2d {

enum class SchedulerKind { Centralized, CadsUniform, CadsLinear, CadsOptimal, Irds };
enum class UtilityKind { Log };

std::string_view to_string(SchedulerKind kind);
std::string_view to_string(UtilityKind kind);
std::optional<SchedulerKind> parse_scheduler(std::string_view name);
std::optional<UtilityKind> parse_utility(std::string_view name);

// Rejected configuration. key() names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct SimConfig {
  std::size_t n_pairs = 10;
  double power = 1.0;            // P, normalized transmit power
  double noise = 1.0;            // N0
  double gamma = 1.0;            // average interference limit
  double nu = kInfinity;         // instantaneous interference limit
  double v = 200.0;              // flow-control weight
  double a_max = 10.0;           // max admitted bits per slot
  std::size_t minislots = 200;   // M
  double tau = 1e-4;             // mini-slot / slot duration ratio
  std::uint64_t horizon = 100000;
  std::uint64_t seed = 1;
  SchedulerKind scheduler = SchedulerKind::Centralized;
  UtilityKind utility = UtilityKind::Log;
  double w_max = 0.0;            // linear-mapping cap; 0 selects the automatic estimate
  std::size_t cdf_samples = 2000;

  GainDistribution channel = GainDistribution::Exponential;
  double direct_mean = 2.0;
  double interference_mean = 1.0;
  // Optional per-pair overrides; empty means every pair uses the scalar mean.
  std::vector<double> direct_means;
  std::vector<double> interference_means;

  // Optimal-mapping threshold search.
  std::uint64_t threshold_refresh = 1000;  // slots between re-optimizations
  std::size_t threshold_samples = 10000;   // contention trials per optimization

  bool record_trace = false;

  // Throws ConfigError naming the first violated field.
  void validate() const;

  ChannelModel channel_model() const;

  bool operator==(const SimConfig&) const = default;
};

}  // namespace d2d
