#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "d2d/config.hpp"
#include "d2d/irds.hpp"
#include "d2d/schedule.hpp"

namespace d2d {

struct NetworkState {
  std::vector<double> queues;  // Q_i
  double z = 0.0;              // virtual interference queue
  IrdsState irds;
  std::uint64_t slot = 0;

  explicit NetworkState(std::size_t pairs = 0) : queues(pairs, 0.0), irds(pairs) {}
};

struct TraceRow {
  std::uint64_t t = 0;
  std::vector<double> h, g, admitted;
  std::optional<std::size_t> winner;  // first transmitter; IRDS may have more
  ScheduleCause cause = ScheduleCause::IdleNoContender;
  std::vector<double> queues;  // Q(t+1)
  double z = 0.0;              // Z(t+1)
  double interference = 0.0;   // realized in slot t

  bool operator==(const TraceRow&) const = default;
};

// Long-run averages over the whole horizon (no warm-up).
struct Metrics {
  std::size_t pairs = 0;
  std::uint64_t horizon = 0;
  std::vector<double> x;       // admitted rate per pair
  std::vector<double> served;  // departed bits per slot per pair
  double utility_sum = 0.0;    // sum_i U(x_i)
  double admitted_sum = 0.0;
  double served_sum = 0.0;
  double mean_q = 0.0;  // time average of sum_i Q_i(t)
  double mean_z = 0.0;
  double avg_interference = 0.0;

  std::uint64_t scheduled_slots = 0;
  std::uint64_t idle_slots = 0;
  std::uint64_t collision_slots = 0;
  double scheduled_fraction = 0.0;
  double idle_fraction = 0.0;
  double collision_fraction = 0.0;

  std::optional<double> beta_hat;      // over slots with exactly one transmitter
  std::optional<double> weight_ratio;  // sum I*eff*W / sum max(0, max_i W_i)
  double w_max = 0.0;                  // linear-mapping cap in effect, 0 if unused

  std::vector<TraceRow> trace;

  bool operator==(const Metrics&) const = default;
};

// Linear-mapping cap estimated as the 99th percentile of V*R over the
// config's channel law (the weight of a pair whose backlog sits at V with an
// empty interference queue). Deterministic given the config seed.
double automatic_w_max(const SimConfig& config);

Metrics run_simulation(const SimConfig& config);

// Same run from a given starting state, advanced in place.
Metrics run_simulation(const SimConfig& config, NetworkState& state);

enum class SweepParameter { V, Gamma, N, M, Tau };

std::string_view to_string(SweepParameter p);
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name);

// Applies one sweep value to a copy of base. Throws ConfigError when the
// value does not fit the parameter or the result is invalid.
SimConfig apply_sweep_value(const SimConfig& base, SweepParameter parameter, double value);

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  bool valid = true;
  std::string error;  // why the row is invalid
  Metrics metrics;
};

// One independent run per value; run k uses seed derive_seed(base.seed, k).
// Rows come back in the order of `values` whatever `jobs` is.
std::vector<SweepRow> sweep(const SimConfig& base, SweepParameter parameter, std::span<const double> values,
                            std::size_t jobs = 1);

struct NoniidOptions {
  std::size_t runs = 10;
  std::pair<double, double> direct_range{1.2, 2.8};
  std::pair<double, double> interference_range{0.2, 1.8};
};

struct NoniidResult {
  Metrics average;
  std::vector<Metrics> runs;
  std::vector<std::vector<double>> direct_means;
  std::vector<std::vector<double>> interference_means;
};

// Run r draws per-pair means uniformly from the ranges (stream
// derive_seed(seed, r)) and simulates with seed + r, so a single run with
// point ranges at the default means reproduces run_simulation(config).
NoniidResult run_noniid(const SimConfig& config, const NoniidOptions& options, std::size_t jobs = 1);

// Field-wise mean of several runs over the same pair count. The trace is
// dropped; slot counts are summed.
Metrics average_metrics(std::span<const Metrics> runs);

}  // namespace d2d
