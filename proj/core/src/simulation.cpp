#include "d2d/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "d2d/cads.hpp"
#include "d2d/centralized.hpp"
#include "d2d/control.hpp"
#include "d2d/thresholds.hpp"
#include "d2d/weight_cdf.hpp"

namespace d2d {

namespace {

constexpr std::size_t kWarmSweeps = 20;

// Child streams of the config seed. The main stream (the seed itself) only
// feeds channel draws and IRDS coins, so adding CDF pools or threshold
// searches never shifts the channel sequence.
constexpr std::uint64_t kAuxStream = 0x5eed0001;
constexpr std::uint64_t kWmaxStream = 0x5eed0002;
constexpr std::size_t kWmaxSamples = 100000;

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) body(i);
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < jobs; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
}

}  // namespace

double automatic_w_max(const SimConfig& config) {
  const ChannelModel model = config.channel_model();
  Rng rng(derive_seed(config.seed, kWmaxStream));
  std::vector<double> w(kWmaxSamples);
  for (std::size_t k = 0; k < kWmaxSamples; ++k) {
    const double h = model.direct[k % model.pairs()].draw(rng);
    w[k] = config.v * rate(h, config.power, config.noise);
  }
  const auto at = w.begin() + static_cast<std::ptrdiff_t>(kWmaxSamples * 99 / 100);
  std::nth_element(w.begin(), at, w.end());
  // A point-mass zero gain would leave no positive cap; fall back to V.
  return *at > 0.0 ? *at : config.v;
}

Metrics run_simulation(const SimConfig& config) {
  NetworkState state(config.n_pairs);
  return run_simulation(config, state);
}

Metrics run_simulation(const SimConfig& config, NetworkState& state) {
  config.validate();
  const std::size_t n = config.n_pairs;
  if (state.queues.size() != n || state.irds.prev.size() != n) {
    throw std::invalid_argument("run_simulation: state does not match N");
  }
  const ChannelModel model = config.channel_model();
  const UtilityFn utility{config.utility};
  const std::size_t m_slots = config.minislots;
  const double power = config.power;

  Rng rng(config.seed);
  Rng aux(derive_seed(config.seed, kAuxStream));

  Metrics metrics;
  metrics.pairs = n;
  metrics.horizon = config.horizon;
  metrics.x.assign(n, 0.0);
  metrics.served.assign(n, 0.0);

  const SchedulerKind kind = config.scheduler;
  std::vector<WeightSamplePool> pools;
  if (kind == SchedulerKind::CadsUniform || kind == SchedulerKind::CadsOptimal) {
    pools.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      pools.emplace_back(model.direct[i], model.interference[i], power, config.noise, config.cdf_samples, aux);
    }
  }
  double w_max = 0.0;
  if (kind == SchedulerKind::CadsLinear) w_max = config.w_max > 0.0 ? config.w_max : automatic_w_max(config);
  metrics.w_max = w_max;

  QuantileKnots knots = QuantileKnots::uniform(m_slots);
  bool knots_fitted = false;
  std::uint64_t last_fit = 0;

  ChannelState channel;
  std::vector<double> rates(n), weights(n), admitted(n), service(n);
  std::vector<std::size_t> slots(n);
  std::vector<bool> blocked(n);
  std::vector<std::size_t> transmitters;
  std::vector<WeightCdf> cdfs;

  double sum_q = 0.0, sum_z = 0.0, sum_interference = 0.0;
  double beta_winner = 0.0, beta_max = 0.0;
  bool beta_any = false;
  double ratio_num = 0.0, ratio_den = 0.0;

  for (std::uint64_t t = 0; t < config.horizon; ++t) {
    sample_channel(model, rng, state.slot, channel);
    double best_feasible = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double q = state.queues[i];
      rates[i] = rate(channel.h[i], power, config.noise);
      admitted[i] = flow_control(q, config.v, utility, config.a_max);
      weights[i] = weight(q, rates[i], state.z, power, channel.g[i]);
      blocked[i] = power * channel.g[i] > config.nu;
      if (!blocked[i]) best_feasible = std::max(best_feasible, weights[i]);
      sum_q += q;
    }
    sum_z += state.z;

    ScheduleDecision decision;
    transmitters.clear();
    switch (kind) {
      case SchedulerKind::Centralized:
        decision = centralized_schedule(weights, channel.g, power, config.nu);
        break;
      case SchedulerKind::CadsUniform:
      case SchedulerKind::CadsLinear:
      case SchedulerKind::CadsOptimal: {
        if (kind == SchedulerKind::CadsOptimal && (!knots_fitted || t - last_fit >= config.threshold_refresh)) {
          cdfs.clear();
          for (std::size_t i = 0; i < n; ++i) cdfs.push_back(pools[i].cdf_at(state.queues[i], state.z));
          const KnotObjective objective(cdfs, m_slots, config.tau);
          if (!objective.degenerate()) {
            // Later fits refine the previous knots; backlogs move slowly between fits.
            KnotSearchOptions search;
            if (knots_fitted) search = {1, kWarmSweeps, knots.knots};
            knots = fit_thresholds(model, cdfs, state.queues, state.z, config, aux, search).knots;
            knots_fitted = true;
            last_fit = t;
          }
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double w = weights[i];
          if (blocked[i] || w < 0.0) {
            slots[i] = m_slots + 1;
            continue;
          }
          if (kind == SchedulerKind::CadsLinear) {
            slots[i] = map_linear(w, w_max, m_slots);
            continue;
          }
          std::size_t positive = 0;
          const double u = pools[i].conditional_cdf(state.queues[i], state.z, w, positive);
          if (positive == 0) {
            slots[i] = m_slots + 1;
          } else {
            slots[i] = kind == SchedulerKind::CadsUniform ? quantile_to_slot(u, m_slots) : knots.slot(u);
          }
        }
        decision = cads_contend(slots, m_slots, config.tau);
        break;
      }
      case SchedulerKind::Irds: {
        IrdsOutcome out = irds_step(state.irds, weights, rng, blocked);
        decision = std::move(out.decision);
        for (std::size_t i = 0; i < n; ++i) {
          if (out.active[i]) transmitters.push_back(i);
        }
        break;
      }
    }
    if (kind != SchedulerKind::Irds && decision.winner) transmitters.push_back(*decision.winner);

    const double eff = decision.effective_fraction;
    double interference = 0.0;
    std::fill(service.begin(), service.end(), 0.0);
    for (std::size_t i : transmitters) {
      service[i] = eff * rates[i];
      interference += eff * power * channel.g[i];
      metrics.served[i] += std::min(state.queues[i], service[i]);
    }
    if (transmitters.size() == 1) {
      const double w = weights[transmitters.front()];
      beta_winner += w;
      beta_max += best_feasible;
      beta_any = true;
      ratio_num += eff * w;
    }
    ratio_den += best_feasible;

    for (std::size_t i = 0; i < n; ++i) {
      state.queues[i] = update_real_queue(state.queues[i], service[i], admitted[i]);
      metrics.x[i] += admitted[i];
    }
    state.z = update_virtual_queue(state.z, config.gamma, interference);
    sum_interference += interference;

    if (!transmitters.empty()) {
      ++metrics.scheduled_slots;
    } else if (decision.cause == ScheduleCause::IdleCollision) {
      ++metrics.collision_slots;
    } else {
      ++metrics.idle_slots;
    }

    if (config.record_trace) {
      TraceRow row;
      row.t = state.slot;
      row.h = channel.h;
      row.g = channel.g;
      row.admitted = admitted;
      row.winner = transmitters.empty() ? std::nullopt : std::optional<std::size_t>(transmitters.front());
      row.cause = transmitters.empty() ? decision.cause : ScheduleCause::Scheduled;
      row.queues = state.queues;
      row.z = state.z;
      row.interference = interference;
      metrics.trace.push_back(std::move(row));
    }
    ++state.slot;
  }

  if (config.horizon > 0) {
    const auto horizon = static_cast<double>(config.horizon);
    for (std::size_t i = 0; i < n; ++i) {
      metrics.x[i] /= horizon;
      metrics.served[i] /= horizon;
    }
    metrics.mean_q = sum_q / horizon;
    metrics.mean_z = sum_z / horizon;
    metrics.avg_interference = sum_interference / horizon;
    metrics.scheduled_fraction = static_cast<double>(metrics.scheduled_slots) / horizon;
    metrics.idle_fraction = static_cast<double>(metrics.idle_slots) / horizon;
    metrics.collision_fraction = static_cast<double>(metrics.collision_slots) / horizon;
    if (beta_any) metrics.beta_hat = beta_max > 0.0 ? std::clamp(1.0 - beta_winner / beta_max, 0.0, 1.0) : 0.0;
    if (ratio_den > 0.0) metrics.weight_ratio = ratio_num / ratio_den;
  }
  for (std::size_t i = 0; i < n; ++i) {
    metrics.utility_sum += utility(metrics.x[i]);
    metrics.admitted_sum += metrics.x[i];
    metrics.served_sum += metrics.served[i];
  }
  return metrics;
}

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::V: return "V";
    case SweepParameter::Gamma: return "gamma";
    case SweepParameter::N: return "N";
    case SweepParameter::M: return "M";
    case SweepParameter::Tau: return "tau";
  }
  return "unknown";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  for (auto p : {SweepParameter::V, SweepParameter::Gamma, SweepParameter::N, SweepParameter::M,
                 SweepParameter::Tau}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

SimConfig apply_sweep_value(const SimConfig& base, SweepParameter parameter, double value) {
  SimConfig config = base;
  auto count = [&](const char* key) {
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e9) {
      throw ConfigError(key, "must be a positive integer");
    }
    return static_cast<std::size_t>(value);
  };
  switch (parameter) {
    case SweepParameter::V: config.v = value; break;
    case SweepParameter::Gamma: config.gamma = value; break;
    case SweepParameter::N: config.n_pairs = count("N"); break;
    case SweepParameter::M: config.minislots = count("M"); break;
    case SweepParameter::Tau: config.tau = value; break;
  }
  config.validate();
  return config;
}

std::vector<SweepRow> sweep(const SimConfig& base, SweepParameter parameter, std::span<const double> values,
                            std::size_t jobs) {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), jobs, [&](std::size_t k) {
    SweepRow& row = rows[k];
    row.value = values[k];
    row.seed = derive_seed(base.seed, k);
    try {
      SimConfig config = apply_sweep_value(base, parameter, values[k]);
      config.seed = row.seed;
      row.metrics = run_simulation(config);
    } catch (const ConfigError& e) {
      row.valid = false;
      row.error = e.what();
    }
  });
  return rows;
}

Metrics average_metrics(std::span<const Metrics> runs) {
  Metrics avg;
  if (runs.empty()) return avg;
  const std::size_t n = runs.front().pairs;
  avg.pairs = n;
  avg.horizon = runs.front().horizon;
  avg.x.assign(n, 0.0);
  avg.served.assign(n, 0.0);
  double beta = 0.0, ratio = 0.0;
  std::size_t beta_count = 0, ratio_count = 0;
  for (const Metrics& m : runs) {
    if (m.pairs != n) throw std::invalid_argument("average_metrics: runs differ in N");
    for (std::size_t i = 0; i < n; ++i) {
      avg.x[i] += m.x[i];
      avg.served[i] += m.served[i];
    }
    avg.utility_sum += m.utility_sum;
    avg.admitted_sum += m.admitted_sum;
    avg.served_sum += m.served_sum;
    avg.mean_q += m.mean_q;
    avg.mean_z += m.mean_z;
    avg.avg_interference += m.avg_interference;
    avg.scheduled_slots += m.scheduled_slots;
    avg.idle_slots += m.idle_slots;
    avg.collision_slots += m.collision_slots;
    avg.scheduled_fraction += m.scheduled_fraction;
    avg.idle_fraction += m.idle_fraction;
    avg.collision_fraction += m.collision_fraction;
    avg.w_max += m.w_max;
    if (m.beta_hat) {
      beta += *m.beta_hat;
      ++beta_count;
    }
    if (m.weight_ratio) {
      ratio += *m.weight_ratio;
      ++ratio_count;
    }
  }
  const auto k = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < n; ++i) {
    avg.x[i] /= k;
    avg.served[i] /= k;
  }
  avg.utility_sum /= k;
  avg.admitted_sum /= k;
  avg.served_sum /= k;
  avg.mean_q /= k;
  avg.mean_z /= k;
  avg.avg_interference /= k;
  avg.scheduled_fraction /= k;
  avg.idle_fraction /= k;
  avg.collision_fraction /= k;
  avg.w_max /= k;
  if (beta_count > 0) avg.beta_hat = beta / static_cast<double>(beta_count);
  if (ratio_count > 0) avg.weight_ratio = ratio / static_cast<double>(ratio_count);
  return avg;
}

NoniidResult run_noniid(const SimConfig& config, const NoniidOptions& options, std::size_t jobs) {
  config.validate();
  if (options.runs < 1) throw ConfigError("runs", "must be at least 1");
  const auto [dlo, dhi] = options.direct_range;
  const auto [ilo, ihi] = options.interference_range;
  if (!(dlo > 0.0 && dlo <= dhi)) throw ConfigError("direct_range", "needs 0 < low <= high");
  if (!(ilo > 0.0 && ilo <= ihi)) throw ConfigError("interference_range", "needs 0 < low <= high");

  const std::size_t n = config.n_pairs;
  NoniidResult result;
  result.runs.resize(options.runs);
  result.direct_means.resize(options.runs);
  result.interference_means.resize(options.runs);
  std::vector<SimConfig> configs(options.runs, config);
  for (std::size_t r = 0; r < options.runs; ++r) {
    Rng means(derive_seed(config.seed, r));
    auto& d = result.direct_means[r];
    auto& g = result.interference_means[r];
    for (std::size_t i = 0; i < n; ++i) d.push_back(dlo + (dhi - dlo) * means.uniform());
    for (std::size_t i = 0; i < n; ++i) g.push_back(ilo + (ihi - ilo) * means.uniform());
    configs[r].direct_means = d;
    configs[r].interference_means = g;
    configs[r].seed = config.seed + r;
  }
  parallel_for(options.runs, jobs, [&](std::size_t r) { result.runs[r] = run_simulation(configs[r]); });
  result.average = average_metrics(result.runs);
  return result;
}

}  // namespace d2d
