#include "d2d/boundary.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "d2d/control.hpp"

namespace d2d {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Multiplier just above a switching point, so the pair wins the state
// outright rather than tying with the incumbent.
double just_above(double c) { return c * (1.0 + 1e-12) + 1e-300; }

struct CostPoint {
  double at;
  double rate;
  bool operator<(const CostPoint& o) const { return at < o.at; }
};

// Smallest multiplier whose winning set delivers `need` total rate, given
// per-state switching points. Empty when even every finite point falls short.
std::optional<double> smallest_multiplier(std::vector<CostPoint>& points, double need) {
  if (need <= 0.0) return 0.0;
  std::sort(points.begin(), points.end());
  double acc = 0.0;
  for (const auto& p : points) {
    if (!std::isfinite(p.at)) break;
    acc += p.rate;
    if (acc >= need) return just_above(p.at);
  }
  return std::nullopt;
}

double rate_tolerance(double alpha, double solo, double tol) { return tol * std::max(alpha, 1e-2 * solo); }

double gamma_tolerance(double gamma, double tol) { return tol * std::max(gamma, 1e-2); }

class Solver {
 public:
  Solver(const ChannelPool& pool, std::size_t target, std::span<const double> alpha, double gamma, double nu,
         const BoundaryOptions& options)
      : pool_(pool), target_(target), alpha_(alpha.begin(), alpha.end()), gamma_(gamma), nu_(nu), opt_(options) {
    const std::size_t n = pool.pairs();
    if (target >= n) throw std::out_of_range("boundary: target index out of range");
    if (alpha.size() + 1 != n) throw std::invalid_argument("boundary: need one rate target per other pair");
    solo_.resize(n);
    for (std::size_t j = 0; j < n; ++j) solo_[j] = pool.max_rate(j, nu);
    points_.resize(pool.size());
  }

  std::size_t other(std::size_t k) const { return k < target_ ? k : k + 1; }

  bool met(const PolicyAverages& avg) const {
    for (std::size_t k = 0; k < alpha_.size(); ++k) {
      const std::size_t j = other(k);
      if (std::abs(avg.rates[j] - alpha_[k]) > rate_tolerance(alpha_[k], solo_[j], opt_.tol) &&
          !(alpha_[k] <= 0.0 && avg.rates[j] >= 0.0)) {
        return false;
      }
    }
    return true;
  }

  // Gauss-Seidel over the rate multipliers at fixed mu. Each coordinate step
  // sets lambda_j to the smallest value meeting pair j's target exactly on
  // the pool. Returns false when the targets cannot be met.
  bool solve_lambdas(Multipliers& mult, std::size_t& sweeps) {
    const std::size_t n = pool_.pairs();
    const std::size_t max_sweeps = std::min<std::size_t>(opt_.max_iterations, 500);
    const double cap = opt_.lambda_cap * (1.0 + mult.mu);
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
      ++sweeps;
      bool moved = false;
      for (std::size_t k = 0; k < alpha_.size(); ++k) {
        const std::size_t j = other(k);
        for (std::size_t s = 0; s < pool_.size(); ++s) {
          const auto r = pool_.rates(s);
          const auto pg = pool_.interference(s);
          double best = 0.0;
          for (std::size_t l = 0; l < n; ++l) {
            if (l == j || pg[l] > nu_) continue;
            best = std::max(best, mult.coefficient(l, target_) * r[l] - mult.mu * pg[l]);
          }
          const bool able = pg[j] <= nu_ && r[j] > 0.0;
          points_[s] = {able ? (best + mult.mu * pg[j]) / r[j] : kInf, r[j]};
        }
        const auto lambda = smallest_multiplier(points_, alpha_[k] * static_cast<double>(pool_.size()));
        if (!lambda || *lambda > cap) return false;
        if (std::abs(*lambda - mult.lambda[k]) > 1e-12 * std::max(1.0, *lambda)) moved = true;
        mult.lambda[k] = *lambda;
      }
      if (!moved || alpha_.size() <= 1) return true;
      if (met(evaluate_dual_policy(pool_, mult, target_, nu_))) return true;
    }
    return true;
  }

  BoundaryPoint bisection() {
    BoundaryPoint point = blank();
    Multipliers mult{std::vector<double>(alpha_.size(), 1.0), 0.0};
    std::size_t sweeps = 0;

    auto at_mu = [&](double mu, Multipliers& m) -> std::optional<PolicyAverages> {
      m.mu = mu;
      if (!solve_lambdas(m, sweeps)) return std::nullopt;
      return evaluate_dual_policy(pool_, m, target_, nu_);
    };

    auto avg = at_mu(0.0, mult);
    if (!avg) return infeasible(point, mult, sweeps);
    if (avg->interference > gamma_) {
      // Bracket the interference crossing, then bisect on mu.
      double lo = 0.0;
      double hi = 1.0;
      Multipliers hi_mult = mult;
      auto hi_avg = at_mu(hi, hi_mult);
      while (hi_avg && hi_avg->interference > gamma_) {
        lo = hi;
        hi *= 4.0;
        if (hi > opt_.mu_cap) return infeasible(point, hi_mult, sweeps);
        hi_avg = at_mu(hi, hi_mult);
      }
      if (!hi_avg) return infeasible(point, hi_mult, sweeps);
      const double gtol = gamma_tolerance(gamma_, opt_.tol);
      for (std::size_t it = 0; it < 200 && hi_avg->interference < gamma_ - gtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        Multipliers mid_mult = hi_mult;
        const auto mid_avg = at_mu(mid, mid_mult);
        if (!mid_avg) return infeasible(point, mid_mult, sweeps);
        if (mid_avg->interference > gamma_) {
          lo = mid;
        } else {
          hi = mid;
          hi_mult = mid_mult;
          hi_avg = mid_avg;
        }
      }
      mult = hi_mult;
      avg = hi_avg;
    }
    return finish(point, mult, *avg, sweeps);
  }

  BoundaryPoint subgradient() {
    BoundaryPoint point = blank();
    Multipliers mult{std::vector<double>(alpha_.size(), 1.0), 0.0};
    const double gtol = gamma_tolerance(gamma_, opt_.tol);
    PolicyAverages avg;
    std::size_t k = 1;
    for (; k <= opt_.max_iterations; ++k) {
      avg = evaluate_dual_policy(pool_, mult, target_, nu_);
      const bool interference_ok =
          avg.interference <= gamma_ + gtol && (mult.mu == 0.0 || avg.interference >= gamma_ - gtol);
      if (met(avg) && interference_ok) break;
      const double step = opt_.step0 / std::sqrt(static_cast<double>(k));
      for (std::size_t i = 0; i < alpha_.size(); ++i) {
        mult.lambda[i] = std::max(0.0, mult.lambda[i] - step * (avg.rates[other(i)] - alpha_[i]));
      }
      if (std::isfinite(gamma_)) mult.mu = std::max(0.0, mult.mu + step * (avg.interference - gamma_));
      const bool diverged = mult.mu > opt_.mu_cap ||
                            std::any_of(mult.lambda.begin(), mult.lambda.end(),
                                        [&](double l) { return l > opt_.lambda_cap; });
      if (diverged) return infeasible(point, mult, k);
    }
    point = finish(point, mult, avg, k);
    point.converged = k <= opt_.max_iterations;
    return point;
  }

 private:
  BoundaryPoint blank() const {
    BoundaryPoint point;
    point.target = target_;
    point.alpha = alpha_;
    point.gamma = gamma_;
    return point;
  }

  BoundaryPoint infeasible(BoundaryPoint& point, const Multipliers& mult, std::size_t iterations) const {
    point.feasible = false;
    point.converged = false;
    point.multipliers = mult;
    point.iterations = iterations;
    point.rates.assign(pool_.pairs(), 0.0);
    return point;
  }

  BoundaryPoint finish(BoundaryPoint& point, const Multipliers& mult, const PolicyAverages& avg,
                       std::size_t iterations) const {
    point.multipliers = mult;
    point.rates = avg.rates;
    point.interference = avg.interference;
    point.iterations = iterations;
    double residual = 0.0;
    for (std::size_t k = 0; k < alpha_.size(); ++k) {
      residual = std::max(residual, std::abs(mult.lambda[k] * (avg.rates[other(k)] - alpha_[k])));
    }
    if (std::isfinite(gamma_)) residual = std::max(residual, std::abs(mult.mu * (gamma_ - avg.interference)));
    point.kkt_residual = residual;
    point.converged = met(avg) && avg.interference <= gamma_ + gamma_tolerance(gamma_, opt_.tol);
    return point;
  }

  const ChannelPool& pool_;
  std::size_t target_;
  std::vector<double> alpha_;
  double gamma_;
  double nu_;
  BoundaryOptions opt_;
  std::vector<double> solo_;
  std::vector<CostPoint> points_;
};

}  // namespace

ChannelPool::ChannelPool(const ChannelModel& model, double power, double noise, std::size_t samples, Rng& rng)
    : samples_(samples), pairs_(model.pairs()) {
  model.validate();
  rates_.resize(samples * pairs_);
  pg_.resize(samples * pairs_);
  ChannelState state;
  for (std::size_t s = 0; s < samples; ++s) {
    sample_channel(model, rng, s, state);
    for (std::size_t j = 0; j < pairs_; ++j) {
      rates_[s * pairs_ + j] = rate(state.h[j], power, noise);
      pg_[s * pairs_ + j] = power * state.g[j];
    }
  }
}

double ChannelPool::max_rate(std::size_t j, double nu) const {
  double sum = 0.0;
  for (std::size_t s = 0; s < samples_; ++s) {
    if (pg_[s * pairs_ + j] <= nu) sum += rates_[s * pairs_ + j];
  }
  return samples_ == 0 ? 0.0 : sum / static_cast<double>(samples_);
}

std::optional<std::size_t> dual_schedule(std::span<const double> rates, std::span<const double> pg,
                                         const Multipliers& mult, std::size_t target, double nu) {
  std::optional<std::size_t> best;
  double best_w = 0.0;
  for (std::size_t j = 0; j < rates.size(); ++j) {
    if (pg[j] > nu) continue;
    const double w = mult.coefficient(j, target) * rates[j] - mult.mu * pg[j];
    if (!(w >= 0.0)) continue;
    if (!best || w > best_w) {
      best = j;
      best_w = w;
    }
  }
  return best;
}

std::optional<std::size_t> dual_schedule(std::span<const double> h, std::span<const double> g,
                                          const Multipliers& mult, std::size_t target, double power,
                                          double noise, double nu) {
  std::vector<double> r(h.size());
  std::vector<double> pg(g.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    r[j] = rate(h[j], power, noise);
    pg[j] = power * g[j];
  }
  return dual_schedule(r, pg, mult, target, nu);
}

PolicyAverages evaluate_dual_policy(const ChannelPool& pool, const Multipliers& mult, std::size_t target,
                                    double nu) {
  PolicyAverages avg;
  avg.rates.assign(pool.pairs(), 0.0);
  std::size_t idle = 0;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    const auto r = pool.rates(s);
    const auto pg = pool.interference(s);
    const auto winner = dual_schedule(r, pg, mult, target, nu);
    if (!winner) {
      ++idle;
      continue;
    }
    avg.rates[*winner] += r[*winner];
    avg.interference += pg[*winner];
  }
  const double n = pool.size() == 0 ? 1.0 : static_cast<double>(pool.size());
  for (double& x : avg.rates) x /= n;
  avg.interference /= n;
  avg.idle = static_cast<double>(idle) / n;
  return avg;
}

BoundaryPoint solve_boundary_point(const ChannelPool& pool, std::size_t target, std::span<const double> alpha,
                                   double gamma, double nu, const BoundaryOptions& options) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("boundary: gamma must be nonnegative");
  if (!(nu > 0.0)) throw std::invalid_argument("boundary: nu must be positive");
  Solver solver(pool, target, alpha, gamma, nu, options);
  return options.method == BoundaryMethod::Bisection ? solver.bisection() : solver.subgradient();
}

BoundaryPoint solve_unconstrained_point(const ChannelPool& pool, std::size_t target,
                                        std::span<const double> alpha, const BoundaryOptions& options) {
  const std::size_t n = pool.pairs();
  if (target >= n) throw std::out_of_range("boundary: target index out of range");
  if (alpha.size() + 1 != n) throw std::invalid_argument("boundary: need one rate target per other pair");

  BoundaryPoint point;
  point.target = target;
  point.alpha.assign(alpha.begin(), alpha.end());
  point.gamma = kInf;
  point.constrained = false;
  Multipliers mult{std::vector<double>(alpha.size(), 1.0), 0.0};
  auto other = [target](std::size_t k) { return k < target ? k : k + 1; };

  // Pair j wins a state iff lambda_j R_j beats every other lambda_l R_l.
  auto averages = [&] {
    std::vector<double> rates(n, 0.0);
    for (std::size_t s = 0; s < pool.size(); ++s) {
      const auto r = pool.rates(s);
      std::size_t best = 0;
      for (std::size_t j = 1; j < n; ++j) {
        if (mult.coefficient(j, target) * r[j] > mult.coefficient(best, target) * r[best]) best = j;
      }
      rates[best] += r[best];
    }
    for (double& x : rates) x /= static_cast<double>(std::max<std::size_t>(pool.size(), 1));
    return rates;
  };

  std::vector<CostPoint> points(pool.size());
  const std::size_t max_sweeps = std::min<std::size_t>(options.max_iterations, 500);
  std::size_t sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      const std::size_t j = other(k);
      for (std::size_t s = 0; s < pool.size(); ++s) {
        const auto r = pool.rates(s);
        double best = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
          if (l != j) best = std::max(best, mult.coefficient(l, target) * r[l]);
        }
        points[s] = {r[j] > 0.0 ? best / r[j] : kInf, r[j]};
      }
      const auto lambda = smallest_multiplier(points, alpha[k] * static_cast<double>(pool.size()));
      if (!lambda || *lambda > options.lambda_cap) {
        point.feasible = false;
        point.converged = false;
        point.multipliers = mult;
        point.rates.assign(n, 0.0);
        return point;
      }
      if (std::abs(*lambda - mult.lambda[k]) > 1e-12 * std::max(1.0, *lambda)) moved = true;
      mult.lambda[k] = *lambda;
    }
    if (!moved || alpha.size() <= 1) break;
  }
  point.multipliers = mult;
  point.rates = averages();
  point.iterations = sweep + 1;
  double residual = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    residual = std::max(residual, std::abs(mult.lambda[k] * (point.rates[other(k)] - alpha[k])));
  }
  point.kkt_residual = residual;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    const auto r = pool.rates(s);
    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (mult.coefficient(j, target) * r[j] > mult.coefficient(best, target) * r[best]) best = j;
    }
    point.interference += pool.interference(s)[best];
  }
  point.interference /= static_cast<double>(std::max<std::size_t>(pool.size(), 1));
  return point;
}

std::vector<std::vector<double>> two_pair_grid(const ChannelPool& pool, std::size_t target, double nu,
                                               std::size_t points) {
  if (pool.pairs() != 2) throw std::invalid_argument("two_pair_grid: needs exactly two pairs");
  if (target > 1) throw std::out_of_range("two_pair_grid: target index out of range");
  const double top = pool.max_rate(1 - target, nu);
  std::vector<std::vector<double>> grid;
  for (std::size_t k = 0; k < points; ++k) {
    const double frac = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
    grid.push_back({frac * top});
  }
  return grid;
}

std::vector<BoundaryPoint> trace_region(const ChannelPool& pool, std::size_t target,
                                        std::span<const std::vector<double>> grid,
                                        std::span<const double> gammas, double nu,
                                        const BoundaryOptions& options, std::size_t jobs) {
  if (grid.empty()) throw std::invalid_argument("trace_region: grid is empty");
  const std::size_t total = grid.size() * gammas.size();
  std::vector<BoundaryPoint> out(total);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      const double gamma = gammas[idx / grid.size()];
      out[idx] = solve_boundary_point(pool, target, grid[idx % grid.size()], gamma, nu, options);
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(total, 1));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < jobs; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  return out;
}

}  // namespace d2d
