#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "d2d/channel.hpp"

namespace d2d {

// Lagrange multipliers of the boundary problem for target pair i: one rate
// multiplier per other pair (in index order, skipping i) and the average
// interference multiplier.
struct Multipliers {
  std::vector<double> lambda;
  double mu = 0.0;

  // Rate coefficient of pair j: 1 for the target pair, lambda otherwise.
  double coefficient(std::size_t j, std::size_t target) const {
    if (j == target) return 1.0;
    return lambda[j < target ? j : j - 1];
  }
};

// Common random numbers for every expectation: `size()` joint channel
// draws, stored as rates R and interference powers P*g, row-major by draw.
class ChannelPool {
 public:
  ChannelPool(const ChannelModel& model, double power, double noise, std::size_t samples, Rng& rng);

  std::size_t size() const { return samples_; }
  std::size_t pairs() const { return pairs_; }
  std::span<const double> rates(std::size_t s) const { return {rates_.data() + s * pairs_, pairs_}; }
  std::span<const double> interference(std::size_t s) const { return {pg_.data() + s * pairs_, pairs_}; }

  // E[R_j 1{P g_j <= nu}]: the most pair j can get on its own.
  double max_rate(std::size_t j, double nu) const;

 private:
  std::size_t samples_;
  std::size_t pairs_;
  std::vector<double> rates_;
  std::vector<double> pg_;
};

// Per-state decision of the dual policy: W_i = R_i - mu P g_i for the target
// pair, W_j = lambda_j R_j - mu P g_j otherwise; the largest W among pairs
// with W >= 0 and P g <= nu transmits (lowest index on ties), else idle.
std::optional<std::size_t> dual_schedule(std::span<const double> rates, std::span<const double> pg,
                                         const Multipliers& mult, std::size_t target, double nu);

// Same decision from raw gains.
std::optional<std::size_t> dual_schedule(std::span<const double> h, std::span<const double> g,
                                          const Multipliers& mult, std::size_t target, double power,
                                          double noise, double nu);

struct PolicyAverages {
  std::vector<double> rates;  // E[I_j R_j]
  double interference = 0.0;  // E[sum_j P g_j I_j]
  double idle = 0.0;          // fraction of idle states
};

PolicyAverages evaluate_dual_policy(const ChannelPool& pool, const Multipliers& mult, std::size_t target,
                                    double nu);

enum class BoundaryMethod {
  Bisection,   // coordinate bisection on lambda, outer bisection on mu
  Subgradient, // projected dual subgradient with steps s0 / sqrt(k)
};

struct BoundaryOptions {
  double tol = 1e-3;  // relative tolerance on every constraint
  BoundaryMethod method = BoundaryMethod::Bisection;
  double lambda_cap = 1e6;  // a multiplier above this means the targets are infeasible
  double mu_cap = 1e6;
  std::size_t max_iterations = 20000;  // subgradient steps, or Gauss-Seidel sweeps per mu
  double step0 = 1.0;
};

struct BoundaryPoint {
  std::size_t target = 0;
  std::vector<double> alpha;  // rate targets of the other pairs, index order skipping target
  double gamma = 0.0;
  std::vector<double> rates;  // achieved E[I_j R_j], all pairs
  double interference = 0.0;
  Multipliers multipliers;
  bool feasible = true;
  bool converged = true;
  std::size_t iterations = 0;
  // Largest complementary-slackness residual over all constraints.
  double kkt_residual = 0.0;
  bool constrained = true;  // false for points of the interference-free problem
};

// Maximizes E[I_target R_target] subject to E[I_j R_j] >= alpha_j,
// E[sum P g I] <= gamma, P g <= nu per state, and at most one transmitter.
BoundaryPoint solve_boundary_point(const ChannelPool& pool, std::size_t target, std::span<const double> alpha,
                                   double gamma, double nu, const BoundaryOptions& options = {});

// The same problem without interference constraints. The optimal policy
// schedules argmax_j lambda_j R_j and never idles.
BoundaryPoint solve_unconstrained_point(const ChannelPool& pool, std::size_t target,
                                        std::span<const double> alpha, const BoundaryOptions& options = {});

// Evenly spaced targets 0, max/(points-1), ..., max for the other pair of a
// two-pair network, max being its solo rate under nu.
std::vector<std::vector<double>> two_pair_grid(const ChannelPool& pool, std::size_t target, double nu,
                                               std::size_t points);

// One point per (gamma, target vector), gamma-major; infeasible ones come
// back with feasible = false. Points are independent and solved on `jobs`
// threads.
std::vector<BoundaryPoint> trace_region(const ChannelPool& pool, std::size_t target,
                                        std::span<const std::vector<double>> grid,
                                        std::span<const double> gammas, double nu,
                                        const BoundaryOptions& options = {}, std::size_t jobs = 1);

}  // namespace d2d
