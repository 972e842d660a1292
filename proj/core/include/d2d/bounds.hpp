#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace d2d {

// Inputs of the CADS performance coefficient alpha.
struct BoundParams {
  std::size_t n = 1;          // N, contending pairs
  std::size_t minislots = 1;  // M
  double tau = 0.0;
  double beta = 0.0;          // imperfect-scheduling loss

  // Throws std::invalid_argument. M*tau = 1 is accepted (alpha is then 0).
  void validate() const;
};

// Probability that contention succeeds given that the earliest chosen
// mini-slot is k, with N pairs choosing uniformly among M slots:
//   P_k = N (M-k)^(N-1) / ((M-k+1)^N - (M-k)^N),   0^0 = 1.
double p_success_given_slot(std::size_t n, std::size_t minislots, std::size_t k);

// Same value as an exact fraction "num/den" in lowest terms.
std::string p_success_given_slot_exact(std::size_t n, std::size_t minislots, std::size_t k);

// P_1..P_M.
std::vector<double> p_success_sequence(std::size_t n, std::size_t minislots);

// alpha = (1 - M tau)(1 - beta) (1/M) sum_k P_k.
double alpha_bound(const BoundParams& params);

// The alternative form with an extra factor N, (N/M) sum_k N(...) / (...),
// i.e. N times alpha_bound. Kept for comparison; it can exceed 1.
double alpha_bound_statement_form(const BoundParams& params);

// True iff P_k is nonincreasing in k and all second differences are
// nonnegative, decided in exact rational arithmetic.
bool check_pk_sequence(std::size_t n, std::size_t minislots);

struct PkSequenceReport {
  bool nonincreasing = true;
  bool convex = true;
  std::size_t first_concave_k = 0;  // middle index of the first negative second difference, 0 if none
};

PkSequenceReport analyze_pk_sequence(std::size_t n, std::size_t minislots);

// B1 = (N (R_max^2 + A_max^2) + gamma^2 + N^2 g_max^2) / 2.
double drift_constant_b1(std::size_t n, double r_max, double a_max, double gamma, double g_max);

}  // namespace d2d
