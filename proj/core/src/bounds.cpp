#include "d2d/bounds.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace d2d {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

Rational p_exact(std::size_t n, std::size_t minislots, std::size_t k) {
  const Integer a = minislots - k;
  const auto e = static_cast<unsigned>(n);
  // pow(0, 0) == 1 for cpp_int.
  const Integer num = Integer(n) * boost::multiprecision::pow(a, e - 1);
  const Integer den = boost::multiprecision::pow(Integer(a + 1), e) - boost::multiprecision::pow(a, e);
  return Rational(num, den);
}

void check_args(std::size_t n, std::size_t minislots, std::size_t k) {
  if (n < 1) throw std::invalid_argument("N must be at least 1");
  if (k < 1 || k > minislots) throw std::invalid_argument("k must lie in 1..M");
}

}  // namespace

void BoundParams::validate() const {
  if (n < 1) throw std::invalid_argument("N must be at least 1");
  if (minislots < 1) throw std::invalid_argument("M must be at least 1");
  const double overhead = static_cast<double>(minislots) * tau;
  if (!(tau >= 0.0) || !(overhead <= 1.0)) throw std::invalid_argument("M*tau must lie in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
}

double p_success_given_slot(std::size_t n, std::size_t minislots, std::size_t k) {
  check_args(n, minislots, k);
  const auto a = static_cast<double>(minislots - k);
  const auto nn = static_cast<double>(n);
  if (n == 1) return 1.0;
  if (a == 0.0) return 0.0;
  // (a+1)^N - a^N = a^N ((1 + 1/a)^N - 1); dividing N a^(N-1) by it leaves
  // N / (a expm1(N log1p(1/a))), which stays accurate for large a and N.
  return nn / (a * std::expm1(nn * std::log1p(1.0 / a)));
}

std::string p_success_given_slot_exact(std::size_t n, std::size_t minislots, std::size_t k) {
  check_args(n, minislots, k);
  const Rational p = p_exact(n, minislots, k);
  std::ostringstream out;
  out << boost::multiprecision::numerator(p) << '/' << boost::multiprecision::denominator(p);
  return out.str();
}

std::vector<double> p_success_sequence(std::size_t n, std::size_t minislots) {
  std::vector<double> out;
  out.reserve(minislots);
  for (std::size_t k = 1; k <= minislots; ++k) out.push_back(p_success_given_slot(n, minislots, k));
  return out;
}

double alpha_bound(const BoundParams& params) {
  params.validate();
  double sum = 0.0;
  for (std::size_t k = 1; k <= params.minislots; ++k) sum += p_success_given_slot(params.n, params.minislots, k);
  const auto m = static_cast<double>(params.minislots);
  const double overhead = std::max(0.0, 1.0 - m * params.tau);
  return overhead * (1.0 - params.beta) * sum / m;
}

double alpha_bound_statement_form(const BoundParams& params) {
  return static_cast<double>(params.n) * alpha_bound(params);
}

PkSequenceReport analyze_pk_sequence(std::size_t n, std::size_t minislots) {
  PkSequenceReport report;
  std::vector<Rational> p;
  p.reserve(minislots);
  for (std::size_t k = 1; k <= minislots; ++k) p.push_back(p_exact(n, minislots, k));
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] > p[k - 1]) report.nonincreasing = false;
  }
  for (std::size_t k = 2; k < p.size(); ++k) {
    if (p[k] - 2 * p[k - 1] + p[k - 2] < 0) {
      if (report.convex) report.first_concave_k = k;  // 1-based middle index is k
      report.convex = false;
    }
  }
  return report;
}

bool check_pk_sequence(std::size_t n, std::size_t minislots) {
  const PkSequenceReport report = analyze_pk_sequence(n, minislots);
  return report.nonincreasing && report.convex;
}

double drift_constant_b1(std::size_t n, double r_max, double a_max, double gamma, double g_max) {
  const auto nn = static_cast<double>(n);
  return (nn * (r_max * r_max + a_max * a_max) + gamma * gamma + nn * nn * g_max * g_max) / 2.0;
}

}  // namespace d2d
