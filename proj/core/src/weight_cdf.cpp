#include "d2d/weight_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "d2d/control.hpp"

namespace d2d {

namespace {

// Shared interpolation step so both evaluation paths round identically.
double interpolate(std::size_t count_le, double pred, double succ, std::size_t n, double x) {
  return (static_cast<double>(count_le) + (x - pred) / (succ - pred)) / static_cast<double>(n);
}

// One pass over a pool at (q, z): positives, positives at or below w, the
// largest of those and the smallest weight above w.
struct PoolPass {
  std::size_t positive = 0;
  std::size_t count_le = 0;
  double pred = 0.0;
  double succ = std::numeric_limits<double>::infinity();

  void add(double x, double w) {
    const bool pos = x > 0.0;
    const bool le = pos && x <= w;
    positive += pos;
    count_le += le;
    if (le && x > pred) pred = x;
    if (x > w && x < succ) succ = x;
  }
};

PoolPass scalar_pass(const double* r, const double* pg, std::size_t begin, std::size_t n, double q, double z,
                     double w, PoolPass acc = {}) {
  for (std::size_t k = begin; k < n; ++k) acc.add(q * r[k] - z * pg[k], w);
  return acc;
}

#if defined(__x86_64__) && defined(__GNUC__)
#define D2D_POOL_SIMD 1

// Lane-parallel version of scalar_pass. Only exact operations (compares,
// counts, min/max) are reordered, so the result matches bit for bit.
typedef double Double2 __attribute__((vector_size(16)));
typedef std::int64_t Int2 __attribute__((vector_size(16)));
typedef double Double4 __attribute__((vector_size(32)));
typedef std::int64_t Int4 __attribute__((vector_size(32)));

template <class vd, class vi, int L>
[[gnu::always_inline]] inline PoolPass vector_pass(const double* r, const double* pg, std::size_t n, double q,
                                                   double z, double w) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr int kStreams = 2;
  vi positive[kStreams] = {};
  vi count_le[kStreams] = {};
  vd pred[kStreams] = {};
  vd succ[kStreams];
  vd vq, vz, vw, zero = {};
  for (int j = 0; j < L; ++j) {
    vq[j] = q;
    vz[j] = z;
    vw[j] = w;
    for (auto& v : succ) v[j] = inf;
  }
  std::size_t k = 0;
  for (; k + kStreams * L <= n; k += kStreams * L) {
    for (int u = 0; u < kStreams; ++u) {
      vd a, b;
      std::memcpy(&a, r + k + u * L, sizeof a);
      std::memcpy(&b, pg + k + u * L, sizeof b);
      const vd x = vq * a - vz * b;
      const vi pos = x > zero;
      const vi le = pos & (x <= vw);
      positive[u] -= pos;
      count_le[u] -= le;
      pred[u] = (le & (x > pred[u])) ? x : pred[u];
      succ[u] = ((x > vw) & (x < succ[u])) ? x : succ[u];
    }
  }
  PoolPass acc;
  for (int u = 0; u < kStreams; ++u) {
    for (int j = 0; j < L; ++j) {
      acc.positive += static_cast<std::size_t>(positive[u][j]);
      acc.count_le += static_cast<std::size_t>(count_le[u][j]);
      acc.pred = std::max(acc.pred, pred[u][j]);
      acc.succ = std::min(acc.succ, succ[u][j]);
    }
  }
  return scalar_pass(r, pg, k, n, q, z, w, acc);
}

[[gnu::target("avx2")]] PoolPass pool_pass_avx2(const double* r, const double* pg, std::size_t n, double q,
                                                double z, double w) {
  return vector_pass<Double4, Int4, 4>(r, pg, n, q, z, w);
}

PoolPass pool_pass_sse2(const double* r, const double* pg, std::size_t n, double q, double z, double w) {
  return vector_pass<Double2, Int2, 2>(r, pg, n, q, z, w);
}
#endif

PoolPass pool_pass(const double* r, const double* pg, std::size_t n, double q, double z, double w) {
#ifdef D2D_POOL_SIMD
  static const bool avx2 = __builtin_cpu_supports("avx2");
  return avx2 ? pool_pass_avx2(r, pg, n, q, z, w) : pool_pass_sse2(r, pg, n, q, z, w);
#else
  return scalar_pass(r, pg, 0, n, q, z, w);
#endif
}

}  // namespace

WeightCdf WeightCdf::from_samples(std::span<const double> weights) {
  WeightCdf out;
  out.total_ = weights.size();
  for (double w : weights) {
    if (w > 0.0) out.support_.push_back(w);
  }
  std::sort(out.support_.begin(), out.support_.end());
  return out;
}

double WeightCdf::prob_positive() const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(support_.size()) / static_cast<double>(total_);
}

double WeightCdf::cdf(double x) const {
  if (support_.empty() || !(x > 0.0)) return 0.0;
  const auto it = std::upper_bound(support_.begin(), support_.end(), x);
  const auto count_le = static_cast<std::size_t>(it - support_.begin());
  if (count_le == support_.size()) return 1.0;
  const double pred = count_le == 0 ? 0.0 : support_[count_le - 1];
  return interpolate(count_le, pred, support_[count_le], support_.size(), x);
}

double WeightCdf::quantile(double u) const {
  if (support_.empty()) return 0.0;
  const auto n = support_.size();
  const double position = std::clamp(u, 0.0, 1.0) * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(position);
  if (k >= n) return support_.back();
  const double lower = k == 0 ? 0.0 : support_[k - 1];
  return lower + (position - static_cast<double>(k)) * (support_[k] - lower);
}

WeightSamplePool::WeightSamplePool(const GainSpec& direct, const GainSpec& interference, double power,
                                   double noise, std::size_t samples, Rng& rng) {
  rates_.resize(samples);
  interference_powers_.resize(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double h = direct.draw(rng);
    const double g = interference.draw(rng);
    rates_[k] = rate(h, power, noise);
    interference_powers_[k] = power * g;
  }
}

WeightCdf WeightSamplePool::cdf_at(double q, double z) const {
  std::vector<double> weights(rates_.size());
  for (std::size_t k = 0; k < rates_.size(); ++k) weights[k] = q * rates_[k] - z * interference_powers_[k];
  return WeightCdf::from_samples(weights);
}

double WeightSamplePool::conditional_cdf(double q, double z, double w) const {
  std::size_t positive = 0;
  return conditional_cdf(q, z, w, positive);
}

double WeightSamplePool::conditional_cdf(double q, double z, double w, std::size_t& positive) const {
  const PoolPass pass = pool_pass(rates_.data(), interference_powers_.data(), rates_.size(), q, z, w);
  positive = pass.positive;
  if (positive == 0 || !(w > 0.0)) return 0.0;
  if (pass.count_le == positive) return 1.0;
  return interpolate(pass.count_le, pass.pred, pass.succ, positive, w);
}

WeightCdf estimate_weight_cdf(const ChannelModel& channel, std::size_t pair, double q, double z,
                              double power, double noise, std::size_t samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("estimate_weight_cdf: samples must be at least 1");
  if (pair >= channel.pairs()) throw std::out_of_range("estimate_weight_cdf: pair index out of range");
  const WeightSamplePool pool(channel.direct[pair], channel.interference[pair], power, noise, samples, rng);
  return pool.cdf_at(q, z);
}

}  // namespace d2d
