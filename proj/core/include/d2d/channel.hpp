#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "d2d/random.hpp"

namespace d2d {

enum class GainDistribution {
  Exponential,  // Rayleigh fading power gain
  PointMass,    // deterministic gain, for tests and degenerate experiments
};

// Marginal law of one power gain. For PointMass the gain always equals mean.
struct GainSpec {
  GainDistribution kind = GainDistribution::Exponential;
  double mean = 1.0;

  double draw(Rng& rng) const;
};

// Block-fading channel law: per-pair direct (transmitter to receiver) and
// interference (transmitter to access point) gains, iid across slots.
struct ChannelModel {
  std::vector<GainSpec> direct;
  std::vector<GainSpec> interference;

  static ChannelModel iid(std::size_t pairs, GainSpec direct, GainSpec interference);

  // Exponential gains with means 2 (direct) and 1 (interference).
  static ChannelModel rayleigh_default(std::size_t pairs);

  std::size_t pairs() const { return direct.size(); }

  // Throws std::invalid_argument on size mismatch or nonpositive means.
  void validate() const;
};

struct ChannelState {
  std::vector<double> h;  // direct gains
  std::vector<double> g;  // interference gains
  std::uint64_t slot = 0;
};

// Draw order: h_1..h_N, then g_1..g_N.
ChannelState sample_channel(const ChannelModel& model, Rng& rng, std::uint64_t slot);

// In-place variant for the slot loop; reuses the vectors in out.
void sample_channel(const ChannelModel& model, Rng& rng, std::uint64_t slot, ChannelState& out);

}  // namespace d2d
