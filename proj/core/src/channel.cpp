#include "d2d/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace d2d {

double GainSpec::draw(Rng& rng) const {
  switch (kind) {
    case GainDistribution::PointMass:
      return mean;
    case GainDistribution::Exponential:
      return rng.exponential(mean);
  }
  return mean;
}

ChannelModel ChannelModel::iid(std::size_t pairs, GainSpec direct, GainSpec interference) {
  ChannelModel model;
  model.direct.assign(pairs, direct);
  model.interference.assign(pairs, interference);
  return model;
}

ChannelModel ChannelModel::rayleigh_default(std::size_t pairs) {
  return iid(pairs, {GainDistribution::Exponential, 2.0}, {GainDistribution::Exponential, 1.0});
}

void ChannelModel::validate() const {
  if (direct.empty()) throw std::invalid_argument("channel model has no pairs");
  if (direct.size() != interference.size()) {
    throw std::invalid_argument("channel model: direct and interference gain counts differ");
  }
  auto check = [](const GainSpec& spec, const char* what, std::size_t i) {
    const bool ok = spec.kind == GainDistribution::PointMass ? spec.mean >= 0.0 : spec.mean > 0.0;
    if (!ok || !std::isfinite(spec.mean)) {
      throw std::invalid_argument(std::string("channel model: invalid ") + what + " mean for pair " +
                                  std::to_string(i));
    }
  };
  for (std::size_t i = 0; i < direct.size(); ++i) {
    check(direct[i], "direct", i);
    check(interference[i], "interference", i);
  }
}

void sample_channel(const ChannelModel& model, Rng& rng, std::uint64_t slot, ChannelState& out) {
  const std::size_t n = model.pairs();
  out.h.resize(n);
  out.g.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.h[i] = model.direct[i].draw(rng);
  for (std::size_t i = 0; i < n; ++i) out.g[i] = model.interference[i].draw(rng);
  out.slot = slot;
}

ChannelState sample_channel(const ChannelModel& model, Rng& rng, std::uint64_t slot) {
  ChannelState state;
  sample_channel(model, rng, slot, state);
  return state;
}

}  // namespace d2d
