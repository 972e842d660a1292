#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "d2d/config.hpp"

namespace d2d {

// Flat "key = value" text, one pair per line; '#' starts a comment. Lists
// (direct_means, interference_means) are comma separated. Numbers are read
// locale-independently and "inf" is accepted where infinity is meaningful.
//
// Keys: N P N0 gamma nu V A_max M tau horizon seed scheduler utility W_max
// cdf_samples channel direct_mean interference_mean direct_means
// interference_means threshold_refresh threshold_samples

using Override = std::pair<std::string, std::string>;

// Splits "key=value". Throws ConfigError when there is no '='.
Override parse_override(std::string_view text);

// Applies one key to config without validating the whole config.
void set_config_value(SimConfig& config, std::string_view key, std::string_view value);

SimConfig parse_config_text(std::string_view text, const std::vector<Override>& overrides = {});

// Missing keys keep their defaults. Overrides apply after the file; the
// result is validated. Throws ConfigError naming the offending key, or
// std::runtime_error when the file cannot be read.
SimConfig parse_config(const std::filesystem::path& path, const std::vector<Override>& overrides = {});

// Every key, one per line, in a form parse_config_text reads back exactly.
std::string emit_config(const SimConfig& config);

}  // namespace d2d
