#include "d2d/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace d2d {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf") return kInfinity;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty() || std::isnan(value)) {
    throw ConfigError(std::string(key), "not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t to_count(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(key), "not a nonnegative integer: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> to_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(to_double(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string format(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  return std::string(buf, res.ptr);
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format(values[i]);
  }
  return out;
}

}  // namespace

Override parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError(std::string(trim(text)), "expected key=value");
  return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

void set_config_value(SimConfig& c, std::string_view key, std::string_view value) {
  const std::string k(key);
  if (key == "N") c.n_pairs = to_count(key, value);
  else if (key == "P") c.power = to_double(key, value);
  else if (key == "N0") c.noise = to_double(key, value);
  else if (key == "gamma") c.gamma = to_double(key, value);
  else if (key == "nu") c.nu = to_double(key, value);
  else if (key == "V") c.v = to_double(key, value);
  else if (key == "A_max") c.a_max = to_double(key, value);
  else if (key == "M") c.minislots = to_count(key, value);
  else if (key == "tau") c.tau = to_double(key, value);
  else if (key == "horizon") c.horizon = to_count(key, value);
  else if (key == "seed") c.seed = to_count(key, value);
  else if (key == "scheduler") {
    const auto kind = parse_scheduler(trim(value));
    if (!kind) throw ConfigError(k, "unknown scheduler '" + std::string(trim(value)) + "'");
    c.scheduler = *kind;
  } else if (key == "utility") {
    const auto kind = parse_utility(trim(value));
    if (!kind) throw ConfigError(k, "unknown utility '" + std::string(trim(value)) + "'");
    c.utility = *kind;
  } else if (key == "W_max") c.w_max = to_double(key, value);
  else if (key == "cdf_samples") c.cdf_samples = to_count(key, value);
  else if (key == "channel") {
    const auto v = trim(value);
    if (v == "exponential") c.channel = GainDistribution::Exponential;
    else if (v == "point") c.channel = GainDistribution::PointMass;
    else throw ConfigError(k, "expected 'exponential' or 'point'");
  } else if (key == "direct_mean") c.direct_mean = to_double(key, value);
  else if (key == "interference_mean") c.interference_mean = to_double(key, value);
  else if (key == "direct_means") c.direct_means = to_list(key, value);
  else if (key == "interference_means") c.interference_means = to_list(key, value);
  else if (key == "threshold_refresh") c.threshold_refresh = to_count(key, value);
  else if (key == "threshold_samples") c.threshold_samples = to_count(key, value);
  else throw ConfigError(k, "unknown key");
}

SimConfig parse_config_text(std::string_view text, const std::vector<Override>& overrides) {
  SimConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    }
    set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (const auto& [key, value] : overrides) set_config_value(config, key, value);
  config.validate();
  return config;
}

SimConfig parse_config(const std::filesystem::path& path, const std::vector<Override>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

std::string emit_config(const SimConfig& c) {
  std::ostringstream out;
  out << "N = " << c.n_pairs << '\n'
      << "P = " << format(c.power) << '\n'
      << "N0 = " << format(c.noise) << '\n'
      << "gamma = " << format(c.gamma) << '\n'
      << "nu = " << format(c.nu) << '\n'
      << "V = " << format(c.v) << '\n'
      << "A_max = " << format(c.a_max) << '\n'
      << "M = " << c.minislots << '\n'
      << "tau = " << format(c.tau) << '\n'
      << "horizon = " << c.horizon << '\n'
      << "seed = " << c.seed << '\n'
      << "scheduler = " << to_string(c.scheduler) << '\n'
      << "utility = " << to_string(c.utility) << '\n'
      << "W_max = " << format(c.w_max) << '\n'
      << "cdf_samples = " << c.cdf_samples << '\n'
      << "channel = " << (c.channel == GainDistribution::PointMass ? "point" : "exponential") << '\n'
      << "direct_mean = " << format(c.direct_mean) << '\n'
      << "interference_mean = " << format(c.interference_mean) << '\n'
      << "direct_means = " << format_list(c.direct_means) << '\n'
      << "interference_means = " << format_list(c.interference_means) << '\n'
      << "threshold_refresh = " << c.threshold_refresh << '\n'
      << "threshold_samples = " << c.threshold_samples << '\n';
  return out.str();
}

}  // namespace d2d
