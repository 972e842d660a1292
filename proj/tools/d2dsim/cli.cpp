#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "d2d/boundary.hpp"
#include "d2d/bounds.hpp"
#include "d2d/config_io.hpp"
#include "d2d/output.hpp"
#include "d2d/simulation.hpp"

namespace d2dsim {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_path;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
};

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
               item.end());
    if (item == "inf" || item == "+inf") {
      out.push_back(d2d::kInfinity);
      continue;
    }
    double v = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || end != item.data() + item.size()) {
      throw UsageError(flag + ": not a number list: '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

std::pair<double, double> parse_range(const std::string& text, const std::string& flag) {
  const auto v = parse_list(text, flag);
  if (v.size() != 2) throw UsageError(flag + ": expected low,high");
  return {v[0], v[1]};
}

d2d::SimConfig load_config(const GlobalOptions& g) {
  std::vector<d2d::Override> overrides;
  for (const auto& s : g.sets) overrides.push_back(d2d::parse_override(s));
  if (g.seed) overrides.emplace_back("seed", std::to_string(*g.seed));
  if (g.config_path.empty()) return d2d::parse_config_text("", overrides);
  return d2d::parse_config(g.config_path, overrides);
}

std::string resolve_format(const GlobalOptions& g, const std::string& fallback,
                           std::initializer_list<const char*> allowed) {
  const std::string format = g.format.empty() ? fallback : g.format;
  for (const char* a : allowed) {
    if (format == a) return format;
  }
  throw UsageError("--format " + format + " is not available for this subcommand");
}

void write_artifact(const GlobalOptions& g, const std::string& text, std::ostream& out) {
  if (g.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(g.out_path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file " + g.out_path);
  file << text;
  if (!file) throw std::runtime_error("failed writing " + g.out_path);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  file << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-layer control simulator for underlay D2D networks", "d2dsim"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Flat key = value config file")->option_text("PATH");
  app.add_option("--set", g.sets, "Override one config key (repeatable)")->option_text("KEY=VALUE");
  app.add_option("--out", g.out_path, "Write the artifact here instead of stdout")->option_text("PATH");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "Override the config seed");
  app.add_option("--jobs", g.jobs, "Worker threads for sweeps, repeated runs and boundary grids")
      ->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Run one simulation and emit Metrics as JSON");
  std::string trace_path;
  simulate->add_option("--trace", trace_path, "Also write the per-slot trace CSV here")->option_text("PATH");

  auto* sweep_cmd = app.add_subcommand("sweep", "One run per parameter value, long-format CSV");
  std::string parameter;
  std::string values_text;
  sweep_cmd->add_option("--parameter", parameter, "V, gamma, N, M or tau")
      ->required()
      ->check(CLI::IsMember({"V", "gamma", "N", "M", "tau"}));
  sweep_cmd->add_option("--values", values_text, "Comma-separated values")->required();

  auto* boundary_cmd = app.add_subcommand("boundary", "Stability-region boundary curves as CSV");
  std::string gammas_text = "0.05,0.1,0.5,inf";
  std::size_t grid_points = 11;
  std::size_t samples = 100000;
  double tol = 1e-3;
  std::size_t target = 1;
  std::string alpha_text;
  std::string method = "bisection";
  bool with_unconstrained = true;
  boundary_cmd->add_option("--gammas", gammas_text, "Comma-separated interference limits")->capture_default_str();
  boundary_cmd->add_option("--grid", grid_points, "Rate targets per curve (two pairs)")->capture_default_str()
      ->check(CLI::PositiveNumber);
  boundary_cmd->add_option("--samples", samples, "Channel draws per expectation")->capture_default_str()->check(CLI::PositiveNumber);
  boundary_cmd->add_option("--tol", tol, "Relative constraint tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  boundary_cmd->add_option("--target", target, "Pair whose rate is maximized (1-based)")->capture_default_str()
      ->check(CLI::PositiveNumber);
  boundary_cmd->add_option("--alpha", alpha_text, "Rate targets of the other pairs (needed when N != 2)");
  boundary_cmd->add_option("--method", method, "bisection or subgradient")->capture_default_str()
      ->check(CLI::IsMember({"bisection", "subgradient"}));
  boundary_cmd->add_flag("!--no-unconstrained", with_unconstrained, "Skip the interference-free curve");

  auto* bound_cmd = app.add_subcommand("bound", "alpha and P_k table as CSV");
  d2d::BoundParams bound;
  bound_cmd->add_option("--N", bound.n, "Contending pairs")->required();
  bound_cmd->add_option("--M", bound.minislots, "Mini-slots")->required();
  bound_cmd->add_option("--tau", bound.tau, "Mini-slot to slot duration ratio")->capture_default_str();
  bound_cmd->add_option("--beta", bound.beta, "Imperfect-scheduling loss")->capture_default_str();

  auto* noniid_cmd = app.add_subcommand("noniid", "Averaged Metrics over runs with random per-pair means");
  d2d::NoniidOptions noniid;
  std::string direct_range = "1.2,2.8";
  std::string interference_range = "0.2,1.8";
  noniid_cmd->add_option("--runs", noniid.runs, "Independent mean draws")->capture_default_str()->check(CLI::PositiveNumber);
  noniid_cmd->add_option("--direct-range", direct_range, "low,high for direct-gain means")->capture_default_str();
  noniid_cmd->add_option("--interference-range", interference_range, "low,high for interference-gain means")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << d2d::error_to_json("usage", "", e.what());
    return 2;
  }

  try {
    if (simulate->parsed()) {
      resolve_format(g, "json", {"json"});
      d2d::SimConfig config = load_config(g);
      config.record_trace = !trace_path.empty();
      const d2d::Metrics metrics = d2d::run_simulation(config);
      if (!trace_path.empty()) write_file(trace_path, d2d::trace_to_csv(metrics));
      write_artifact(g, d2d::metrics_to_json(metrics), out);
    } else if (sweep_cmd->parsed()) {
      resolve_format(g, "csv", {"csv"});
      const d2d::SimConfig config = load_config(g);
      const auto p = d2d::parse_sweep_parameter(parameter);
      const auto values = parse_list(values_text, "--values");
      const auto rows = d2d::sweep(config, *p, values, g.jobs);
      write_artifact(g, d2d::sweep_to_csv(parameter, rows), out);
    } else if (boundary_cmd->parsed()) {
      resolve_format(g, "csv", {"csv"});
      const d2d::SimConfig config = load_config(g);
      const std::size_t n = config.n_pairs;
      if (target > n) throw UsageError("--target exceeds N");
      const std::size_t i = target - 1;
      d2d::Rng rng(config.seed);
      const d2d::ChannelPool pool(config.channel_model(), config.power, config.noise, samples, rng);
      std::vector<std::vector<double>> grid;
      if (!alpha_text.empty()) {
        grid.push_back(parse_list(alpha_text, "--alpha"));
        if (grid.front().size() + 1 != n) throw UsageError("--alpha needs N-1 values");
      } else if (n == 2) {
        grid = d2d::two_pair_grid(pool, i, config.nu, grid_points);
      } else {
        throw UsageError("--alpha is required unless N = 2");
      }
      d2d::BoundaryOptions options;
      options.tol = tol;
      options.method = method == "subgradient" ? d2d::BoundaryMethod::Subgradient : d2d::BoundaryMethod::Bisection;
      const auto gammas = parse_list(gammas_text, "--gammas");
      auto points = d2d::trace_region(pool, i, grid, gammas, config.nu, options, g.jobs);
      if (with_unconstrained) {
        for (const auto& a : grid) points.push_back(d2d::solve_unconstrained_point(pool, i, a, options));
      }
      write_artifact(g, d2d::boundary_to_csv(points, n), out);
    } else if (bound_cmd->parsed()) {
      resolve_format(g, "csv", {"csv"});
      try {
        bound.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      write_artifact(g, d2d::bound_to_csv(bound), out);
    } else if (noniid_cmd->parsed()) {
      resolve_format(g, "json", {"json"});
      const d2d::SimConfig config = load_config(g);
      noniid.direct_range = parse_range(direct_range, "--direct-range");
      noniid.interference_range = parse_range(interference_range, "--interference-range");
      const auto result = d2d::run_noniid(config, noniid, g.jobs);
      write_artifact(g, d2d::noniid_to_json(result), out);
    }
  } catch (const d2d::ConfigError& e) {
    err << d2d::error_to_json("config", e.key(), e.what());
    return 2;
  } catch (const UsageError& e) {
    err << d2d::error_to_json("usage", "", e.what());
    return 2;
  } catch (const std::exception& e) {
    err << d2d::error_to_json("runtime", "", e.what());
    return 1;
  }
  return 0;
}

}  // namespace d2dsim
