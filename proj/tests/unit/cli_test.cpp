#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = d2dsim::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST(Cli, BoundPrintsAlphaAndSequence) {
  const auto r = run({"bound", "--N", "2", "--M", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "N,M,tau,beta,alpha,alpha_statement,P_1,P_2\n2,2,0,0,0.333333333,0.666666667,0.666666667,0\n");
}

TEST(Cli, SimulateWithZeroHorizonEmitsJson) {
  const auto r = run({"--set", "horizon=0", "simulate"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["horizon"], 0);
  EXPECT_EQ(j["x"].size(), 10u);
}

TEST(Cli, GlobalOptionsAfterSubcommand) {
  const auto r = run({"simulate", "--set", "horizon=5", "--set", "N=3", "--seed", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["x"].size(), 3u);
}

TEST(Cli, SweepWritesOneRowPerValue) {
  const auto r = run({"--set", "horizon=50", "--set", "N=3", "sweep", "--parameter", "V", "--values",
                      "10,20,40,80,160", "--jobs", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 6u);
  EXPECT_EQ(r.out.rfind("parameter,value,", 0), 0u);
}

TEST(Cli, TraceAndOutFiles) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto trace = (dir / "d2d_cli_trace.csv").string(), json = (dir / "d2d_cli_metrics.json").string();
  const auto r = run({"--set", "horizon=7", "--set", "N=2", "--out", json, "simulate", "--trace", trace});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream t(trace);
  std::stringstream buf;
  buf << t.rdbuf();
  EXPECT_EQ(count_lines(buf.str()), 8u);
  EXPECT_TRUE(std::filesystem::exists(json));
  std::filesystem::remove(trace);
  std::filesystem::remove(json);
}

TEST(Cli, BoundaryForTwoPairs) {
  const auto r = run({"--set", "N=2", "boundary", "--samples", "2000", "--grid", "3", "--gammas", "0.5,inf"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 1u + 6u + 3u);
  EXPECT_NE(r.out.find("unconstrained,inf"), std::string::npos);
}

TEST(Cli, NoniidAverages) {
  const auto r = run({"--set", "horizon=20", "--set", "N=2", "noniid", "--runs", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["runs"].size(), 3u);
  EXPECT_EQ(j["runs"][0]["direct_means"].size(), 2u);
}

TEST(Cli, UsageAndConfigErrorsExitTwo) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"bound", "--N", "2"},
           {"bound", "--N", "2", "--M", "10", "--tau", "0.5"},
           {"sweep", "--parameter", "Q", "--values", "1"},
           {"sweep", "--parameter", "V", "--values", "1,x"},
           {"--format", "csv", "simulate"},
           {"--set", "N=3", "boundary"},
       }) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 2) << (args.empty() ? "<empty>" : args.front());
    EXPECT_EQ(nlohmann::json::parse(r.err)["error"]["kind"], "usage");
  }
  const auto r = run({"--set", "tau=0.01", "simulate"});
  EXPECT_EQ(r.code, 2);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"]["kind"], "config");
  EXPECT_EQ(j["error"]["key"], "M");
}

TEST(Cli, MissingConfigFileIsRuntimeError) {
  const auto r = run({"--config", "/nonexistent/d2d.cfg", "simulate"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"]["kind"], "runtime");
}

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

}  // namespace
