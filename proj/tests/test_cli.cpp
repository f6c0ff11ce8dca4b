#include <gtest/gtest.h>

#include <sstream>

#include "spinbundle/cli.hpp"

using spinbundle::cli::run_cli;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {}, {"frobnicate"}, {"verify", "--bogus"}, {"verify", "--format", "xml"}, {"verify", "--samples", "3"},
           {"exchange"}, {"exchange", "--at", "1"}, {"exchange", "--at", "4,0"}, {"holonomy", "--bundle", "br:7"},
           {"holonomy", "--loop", "small-circle:x"}, {"holonomy", "--steps", "4"},
           {"experiment", "--field", "x4"}, {"experiment", "--chi", "odd", "--field", "x3"},
           {"verify", "--fault-inject", "nonsense"}}) {
    const CliRun r = run(args);
    EXPECT_EQ(r.code, 2) << (args.empty() ? "<none>" : args[0]);
    EXPECT_FALSE(r.err.empty());
    EXPECT_TRUE(r.out.empty());
  }
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, HolonomyAntipodal) {
  const CliRun r = run({"holonomy", "--bundle", "xi-minus", "--loop", "antipodal"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(": -1.000000 "), std::string::npos) << r.out;
}

TEST(Cli, HolonomyJsonForEachBundle) {
  const std::vector<std::pair<std::string, double>> cases{
      {"xi-minus", -1.0}, {"xi-plus", 1.0}, {"br:-1", -1.0}, {"br:0", -1.0}, {"br:1", -1.0}, {"br:singlet", 1.0}};
  for (const auto& [bundle, expected] : cases) {
    const CliRun r = run({"holonomy", "--bundle", bundle, "--loop", "antipodal", "--format", "json", "--steps", "512"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["re"].get<double>(), expected, 1e-6) << bundle;
  }
  const CliRun loop = run({"holonomy", "--loop", "small-circle:0.8", "--format", "json"});
  EXPECT_NEAR(nlohmann::json::parse(loop.out)["re"].get<double>(), 1.0, 1e-6);
}

TEST(Cli, ExchangeAtNorthPole) {
  const CliRun r = run({"exchange", "--at", "0,0", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["unitarity_residual"].get<double>(), 0.0);
  EXPECT_EQ(j["exchange_rule_residual"].get<double>(), 0.0);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(j["block"][i][k][0].get<double>(), i == k ? 1.0 : 0.0);
      EXPECT_EQ(j["block"][i][k][1].get<double>(), 0.0);
    }
  }
  EXPECT_EQ(run({"exchange", "--at", "1.2,0.4"}).code, 0);
}

TEST(Cli, ExperimentVerdicts) {
  const CliRun odd = run({"experiment", "--chi", "odd-linear", "--field", "x3", "--format", "json"});
  ASSERT_EQ(odd.code, 0) << odd.err;
  auto j = nlohmann::json::parse(odd.out);
  EXPECT_TRUE(j["invariant"].get<bool>());
  EXPECT_TRUE(j["singlevalued"].get<bool>());
  EXPECT_FALSE(j["anti_singlevalued"].get<bool>());
  const CliRun even = run({"experiment", "--chi", "even-constant", "--field", "x3", "--format", "json"});
  j = nlohmann::json::parse(even.out);
  EXPECT_TRUE(j["invariant"].get<bool>());
  EXPECT_FALSE(j["singlevalued"].get<bool>());
  EXPECT_TRUE(j["anti_singlevalued"].get<bool>());
  const CliRun text = run({"experiment", "--field", "x1^2 + 1"});
  EXPECT_NE(text.out.find("invariant no"), std::string::npos) << text.out;
}

TEST(Cli, VerifyJsonIsDeterministic) {
  const std::vector<std::string> args{"verify", "--seed", "7", "--format", "json", "--no-timing", "--samples", "256"};
  const CliRun a = run(args);
  const CliRun b = run(args);
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.back(), '\n');
  EXPECT_EQ(a.out.find('\x1b'), std::string::npos);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 7u);
  EXPECT_TRUE(j["all_pass"].get<bool>());
  EXPECT_EQ(j["wall_ms"].get<double>(), 0.0);
}

TEST(Cli, VerifyWithFaultExitsOne) {
  const CliRun r = run({"verify", "--samples", "256", "--fault-inject", "exchange-entry"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL  exchange.unitarity"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\nFAIL: "), std::string::npos);
}
