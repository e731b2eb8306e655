#include <gtest/gtest.h>

#include "rnc/commands.hpp"

using namespace rnc;

namespace {

std::string file(const CommandOutput& out, const std::string& name) {
  for (const auto& [n, content] : out.files) {
    if (n == name) return content;
  }
  ADD_FAILURE() << "missing output " << name;
  return {};
}

}  // namespace

TEST(Verify, DefaultPasses) {
  RunConfig c;
  c.cases = 100;
  const auto out = run_command("verify", c);
  EXPECT_EQ(out.exit_code, kExitOk);
  const auto report = Json::parse(file(out, "verify_report.json"));
  EXPECT_TRUE(report["pass"].get<bool>());
  for (const auto& check : report["checks"]) {
    EXPECT_EQ(check["max_abs_residual"], "0") << check["check"];
    EXPECT_TRUE(check["failing_cases"].empty());
  }
  const auto cases = Json::parse(file(out, "mtp_cases.json"));
  ASSERT_EQ(cases.size(), 100u);
  EXPECT_TRUE(cases[0].contains("lhs"));
  EXPECT_EQ(cases[0]["residual"], "0");
}

TEST(Verify, CorruptedMarginalRejected) {
  const std::string text =
      "schema_version = 1\nmeasure.variant = periodic\nmeasure.period = 3\n"
      "measure.residue.0 = 1/3,1/3\n";
  EXPECT_THROW(parse_config(text), config_error);
}

TEST(Verify, CustomMeasureIncluded) {
  RunConfig c;
  c.cases = 20;
  c.depth = 4;
  c.measure = MeasureSpec::custom({Marginal::make(Rational(2, 7), Rational(5, 7))}, {Marginal::fair()});
  const auto out = run_command("verify", c);
  EXPECT_EQ(out.exit_code, kExitOk);
  EXPECT_NE(out.stdout_text.find("\"family\": \"config\""), std::string::npos);
}

TEST(Verify, DepthOutOfRange) {
  RunConfig c;
  c.depth = 13;
  const auto out = run_command("verify", c);
  EXPECT_EQ(out.exit_code, kExitInvalidConfig);
  EXPECT_NE(out.stdout_text.find("invalid_config"), std::string::npos);
}

TEST(Oscillate, SmallRun) {
  RunConfig c;
  c.paths = 20;
  c.blocks = 1000;
  c.thresholds = {0, 5};
  const auto out = run_command("oscillate", c);
  ASSERT_EQ(out.exit_code, kExitOk);
  const auto summary = Json::parse(file(out, "oscillate_summary.json"));
  EXPECT_EQ(summary["thresholds"][0]["both_fraction"], 1.0);
  EXPECT_EQ(summary["exact_block_distribution"]["mean"], "0");
  const auto csv = file(out, "oscillate_paths.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "seed,final_L,max,min,hit_time_+0,hit_time_-0,hit_time_+5,hit_time_-5");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
}

TEST(Oscillate, Period5EchoesZeroMean) {
  RunConfig c;
  c.measure = make_period_j(5);
  c.paths = 10;
  c.blocks = 500;
  const auto out = run_command("oscillate", c);
  ASSERT_EQ(out.exit_code, kExitOk);
  const auto summary = Json::parse(out.stdout_text);
  EXPECT_TRUE(summary["exact_block_distribution"]["zero_mean"].get<bool>());
  EXPECT_EQ(summary["exact_block_distribution"]["base"], 4);
}

TEST(Oscillate, ZeroBlocks) {
  RunConfig c;
  c.paths = 5;
  c.blocks = 0;
  c.thresholds = {0};
  const auto out = run_command("oscillate", c);
  const auto summary = Json::parse(out.stdout_text);
  EXPECT_EQ(summary["thresholds"][0]["both_fraction"], 1.0);
}

TEST(Oscillate, RejectsSparse) {
  RunConfig c;
  c.measure = make_sparse();
  EXPECT_EQ(run_command("oscillate", c).exit_code, kExitInvalidConfig);
}

TEST(Vanish, SmallRun) {
  RunConfig c;
  c.paths = 30;
  c.blocks = 6;
  const auto out = run_command("vanish", c);
  ASSERT_EQ(out.exit_code, kExitOk);
  const auto summary = Json::parse(file(out, "vanish_summary.json"));
  const auto& tails = summary["tail_bounds"];
  ASSERT_EQ(tails.size(), 6u);
  EXPECT_EQ(tails[1]["exact_tail"]["numerator"], "4501777129");
  EXPECT_EQ(tails[1]["interior_length"], "63");
  EXPECT_TRUE(tails[3]["exact_tail"].is_null());
  for (const auto& t : tails) {
    for (const char* key : {"k", "interior_length", "threshold", "exact_tail", "log2_upper", "chain"}) {
      EXPECT_TRUE(t.contains(key)) << key;
    }
  }
  // envelope nonincreasing and partial sums nondecreasing per path
  std::istringstream csv(file(out, "vanish_paths.csv"));
  std::string line;
  std::getline(csv, line);
  long prev_path = -1;
  long prev_env = 0;
  double prev_sum = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 10u);
    const long path = std::stol(f[0]);
    const long env = std::stol(f[6]);
    const double sum = std::stod(f[9]);
    if (path == prev_path) {
      EXPECT_LE(env, prev_env);
      EXPECT_GE(sum, prev_sum);
    }
    prev_path = path;
    prev_env = env;
    prev_sum = sum;
  }
}

TEST(Vanish, RejectsPeriodic) {
  RunConfig c;
  c.measure = make_period_j(3);
  EXPECT_EQ(run_command("vanish", c).exit_code, kExitInvalidConfig);
}

TEST(Trace, ExampleAndDeterminism) {
  RunConfig c;
  c.prefix = "101100";
  c.k = 3;
  const auto a = run_command("trace", c);
  const auto b = run_command("trace", c);
  EXPECT_EQ(a.stdout_text, b.stdout_text);
  EXPECT_NE(a.stdout_text.find("\n3,3,1,2,-1,"), std::string::npos);
  c.k = 0;
  const auto empty = run_command("trace", c);
  EXPECT_EQ(std::count(empty.stdout_text.begin(), empty.stdout_text.end(), '\n'), 2);
}

TEST(Trace, CapExceededDiagnostic) {
  RunConfig c;
  c.prefix = "0000";
  c.cap = 4;
  c.k = 1;
  const auto out = run_command("trace", c);
  EXPECT_EQ(out.exit_code, kExitCapExceeded);
  const auto j = Json::parse(out.stdout_text);
  EXPECT_EQ(j["cap"], 4);
}

TEST(Sweep, Range) {
  RunConfig c;
  c.j_min = 3;
  c.j_max = 5;
  c.paths = 10;
  c.blocks = 200;
  const auto out = run_command("sweep", c);
  ASSERT_EQ(out.exit_code, kExitOk);
  const auto j = Json::parse(out.stdout_text);
  EXPECT_EQ(j["periods"].size(), 3u);
  EXPECT_TRUE(j["all_zero_mean"].get<bool>());
  c.j_min = 2;
  EXPECT_EQ(run_command("sweep", c).exit_code, kExitInvalidConfig);
}

TEST(Commands, Deterministic) {
  RunConfig c;
  c.paths = 50;
  c.blocks = 3;
  const auto a = run_command("vanish", c);
  const auto b = run_command("vanish", c);
  EXPECT_EQ(a.files, b.files);
  EXPECT_EQ(run_command("nope", c).exit_code, kExitInvalidConfig);
}
