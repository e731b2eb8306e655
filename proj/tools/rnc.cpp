// rnc: command-line driver for the exact checks and the Monte Carlo exhibits.
//
//   rnc verify    [--config FILE] [--depth D] [--seed S] [--out DIR]
//   rnc oscillate [--paths N] [--blocks B] [--threshold T ...]
//   rnc vanish    [--paths N] [--blocks K]
//   rnc trace     [--prefix BITS] [--k K] [--seed S]
//   rnc sweep     [--j-min A] [--j-max B] [--paths N] [--blocks B]
//
// RNC_THREADS sets the worker count. Output never depends on it.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rnc/commands.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rnc::config_error("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

rnc::MeasureSpec named_measure(const std::string& name) {
  if (name == "sparse") return rnc::make_sparse();
  if (name == "fair") return rnc::make_fair();
  if (name.rfind("period", 0) == 0) {
    return rnc::make_period_j(rnc::detail::parse_u64("measure", name.substr(6)));
  }
  throw rnc::config_error("unknown measure '" + name + "' (periodJ, sparse, fair)");
}

void write_outputs(const rnc::CommandOutput& out, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : out.files) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw rnc::config_error("cannot write '" + name + "' under '" + dir + "'");
    f << content;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-deletion cocycles on Cantor space"};
  app.require_subcommand(1);

  std::string config_path, out_dir, seed_text, measure_name, prefix, convention;
  std::uint64_t paths = 0, blocks = 0, depth = 0, k = 0, j_min = 0, j_max = 0, cases = 0;
  std::vector<std::int64_t> thresholds;

  for (const char* name : {"verify", "oscillate", "vanish", "trace", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Key-value config file");
    sub->add_option("--seed", seed_text, "Master seed (decimal or 0x hex)");
    sub->add_option("--paths", paths, "Number of Monte Carlo paths");
    sub->add_option("--blocks", blocks, "Blocks per path");
    sub->add_option("--threshold", thresholds, "Hitting threshold(s) T");
    sub->add_option("--depth", depth, "Cylinder depth for exhaustive checks");
    sub->add_option("--out", out_dir, "Directory for output files");
    sub->add_option("--measure", measure_name, "periodJ, sparse or fair");
    sub->add_option("--k", k, "Geodesic steps for trace");
    sub->add_option("--prefix", prefix, "Explicit bit prefix for trace");
    sub->add_option("--j-min", j_min, "Smallest period for sweep");
    sub->add_option("--j-max", j_max, "Largest period for sweep");
    sub->add_option("--cases", cases, "Randomized transport cases for verify");
    sub->add_option("--convention", convention, "open_interval or full_length");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  auto given = [&](const char* flag) { return app.get_subcommands().front()->count(flag) > 0; };

  rnc::CommandOutput result;
  try {
    rnc::RunConfig c;
    if (!config_path.empty()) c = rnc::parse_config(read_file(config_path));
    if (given("--seed")) c.master_seed = rnc::parse_seed(seed_text);
    if (given("--paths")) c.paths = paths;
    if (given("--blocks")) c.blocks = blocks;
    if (given("--threshold")) c.thresholds = thresholds;
    if (given("--depth")) c.depth = depth;
    if (given("--out")) c.out = out_dir;
    if (given("--measure")) c.measure = named_measure(measure_name);
    if (given("--k")) c.k = k;
    if (given("--prefix")) c.prefix = prefix;
    if (given("--j-min")) c.j_min = j_min;
    if (given("--j-max")) c.j_max = j_max;
    if (given("--cases")) c.cases = cases;
    if (given("--convention")) c.convention = rnc::parse_convention(convention);
    result = rnc::run_command(command, c);
    if (!c.out.empty() && !result.files.empty()) write_outputs(result, c.out);
  } catch (const rnc::error& e) {
    result.exit_code = rnc::kExitInvalidConfig;
    result.stdout_text =
        rnc::Json{{"command", command}, {"error", "invalid_config"}, {"message", e.what()}}.dump(2) +
        "\n";
  } catch (const std::exception& e) {
    std::cerr << "rnc: " << e.what() << '\n';
    return 4;
  }
  std::cout << result.stdout_text;
  return result.exit_code;
}
