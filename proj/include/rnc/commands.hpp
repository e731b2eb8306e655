#pragma once

// The work behind each CLI subcommand. Every command is a pure function of its
// RunConfig: it returns the files it would write and the text for stdout, and
// never looks at the clock or the thread count.

#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rnc/bitspace.hpp"
#include "rnc/cocycle.hpp"
#include "rnc/config.hpp"
#include "rnc/error.hpp"
#include "rnc/hash.hpp"
#include "rnc/measures.hpp"
#include "rnc/mtp_oracle.hpp"
#include "rnc/nullsets.hpp"
#include "rnc/walkstats.hpp"

namespace rnc {

using Json = nlohmann::ordered_json;

struct CommandOutput {
  int exit_code = 0;
  std::vector<std::pair<std::string, std::string>> files;  // name -> contents
  std::string stdout_text;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitCapExceeded = 3;

namespace detail {

inline Json rational_json(const Rational& r) {
  return Json{{"numerator", numerator_of(r).str()}, {"denominator", denominator_of(r).str()}};
}

inline Json measure_json(const MeasureSpec& spec) {
  Json j = Json::object();
  for (const auto& [k, v] : measure_entries(spec)) j[k.substr(std::string("measure.").size())] = v;
  if (auto b = spec.power_base()) j["power_base"] = *b;
  return j;
}

inline Json distribution_json(const BlockIncrementDistribution& d) {
  Json law = Json::array();
  for (std::size_t i = 0; i < d.support.size(); ++i) {
    law.push_back({{"increment", d.support[i]}, {"probability", to_string(d.probs[i])}});
  }
  return Json{{"base", d.base},
              {"law", law},
              {"mean", to_string(d.mean)},
              {"variance", to_string(d.variance)},
              {"zero_mean", d.mean == 0}};
}

// Accumulates one check entry of the verify report.
struct CheckTally {
  CheckTally(std::string c, std::string f) : check(std::move(c)), family(std::move(f)) {}

  std::string check;
  std::string family;
  std::uint64_t cases = 0;
  Rational max_abs_residual = 0;
  std::vector<std::string> failing;

  void record(const std::string& id, const Rational& residual) {
    ++cases;
    const Rational a = residual < 0 ? Rational(-residual) : residual;
    if (a > max_abs_residual) max_abs_residual = a;
    if (residual != 0) failing.push_back(id);
  }
  void record(const std::string& id, bool ok) { record(id, ok ? Rational(0) : Rational(1)); }

  Json json() const {
    return Json{{"check", check},
                {"family", family},
                {"cases", cases},
                {"max_abs_residual", to_string(max_abs_residual)},
                {"pass", failing.empty()},
                {"failing_cases", failing}};
  }
};

inline std::vector<NamedMeasure> verify_families(const RunConfig& c) {
  auto families = standard_families();
  if (c.measure) families.push_back({"config", *c.measure});
  return families;
}

}  // namespace detail

/// Exact-oracle suite: RN derivatives on cylinders, the transport identity
/// (exhaustive at depth 4 and randomized), cocycle formula vs. composition,
/// the chain rule, and exact zero-mean block laws.
inline CommandOutput cmd_verify(const RunConfig& c) {
  if (c.depth == 0 || c.depth > kMaxOracleDepth) {
    throw config_error("depth must be in [1, 12] for verify");
  }
  const auto families = detail::verify_families(c);
  std::vector<detail::CheckTally> tallies;

  for (const auto& fam : families) {
    detail::CheckTally t{"rn_derivative_depth" + std::to_string(c.depth), fam.name};
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << c.depth); ++code) {
      const BitPrefix cyl = BitPrefix::from_code(code, c.depth);
      for (std::uint64_t n = 0; n < c.depth; ++n) {
        t.record("n=" + std::to_string(n) + ",C=" + cyl.str(),
                 pushforward_cylinder(fam.spec, n, cyl).residual);
      }
    }
    tallies.push_back(std::move(t));
  }

  for (const auto& fam : families) {
    detail::CheckTally t{"mtp_exhaustive_depth4", fam.name};
    for (std::uint64_t mask = 0; mask < 16; ++mask) {
      FlipBijection gamma;
      for (std::uint64_t n = 0; n < 4; ++n) {
        if (mask >> n & 1U) gamma.flips.insert(n);
      }
      std::vector<std::optional<BitPrefix>> domains{std::nullopt};
      for (std::size_t len = 1; len <= 2; ++len) {
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << len); ++code) {
          domains.emplace_back(BitPrefix::from_code(code, len));
        }
      }
      for (const auto& dom : domains) {
        gamma.domain = dom;
        for (std::uint64_t cell = 0; cell <= 16; ++cell) {
          SimpleFunction g;
          if (cell < 16) {
            g = SimpleFunction::indicator(BitPrefix::from_code(cell, 4), 4);
          } else {
            std::vector<Rational> v(16);
            for (std::size_t i = 0; i < 16; ++i) v[i] = Rational(static_cast<std::int64_t>(i) - 7, 3);
            g = SimpleFunction(4, std::move(v));
          }
          t.record("flips=" + std::to_string(mask) + ",dom=" + (dom ? dom->str() : "*") +
                       ",g=" + std::to_string(cell),
                   verify_mtp(fam.spec, gamma, g).residual);
        }
      }
    }
    tallies.push_back(std::move(t));
  }

  Json mtp_cases = Json::array();
  {
    detail::CheckTally t{"mtp_randomized", "all"};
    CounterRng rng(derive_seed(c.master_seed, 0x6d7470));
    for (std::uint64_t i = 0; i < c.cases; ++i) {
      const MtpCase mc = random_mtp_case(rng, families.size());
      const MtpResult r = verify_mtp(families[mc.family].spec, mc.gamma, mc.g);
      const std::string id = "case" + std::to_string(i);
      t.record(id, r.residual);
      mtp_cases.push_back({{"case", id},
                           {"family", families[mc.family].name},
                           {"depth", mc.g.depth},
                           {"flips", mc.gamma.flips},
                           {"domain", mc.gamma.domain ? mc.gamma.domain->str() : "*"},
                           {"lhs", to_string(r.lhs)},
                           {"rhs", to_string(r.rhs)},
                           {"residual", to_string(r.residual)},
                           {"pass", r.pass}});
    }
    tallies.push_back(std::move(t));
  }

  for (const auto& fam : families) {
    detail::CheckTally formula{"cocycle_formula_vs_composition", fam.name};
    detail::CheckTally chain{"cocycle_chain_rule", fam.name};
    const auto measure = std::make_shared<const MeasureSpec>(fam.spec);
    CounterRng rng(derive_seed(c.master_seed, 0x636f63));
    for (std::uint64_t s = 0; s < c.cases; ++s) {
      const BitSequence x(BitPrefix{}, derive_seed(c.master_seed, s), measure, c.cap);
      BitSequence y = x;
      CocycleValue composed;
      for (std::uint64_t k = 1; k <= 12; ++k) {
        const std::uint64_t n = first_one_index(y);
        composed *= flip_weight(fam.spec, y, n);
        y = bit_flip(y, n);
        formula.record("seed" + std::to_string(s) + ",k=" + std::to_string(k),
                       geodesic_cocycle(fam.spec, x, k).value() - composed.value());
      }
      const std::uint64_t k = rng.below(11), m = rng.below(11);
      chain.record("seed" + std::to_string(s) + ",k=" + std::to_string(k) + ",m=" + std::to_string(m),
                   chain_rule_check(fam.spec, x, k, m));
    }
    tallies.push_back(std::move(formula));
    tallies.push_back(std::move(chain));
  }

  {
    detail::CheckTally t{"block_mean_zero", "period_j"};
    for (std::uint64_t j = 3; j <= 12; ++j) {
      t.record("j=" + std::to_string(j), exact_block_distribution(make_period_j(j)).mean);
    }
    const auto d3 = exact_block_distribution(make_period_j(3));
    const bool law_ok = d3.support == std::vector<std::int64_t>{-1, 0, 1, 2} &&
                        d3.prob(-1) == Rational(8, 27) && d3.prob(0) == Rational(12, 27) &&
                        d3.prob(1) == Rational(6, 27) && d3.prob(2) == Rational(1, 27);
    t.record("j=3 law", law_ok);
    tallies.push_back(std::move(t));
  }

  Json checks = Json::array();
  bool all = true;
  for (const auto& t : tallies) {
    checks.push_back(t.json());
    all = all && t.failing.empty();
  }
  Json report{{"command", "verify"},
              {"master_seed", c.master_seed},
              {"depth", c.depth},
              {"cases", c.cases},
              {"checks", checks},
              {"pass", all}};
  CommandOutput out;
  out.exit_code = all ? kExitOk : kExitCheckFailed;
  out.stdout_text = report.dump(2) + "\n";
  out.files.emplace_back("verify_report.json", out.stdout_text);
  out.files.emplace_back("mtp_cases.json", mtp_cases.dump(2) + "\n");
  return out;
}

/// Oscillation exhibit for a periodic measure.
inline CommandOutput cmd_oscillate(const RunConfig& c) {
  const MeasureSpec spec = c.measure.value_or(make_period_j(3));
  if (spec.kind() != MeasureKind::periodic) {
    throw config_error("oscillate needs a periodic measure");
  }
  const std::uint64_t paths = c.paths.value_or(1000);
  const std::uint64_t blocks = c.blocks.value_or(100000);
  const auto dist = exact_block_distribution(spec);
  const OscillationReport rep = oscillation_report(spec, c.master_seed, paths, blocks, c.thresholds);

  std::ostringstream csv;
  csv << "seed,final_L,max,min";
  for (auto t : rep.thresholds) csv << ",hit_time_+" << t << ",hit_time_-" << t;
  csv << '\n';
  for (const auto& p : rep.paths) {
    csv << p.seed << ',' << p.final_value << ',' << p.running_max << ',' << p.running_min;
    for (auto t : rep.thresholds) {
      csv << ',';
      if (auto h = p.hit_time(t)) csv << *h;
      csv << ',';
      if (auto h = p.hit_time(-t)) csv << *h;
    }
    csv << '\n';
  }

  Json per_threshold = Json::array();
  const std::uint64_t compare = std::min(c.compare_blocks, blocks);
  for (const auto& s : rep.summary) {
    Json entry{{"threshold", s.threshold},
               {"up_fraction", paths ? static_cast<double>(s.up_count) / paths : 0.0},
               {"down_fraction", paths ? static_cast<double>(s.down_count) / paths : 0.0},
               {"both_fraction", s.both_fraction},
               {"both_count", s.both_count},
               {"compare_blocks", compare},
               {"both_fraction_at_compare", both_sided_fraction(rep.paths, s.threshold, compare)}};
    entry["median_hit_time"] = s.median_time ? Json(*s.median_time) : Json(nullptr);
    entry["q90_hit_time"] = s.q90_time ? Json(*s.q90_time) : Json(nullptr);
    per_threshold.push_back(entry);
  }
  Json summary{{"command", "oscillate"},
               {"measure", detail::measure_json(spec)},
               {"period", spec.period()},
               {"exact_block_distribution", detail::distribution_json(dist)},
               {"master_seed", c.master_seed},
               {"paths", paths},
               {"blocks", blocks},
               {"thresholds", per_threshold}};
  CommandOutput out;
  out.stdout_text = summary.dump(2) + "\n";
  out.files.emplace_back("oscillate_paths.csv", csv.str());
  out.files.emplace_back("oscillate_summary.json", out.stdout_text);
  return out;
}

namespace detail {

inline Json tail_json(const TailBound& tb) {
  Json chain = Json::array();
  for (const auto& link : tb.chain) {
    Json l{{"name", link.name}, {"log2", link.log2}};
    if (link.exact) l["exact_log2"] = log2_of(*link.exact);
    chain.push_back(l);
  }
  Json j{{"k", tb.k},
         {"convention", to_string(tb.convention)},
         {"interior_length", tb.interior_length.str()},
         {"threshold", tb.threshold.str()}};
  j["exact_tail"] = tb.exact_tail ? rational_json(*tb.exact_tail) : Json(nullptr);
  j["exact_tail_log2"] = tb.exact_tail ? Json(log2_of(*tb.exact_tail)) : Json(nullptr);
  j["log2_upper"] = tb.log2_upper;
  j["log2_upper_exponent"] = tb.log2_upper_exponent.str();
  j["chain_exponent"] = tb.chain_exponent.str();
  if (tb.exact_tail) j["chain_holds"] = tb.chain_holds();
  j["chain"] = chain;
  return j;
}

}  // namespace detail

/// Vanishing / nonsummability exhibit for the sparse measure.
inline CommandOutput cmd_vanish(const RunConfig& c) {
  if (c.measure && c.measure->kind() != MeasureKind::sparse) {
    throw config_error("vanish needs the sparse measure");
  }
  const std::uint64_t paths = c.paths.value_or(10000);
  const std::uint64_t blocks = c.blocks.value_or(10);
  if (blocks == 0 || blocks > 16) throw config_error("vanish needs 1 <= blocks <= 16");
  const auto K = static_cast<unsigned>(blocks);
  const VanishingReport rep = vanishing_report(c.master_seed, paths, K, parse_rational(c.envelope_bound),
                                               parse_rational(c.sum_bound));

  std::ostringstream csv;
  csv << "path,seed,k,special_bit,ones_count,approximate,envelope_log2,envelope_numerator,"
         "envelope_denominator,partial_sum\n";
  for (std::size_t i = 0; i < rep.paths.size(); ++i) {
    const auto& tr = rep.paths[i];
    for (std::size_t b = 0; b < tr.blocks.size(); ++b) {
      const auto& blk = tr.blocks[b];
      const Rational& w = blk.weight_at_entry.value();
      csv << i << ',' << tr.seed << ',' << blk.k << ',' << blk.special_bit << ',' << blk.ones_count
          << ',' << (blk.approximate ? 1 : 0) << ',' << *blk.weight_at_entry.log() << ','
          << numerator_of(w) << ',' << denominator_of(w) << ','
          << to_decimal_string(tr.partial_sums[b]) << '\n';
    }
  }

  Json tails = Json::array();
  for (unsigned k = 1; k <= 6; ++k) tails.push_back(detail::tail_json(tail_bound(k, c.convention)));
  const SpecialZeroSum zero = special_zero_summability();
  const Rational summ = tail_summability_report(6, c.convention);
  Json summary{
      {"command", "vanish"},
      {"master_seed", c.master_seed},
      {"paths", paths},
      {"blocks", K},
      {"block_convention", to_string(c.convention)},
      {"tail_bounds", tails},
      {"tail_summability_K6", {{"value", to_string(summ)}, {"decimal", to_decimal_string(summ)}}},
      {"special_zero_sum",
       {{"terms", zero.terms},
        {"partial_decimal", to_decimal_string(zero.partial)},
        {"tail_bound", to_string(zero.tail_bound)},
        {"certified_upper_decimal", to_decimal_string(zero.certified_upper)}}},
      {"envelope_bound", to_string(rep.envelope_bound)},
      {"envelope_fraction", rep.fraction(rep.envelope_count)},
      {"sum_bound", to_string(rep.sum_bound)},
      {"sum_fraction", rep.fraction(rep.sum_count)},
      {"all_special_hits",
       {{"from_k", rep.hits_from},
        {"to_k", rep.hits_to},
        {"fraction", rep.fraction(rep.all_hits_count)},
        {"exact_probability", to_string(rep.all_hits_probability)},
        {"exact_probability_decimal", to_decimal_string(rep.all_hits_probability)}}}};
  CommandOutput out;
  out.stdout_text = summary.dump(2) + "\n";
  out.files.emplace_back("vanish_paths.csv", csv.str());
  out.files.emplace_back("vanish_summary.json", out.stdout_text);
  return out;
}

/// Cocycle values along the geodesic of one point.
inline CommandOutput cmd_trace(const RunConfig& c) {
  const MeasureSpec spec = c.measure.value_or(make_period_j(3));
  const BitSequence x(BitPrefix::parse(c.prefix), c.master_seed,
                      std::make_shared<const MeasureSpec>(spec), c.cap);
  std::ostringstream csv;
  write_trace_csv(geodesic_trace(spec, x, c.k), csv);
  CommandOutput out;
  out.stdout_text = csv.str();
  out.files.emplace_back("trace.csv", csv.str());
  return out;
}

/// Exact block laws and a short oscillation run for each period j in range.
inline CommandOutput cmd_sweep(const RunConfig& c) {
  if (c.j_min < 3 || c.j_max < c.j_min) throw config_error("sweep needs 3 <= j_min <= j_max");
  if (c.j_max > 24) throw config_error("sweep enumerates blocks exactly; j_max must be <= 24");
  const std::uint64_t paths = c.paths.value_or(200);
  const std::uint64_t blocks = c.blocks.value_or(10000);
  Json rows = Json::array();
  bool all = true;
  for (std::uint64_t j = c.j_min; j <= c.j_max; ++j) {
    const MeasureSpec spec = make_period_j(j);
    const auto dist = exact_block_distribution(spec);
    all = all && dist.mean == 0;
    const auto rep = oscillation_report(spec, derive_seed(c.master_seed, j), paths, blocks, c.thresholds);
    Json fractions = Json::array();
    for (const auto& s : rep.summary) {
      fractions.push_back({{"threshold", s.threshold}, {"both_fraction", s.both_fraction}});
    }
    rows.push_back({{"j", j},
                    {"exact_block_distribution", detail::distribution_json(dist)},
                    {"oscillation", fractions}});
  }
  Json summary{{"command", "sweep"},
               {"master_seed", c.master_seed},
               {"paths", paths},
               {"blocks", blocks},
               {"periods", rows},
               {"all_zero_mean", all}};
  CommandOutput out;
  out.exit_code = all ? kExitOk : kExitCheckFailed;
  out.stdout_text = summary.dump(2) + "\n";
  out.files.emplace_back("sweep.json", out.stdout_text);
  return out;
}

/// Runs a named subcommand and maps library errors to the exit-code contract.
inline CommandOutput run_command(const std::string& name, const RunConfig& c) {
  try {
    if (name == "verify") return cmd_verify(c);
    if (name == "oscillate") return cmd_oscillate(c);
    if (name == "vanish") return cmd_vanish(c);
    if (name == "trace") return cmd_trace(c);
    if (name == "sweep") return cmd_sweep(c);
    throw config_error("unknown command '" + name + "'");
  } catch (const cap_exceeded& e) {
    CommandOutput out;
    out.exit_code = kExitCapExceeded;
    out.stdout_text = Json{{"command", name}, {"error", "cap_exceeded"}, {"cap", e.cap()},
                           {"message", e.what()}}.dump(2) + "\n";
    return out;
  } catch (const error& e) {
    CommandOutput out;
    out.exit_code = kExitInvalidConfig;
    out.stdout_text =
        Json{{"command", name}, {"error", "invalid_config"}, {"message", e.what()}}.dump(2) + "\n";
    return out;
  }
}

}  // namespace rnc
