#pragma once

// Flat "key = value" configuration files.
//
//   # comment
//   schema_version = 1
//   master_seed = 20261016
//   measure.variant = periodic
//   measure.period = 3
//   measure.residue.1 = 1/2,1/2      (override of the make_period_j rule)
//
// Writing always produces the canonical form: fixed key order, one space
// around '=', no comments. parse(write(c)) == c and write(parse(t)) == t for
// canonical t.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rnc/bitspace.hpp"
#include "rnc/error.hpp"
#include "rnc/measures.hpp"
#include "rnc/nullsets.hpp"
#include "rnc/rational.hpp"

namespace rnc {

inline constexpr int kSchemaVersion = 1;

using KeyValues = std::map<std::string, std::string, std::less<>>;

inline KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw config_error("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw config_error("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

namespace detail {

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    return parse_seed(value);
  } catch (const error&) {
    throw config_error("key '" + key + "': expected an unsigned integer, got '" + value + "'");
  }
}

inline std::int64_t parse_i64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': expected an integer, got '" + value + "'");
  }
}

inline std::string marginal_text(const Marginal& m) {
  return to_string(m.p0()) + "," + to_string(m.p1());
}

/// "p0,p1" with validation of the invariant p0 + p1 = 1.
inline Marginal parse_marginal(const std::string& key, const std::string& value) {
  const auto comma = value.find(',');
  if (comma == std::string::npos) {
    throw config_error("key '" + key + "': expected 'p0,p1', got '" + value + "'");
  }
  try {
    return Marginal::make(parse_rational(value.substr(0, comma)),
                          parse_rational(value.substr(comma + 1)));
  } catch (const invalid_parameter& e) {
    throw config_error("key '" + key + "': " + e.what());
  }
}

// Reads `prefix.0`, `prefix.1`, ... with exactly `count` entries.
inline std::vector<Marginal> parse_marginal_list(KeyValues& kv, const std::string& prefix,
                                                 std::uint64_t count) {
  std::vector<Marginal> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string key = prefix + std::to_string(i);
    auto it = kv.find(key);
    if (it == kv.end()) throw config_error("missing key '" + key + "'");
    out.push_back(parse_marginal(key, it->second));
    kv.erase(it);
  }
  return out;
}

}  // namespace detail

/// Canonical measure.* entries, in write order.
inline std::vector<std::pair<std::string, std::string>> measure_entries(const MeasureSpec& spec) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("measure.variant", to_string(spec.kind()));
  switch (spec.kind()) {
    case MeasureKind::periodic: {
      const std::uint64_t j = spec.period();
      out.emplace_back("measure.period", std::to_string(j));
      const MeasureSpec base = make_period_j(j);
      for (std::uint64_t r = 0; r < j; ++r) {
        if (!(spec.residues()[r] == base.residues()[r])) {
          out.emplace_back("measure.residue." + std::to_string(r),
                           detail::marginal_text(spec.residues()[r]));
        }
      }
      break;
    }
    case MeasureKind::sparse:
      break;
    case MeasureKind::custom:
      if (spec.declared_base()) out.emplace_back("measure.base", std::to_string(*spec.declared_base()));
      out.emplace_back("measure.head_length", std::to_string(spec.head().size()));
      for (std::size_t i = 0; i < spec.head().size(); ++i) {
        out.emplace_back("measure.head." + std::to_string(i), detail::marginal_text(spec.head()[i]));
      }
      out.emplace_back("measure.tail_length", std::to_string(spec.tail().size()));
      for (std::size_t i = 0; i < spec.tail().size(); ++i) {
        out.emplace_back("measure.tail." + std::to_string(i), detail::marginal_text(spec.tail()[i]));
      }
      break;
  }
  return out;
}

/// Consumes every measure.* key from kv; unknown measure.* keys are errors.
inline std::optional<MeasureSpec> take_measure(KeyValues& kv) {
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto variant = take("measure.variant");
  if (!variant) {
    for (const auto& [key, value] : kv) {
      if (key.rfind("measure.", 0) == 0) throw config_error("'" + key + "' without measure.variant");
    }
    return std::nullopt;
  }
  std::optional<MeasureSpec> spec;
  if (*variant == "periodic") {
    auto period = take("measure.period");
    if (!period) throw config_error("periodic measure needs measure.period");
    const std::uint64_t j = detail::parse_u64("measure.period", *period);
    if (j < 3) throw config_error("measure.period must be at least 3");
    std::vector<Marginal> residues = make_period_j(j).residues();
    for (std::uint64_t r = 0; r < j; ++r) {
      const std::string key = "measure.residue." + std::to_string(r);
      if (auto v = take(key)) residues[r] = detail::parse_marginal(key, *v);
    }
    spec = MeasureSpec::periodic(std::move(residues));
  } else if (*variant == "sparse") {
    spec = make_sparse();
  } else if (*variant == "custom") {
    std::optional<std::uint64_t> base;
    if (auto b = take("measure.base")) base = detail::parse_u64("measure.base", *b);
    auto head_len = take("measure.head_length");
    auto tail_len = take("measure.tail_length");
    if (!tail_len) throw config_error("custom measure needs measure.tail_length");
    auto head = detail::parse_marginal_list(
        kv, "measure.head.", head_len ? detail::parse_u64("measure.head_length", *head_len) : 0);
    auto tail =
        detail::parse_marginal_list(kv, "measure.tail.", detail::parse_u64("measure.tail_length", *tail_len));
    try {
      spec = MeasureSpec::custom(std::move(head), std::move(tail), base);
    } catch (const invalid_parameter& e) {
      throw config_error(e.what());
    }
  } else {
    throw config_error("unknown measure.variant '" + *variant + "'");
  }
  for (const auto& [key, value] : kv) {
    if (key.rfind("measure.", 0) == 0) throw config_error("unknown key '" + key + "'");
  }
  return spec;
}

inline std::string write_measure(const MeasureSpec& spec) {
  std::string out;
  for (const auto& [k, v] : measure_entries(spec)) out += k + " = " + v + "\n";
  return out;
}

inline MeasureSpec parse_measure(std::string_view text) {
  KeyValues kv = parse_key_values(text);
  auto spec = take_measure(kv);
  if (!spec) throw config_error("no measure.variant given");
  if (!kv.empty()) throw config_error("unknown key '" + kv.begin()->first + "'");
  return *spec;
}

// ---------------------------------------------------------------------------

inline BlockConvention parse_convention(std::string_view text) {
  if (text == "open_interval") return BlockConvention::open_interval;
  if (text == "full_length") return BlockConvention::full_length;
  throw config_error("unknown block_convention '" + std::string(text) + "'");
}

/// Everything a CLI run depends on. Unset optionals fall back to per-command
/// defaults.
struct RunConfig {
  std::uint64_t master_seed = 20261016;
  std::optional<MeasureSpec> measure;
  std::optional<std::uint64_t> paths;
  std::optional<std::uint64_t> blocks;
  std::vector<std::int64_t> thresholds{10};
  std::uint64_t compare_blocks = 10000;  // shorter horizon reported next to `blocks`
  std::uint64_t depth = 6;
  std::uint64_t k = 12;
  std::string prefix;
  std::uint64_t j_min = 3;
  std::uint64_t j_max = 8;
  std::uint64_t cases = 500;
  std::string envelope_bound = "1/32768";
  std::string sum_bound = "1";
  BlockConvention convention = BlockConvention::open_interval;
  std::uint64_t cap = kDefaultCap;
  std::string out;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline std::string write_config(const RunConfig& c) {
  std::ostringstream o;
  o << "schema_version = " << kSchemaVersion << '\n';
  o << "master_seed = " << c.master_seed << '\n';
  if (c.measure) o << write_measure(*c.measure);
  if (c.paths) o << "paths = " << *c.paths << '\n';
  if (c.blocks) o << "blocks = " << *c.blocks << '\n';
  o << "thresholds = ";
  for (std::size_t i = 0; i < c.thresholds.size(); ++i) o << (i ? "," : "") << c.thresholds[i];
  o << '\n';
  o << "compare_blocks = " << c.compare_blocks << '\n';
  o << "depth = " << c.depth << '\n';
  o << "k = " << c.k << '\n';
  if (!c.prefix.empty()) o << "prefix = " << c.prefix << '\n';
  o << "j_min = " << c.j_min << '\n';
  o << "j_max = " << c.j_max << '\n';
  o << "cases = " << c.cases << '\n';
  o << "envelope_bound = " << c.envelope_bound << '\n';
  o << "sum_bound = " << c.sum_bound << '\n';
  o << "block_convention = " << to_string(c.convention) << '\n';
  o << "cap = " << c.cap << '\n';
  if (!c.out.empty()) o << "out = " << c.out << '\n';
  return o.str();
}

inline RunConfig parse_config(std::string_view text) {
  KeyValues kv = parse_key_values(text);
  RunConfig c;
  auto version = kv.find("schema_version");
  if (version == kv.end()) throw config_error("missing schema_version");
  if (detail::parse_i64("schema_version", version->second) != kSchemaVersion) {
    throw config_error("unsupported schema_version " + version->second);
  }
  kv.erase(version);
  c.measure = take_measure(kv);

  for (const auto& [key, value] : kv) {
    if (key == "master_seed") c.master_seed = detail::parse_u64(key, value);
    else if (key == "paths") c.paths = detail::parse_u64(key, value);
    else if (key == "blocks") c.blocks = detail::parse_u64(key, value);
    else if (key == "thresholds") {
      c.thresholds.clear();
      std::string item;
      std::istringstream list(value);
      while (std::getline(list, item, ',')) c.thresholds.push_back(detail::parse_i64(key, item));
    } else if (key == "compare_blocks") c.compare_blocks = detail::parse_u64(key, value);
    else if (key == "depth") c.depth = detail::parse_u64(key, value);
    else if (key == "k") c.k = detail::parse_u64(key, value);
    else if (key == "prefix") c.prefix = BitPrefix::parse(value).str();
    else if (key == "j_min") c.j_min = detail::parse_u64(key, value);
    else if (key == "j_max") c.j_max = detail::parse_u64(key, value);
    else if (key == "cases") c.cases = detail::parse_u64(key, value);
    else if (key == "envelope_bound") c.envelope_bound = to_string(parse_rational(value));
    else if (key == "sum_bound") c.sum_bound = to_string(parse_rational(value));
    else if (key == "block_convention") c.convention = parse_convention(value);
    else if (key == "cap") c.cap = detail::parse_u64(key, value);
    else if (key == "out") c.out = value;
    else throw config_error("unknown key '" + key + "'");
  }
  return c;
}

}  // namespace rnc
