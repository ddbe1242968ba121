#ifndef NTSYM_CLI_CONFIG_HPP
#define NTSYM_CLI_CONFIG_HPP

// Run configuration: a TOML file with the sections [space], [potential],
// [measure], [system] and [run]. Parsing validates every key and names the
// offending one on failure; the resolved configuration has a canonical JSON
// form whose FNV-1a hash tags every output.

#include <toml.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "../bernoulli.hpp"
#include "../expansive.hpp"
#include "../potentials.hpp"
#include "../seqspace.hpp"

namespace ntsym::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PotentialConfig {
  bool present = false;
  PotentialKind kind = PotentialKind::first_coord;
  std::size_t depth = 1;
  std::vector<std::vector<double>> head, period;
  EnvelopePolicy policy = EnvelopePolicy::midpoint;
};

struct MeasureConfig {
  bool present = false;
  bool equilibrium = false;
  std::vector<std::vector<double>> head, period;
};

struct SystemConfig {
  bool present = false;
  std::string kind = "interval_expanding";  // or "shift"
  MetricConvention metric = MetricConvention::circle;
  std::size_t grid = 256;
  std::size_t horizon = 32;
  double delta = 0.25;
};

struct RunParams {
  std::size_t n_hi = 64;
  std::size_t n_lo = 0;  // 0: n_hi / 2
  std::size_t depth_max = 10;
  std::size_t N = 2;
  double tol = 1e-3;
  bool critical = true;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 100;
  std::size_t horizon = 1000;  // sample path length for measure diagnostics
  std::size_t points = 1000;   // coding points
  std::size_t steps = 20;      // semiconjugacy steps J
  std::size_t guard = 30;
  double eps = 0.2;            // orbit pressure radius
  std::size_t orbit_n = 8;
  std::vector<double> eps_ladder;
  std::optional<std::vector<std::string>> suite;
  std::string fault;
};

struct RunConfig {
  AlphabetSeq m = AlphabetSeq::constant(2);
  PotentialConfig potential;
  MeasureConfig measure;
  SystemConfig system;
  RunParams run;

  PotentialSeq make_potential() const {
    if (!potential.present) return PotentialSeq::zero(m);
    try {
      if (potential.kind == PotentialKind::first_coord) return PotentialSeq::first_coord(m, potential.head, potential.period);
      return PotentialSeq::depth_dependent(m, potential.depth, potential.head, potential.period);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("potential: ") + e.what());
    }
  }

  /// The configured measure, or the equilibrium state of the potential when
  /// [measure] asks for it. p_* = 0 surfaces as hypothesis_error.
  BernoulliSpec make_measure() const {
    if (!measure.present) throw ConfigError("measure: section [measure] is required for this command");
    if (measure.equilibrium && measure.head.empty() && measure.period.empty()) {
      return equilibrium_from_potential(make_potential(), potential.policy);
    }
    try {
      return BernoulliSpec(m, measure.head, measure.period);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("measure: ") + e.what());
    }
  }
};

namespace detail {

inline std::string key_path(const std::string& section, const std::string& key) { return section + "." + key; }

/// A table entry: a number, or a string "[+-][c*]log(x)".
inline double parse_real(const toml::node& node, const std::string& where) {
  if (auto v = node.value<double>()) return *v;
  if (auto s = node.value<std::string>()) {
    static const std::regex re(R"(^\s*([+-]?)\s*(?:([0-9.]+(?:[eE][+-]?[0-9]+)?)\s*\*\s*)?log\(\s*([0-9.]+(?:[eE][+-]?[0-9]+)?)\s*\)\s*$)");
    std::smatch mt;
    if (std::regex_match(*s, mt, re)) {
      const double c = mt[2].matched ? std::stod(mt[2].str()) : 1.0;
      const double x = std::stod(mt[3].str());
      if (x > 0.0) return (mt[1].str() == "-" ? -1.0 : 1.0) * c * std::log(x);
    }
    throw ConfigError("key '" + where + "': cannot read \"" + *s + "\" as a real (number or [c*]log(x))");
  }
  throw ConfigError("key '" + where + "': expected a number");
}

inline std::vector<double> parse_vector(const toml::node& node, const std::string& where) {
  const auto* arr = node.as_array();
  if (!arr) throw ConfigError("key '" + where + "': expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < arr->size(); ++i) out.push_back(parse_real(*arr->get(i), where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<std::vector<double>> parse_rows(const toml::node& node, const std::string& where) {
  const auto* arr = node.as_array();
  if (!arr) throw ConfigError("key '" + where + "': expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < arr->size(); ++i) out.push_back(parse_vector(*arr->get(i), where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<Symbol> parse_sizes(const toml::node& node, const std::string& where) {
  const auto* arr = node.as_array();
  if (!arr) throw ConfigError("key '" + where + "': expected an array of integers");
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    auto v = arr->get(i)->value<std::int64_t>();
    if (!v || *v < 2) throw ConfigError("key '" + where + "[" + std::to_string(i) + "]': alphabet sizes are integers >= 2");
    out.push_back(static_cast<Symbol>(*v));
  }
  return out;
}

inline std::size_t parse_count(const toml::node& node, const std::string& where, std::size_t min = 0) {
  auto v = node.value<std::int64_t>();
  if (!v || *v < static_cast<std::int64_t>(min)) {
    throw ConfigError("key '" + where + "': expected an integer >= " + std::to_string(min));
  }
  return static_cast<std::size_t>(*v);
}

inline double parse_positive(const toml::node& node, const std::string& where) {
  const double x = parse_real(node, where);
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("key '" + where + "': expected a positive number");
  return x;
}

inline bool parse_bool(const toml::node& node, const std::string& where) {
  auto v = node.value<bool>();
  if (!v) throw ConfigError("key '" + where + "': expected true or false");
  return *v;
}

inline std::string parse_string(const toml::node& node, const std::string& where) {
  auto v = node.value<std::string>();
  if (!v) throw ConfigError("key '" + where + "': expected a string");
  return *v;
}

inline void reject_unknown(const toml::table& t, const std::string& section, const std::set<std::string>& known) {
  for (const auto& [k, v] : t) {
    if (!known.count(std::string(k.str()))) throw ConfigError("key '" + key_path(section, std::string(k.str())) + "': unknown key");
  }
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  using namespace detail;
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw ConfigError(os.str());
  }
  reject_unknown(root, "<root>", {"space", "potential", "measure", "system", "run"});
  RunConfig c;

  auto section = [&](const char* name) -> const toml::table* {
    const auto* node = root.get(name);
    if (!node) return nullptr;
    if (!node->is_table()) throw ConfigError(std::string("key '") + name + "': expected a section");
    return node->as_table();
  };

  if (const auto* s = section("space")) {
    reject_unknown(*s, "space", {"head", "period"});
    std::vector<Symbol> head, period{2};
    if (const auto* n = s->get("head")) head = parse_sizes(*n, "space.head");
    if (const auto* n = s->get("period")) period = parse_sizes(*n, "space.period");
    if (period.empty()) throw ConfigError("key 'space.period': must be nonempty");
    c.m = AlphabetSeq(head, period);
  }

  if (const auto* s = section("potential")) {
    reject_unknown(*s, "potential", {"kind", "depth", "head", "period", "policy"});
    auto& p = c.potential;
    p.present = true;
    if (const auto* n = s->get("kind")) {
      const auto k = parse_string(*n, "potential.kind");
      if (k == "first_coord") p.kind = PotentialKind::first_coord;
      else if (k == "depth") p.kind = PotentialKind::depth;
      else throw ConfigError("key 'potential.kind': expected \"first_coord\" or \"depth\"");
    }
    if (const auto* n = s->get("depth")) p.depth = parse_count(*n, "potential.depth", 1);
    if (p.kind == PotentialKind::first_coord && p.depth != 1) {
      throw ConfigError("key 'potential.depth': first_coord potentials have depth 1");
    }
    if (const auto* n = s->get("head")) p.head = parse_rows(*n, "potential.head");
    if (const auto* n = s->get("period")) p.period = parse_rows(*n, "potential.period");
    else throw ConfigError("key 'potential.period': required");
    if (p.period.empty()) throw ConfigError("key 'potential.period': must be nonempty");
    if (const auto* n = s->get("policy")) {
      const auto v = parse_string(*n, "potential.policy");
      if (v == "lower") p.policy = EnvelopePolicy::lower;
      else if (v == "midpoint") p.policy = EnvelopePolicy::midpoint;
      else if (v == "upper") p.policy = EnvelopePolicy::upper;
      else throw ConfigError("key 'potential.policy': expected lower, midpoint or upper");
    }
  }

  if (const auto* s = section("measure")) {
    reject_unknown(*s, "measure", {"head", "period", "equilibrium"});
    auto& mc = c.measure;
    mc.present = true;
    if (const auto* n = s->get("equilibrium")) mc.equilibrium = parse_bool(*n, "measure.equilibrium");
    if (const auto* n = s->get("head")) mc.head = parse_rows(*n, "measure.head");
    if (const auto* n = s->get("period")) mc.period = parse_rows(*n, "measure.period");
    if (!mc.equilibrium && mc.period.empty()) throw ConfigError("key 'measure.period': required unless equilibrium = true");
    if (mc.equilibrium && !mc.period.empty()) {
      throw ConfigError("key 'measure.period': give either probability vectors or equilibrium = true, not both");
    }
  }

  if (const auto* s = section("system")) {
    reject_unknown(*s, "system", {"kind", "metric", "grid", "horizon", "delta"});
    auto& sc = c.system;
    sc.present = true;
    if (const auto* n = s->get("kind")) {
      sc.kind = parse_string(*n, "system.kind");
      if (sc.kind != "interval_expanding" && sc.kind != "shift") {
        throw ConfigError("key 'system.kind': expected \"interval_expanding\" or \"shift\"");
      }
    }
    if (const auto* n = s->get("metric")) {
      const auto v = parse_string(*n, "system.metric");
      if (v == "circle") sc.metric = MetricConvention::circle;
      else if (v == "interval") sc.metric = MetricConvention::interval;
      else throw ConfigError("key 'system.metric': expected \"circle\" or \"interval\"");
    }
    if (const auto* n = s->get("grid")) sc.grid = parse_count(*n, "system.grid", 2);
    if (const auto* n = s->get("horizon")) sc.horizon = parse_count(*n, "system.horizon", 1);
    if (const auto* n = s->get("delta")) sc.delta = parse_positive(*n, "system.delta");
  }

  if (const auto* s = section("run")) {
    reject_unknown(*s, "run", {"n_hi", "n_lo", "depth_max", "N", "tol", "critical", "seed", "samples", "horizon",
                               "points", "steps", "guard", "eps", "orbit_n", "eps_ladder", "suite", "fault"});
    auto& r = c.run;
    if (const auto* n = s->get("n_hi")) r.n_hi = parse_count(*n, "run.n_hi", 2);
    if (const auto* n = s->get("n_lo")) r.n_lo = parse_count(*n, "run.n_lo", 1);
    if (const auto* n = s->get("depth_max")) r.depth_max = parse_count(*n, "run.depth_max", 2);
    if (const auto* n = s->get("N")) r.N = parse_count(*n, "run.N", 0);
    if (const auto* n = s->get("tol")) r.tol = parse_positive(*n, "run.tol");
    if (const auto* n = s->get("critical")) r.critical = parse_bool(*n, "run.critical");
    if (const auto* n = s->get("seed")) r.seed = static_cast<std::uint64_t>(parse_count(*n, "run.seed", 0));
    if (const auto* n = s->get("samples")) r.samples = parse_count(*n, "run.samples", 1);
    if (const auto* n = s->get("horizon")) r.horizon = parse_count(*n, "run.horizon", 2);
    if (const auto* n = s->get("points")) r.points = parse_count(*n, "run.points", 1);
    if (const auto* n = s->get("steps")) r.steps = parse_count(*n, "run.steps", 0);
    if (const auto* n = s->get("guard")) r.guard = parse_count(*n, "run.guard", 1);
    if (const auto* n = s->get("eps")) r.eps = parse_positive(*n, "run.eps");
    if (const auto* n = s->get("orbit_n")) r.orbit_n = parse_count(*n, "run.orbit_n", 1);
    if (const auto* n = s->get("eps_ladder")) {
      r.eps_ladder = parse_vector(*n, "run.eps_ladder");
      for (double e : r.eps_ladder)
        if (!(e > 0.0)) throw ConfigError("key 'run.eps_ladder': entries must be positive");
    }
    if (const auto* n = s->get("suite")) {
      const auto* arr = n->as_array();
      if (!arr) throw ConfigError("key 'run.suite': expected an array of property names");
      std::vector<std::string> names;
      for (std::size_t i = 0; i < arr->size(); ++i) names.push_back(parse_string(*arr->get(i), "run.suite[" + std::to_string(i) + "]"));
      r.suite = names;
    }
    if (const auto* n = s->get("fault")) {
      r.fault = parse_string(*n, "run.fault");
      if (r.fault != "equilibrium denominator") throw ConfigError("key 'run.fault': expected \"equilibrium denominator\"");
    }
  }
  if (c.run.n_lo > c.run.n_hi) throw ConfigError("key 'run.n_lo': must not exceed run.n_hi");
  if (c.run.N > c.run.depth_max) throw ConfigError("key 'run.N': must not exceed run.depth_max");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

/// Canonical JSON of the resolved configuration (sorted keys, round-trip
/// doubles); the seed is part of it.
inline nlohmann::json canonical_json(const RunConfig& c) {
  using nlohmann::json;
  json j;
  j["space"] = {{"head", c.m.head()}, {"period", c.m.period()}};
  if (c.potential.present) {
    const auto& p = c.potential;
    j["potential"] = {{"kind", p.kind == PotentialKind::first_coord ? "first_coord" : "depth"},
                      {"depth", p.depth},
                      {"head", p.head},
                      {"period", p.period},
                      {"policy", to_string(p.policy)}};
  }
  if (c.measure.present) {
    j["measure"] = {{"equilibrium", c.measure.equilibrium}, {"head", c.measure.head}, {"period", c.measure.period}};
  }
  if (c.system.present) {
    const auto& s = c.system;
    j["system"] = {{"kind", s.kind}, {"metric", to_string(s.metric)}, {"grid", s.grid}, {"horizon", s.horizon}, {"delta", s.delta}};
  }
  const auto& r = c.run;
  j["run"] = {{"n_hi", r.n_hi},       {"n_lo", r.n_lo},       {"depth_max", r.depth_max},
              {"N", r.N},             {"tol", r.tol},         {"critical", r.critical},
              {"samples", r.samples}, {"horizon", r.horizon}, {"points", r.points},
              {"steps", r.steps},     {"guard", r.guard},     {"eps", r.eps},
              {"orbit_n", r.orbit_n}, {"eps_ladder", r.eps_ladder}, {"fault", r.fault}};
  j["run"]["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  j["run"]["suite"] = r.suite ? json(*r.suite) : json(nullptr);
  return j;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string config_hash(const RunConfig& c) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_json(c).dump())));
  return buf;
}

}  // namespace ntsym::cli

#endif  // NTSYM_CLI_CONFIG_HPP
