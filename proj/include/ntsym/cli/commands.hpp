#ifndef NTSYM_CLI_COMMANDS_HPP
#define NTSYM_CLI_COMMANDS_HPP

// Subcommands of the ntsym tool. Each writes its files into the output
// directory, tags them with the config hash and seed, and returns the
// process exit code:
//   0 ok, 1 a verified property failed, 2 configuration error,
//   3 undetermined critical exponent, 4 hypothesis violation.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "../bernoulli.hpp"
#include "../errors.hpp"
#include "../expansive.hpp"
#include "../potentials.hpp"
#include "../pressure.hpp"
#include "../seqspace.hpp"
#include "config.hpp"
#include "verify.hpp"

namespace ntsym::cli {

enum ExitCode : int { kOk = 0, kPropertyFailed = 1, kConfigError = 2, kUndetermined = 3, kHypothesis = 4 };

/// Digits used for the encode/decode roundtrip check.
inline constexpr std::size_t kRoundtripDigits = 40;

struct Options {
  std::string command;
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> depth;
  std::optional<std::pair<std::size_t, std::size_t>> window;
};

/// "LO..HI" with 1 <= LO <= HI.
inline std::pair<std::size_t, std::size_t> parse_window(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw ConfigError("--window: expected LO..HI, got '" + s + "'");
  try {
    std::size_t used = 0;
    const auto lo = std::stoull(s.substr(0, dots), &used);
    if (used != dots) throw std::invalid_argument(s);
    const auto rest = s.substr(dots + 2);
    const auto hi = std::stoull(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
    if (lo < 1 || hi < 2 || lo > hi) throw std::invalid_argument(s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw ConfigError("--window: expected LO..HI with 1 <= LO <= HI and HI >= 2, got '" + s + "'");
  }
}

class Session {
 public:
  Session(const Options& opt, RunConfig config, std::ostream& out)
      : opt_(opt), config_(std::move(config)), out_(out), hash_(config_hash(config_)) {}

  const RunConfig& config() const { return config_; }
  const std::string& hash() const { return hash_; }

  std::uint64_t require_seed() const {
    if (!config_.run.seed) throw ConfigError("key 'run.seed': this command is randomized and needs an explicit seed");
    return *config_.run.seed;
  }

  std::string seed_text() const { return config_.run.seed ? std::to_string(*config_.run.seed) : "none"; }

  /// A manifest from a different configuration in the same directory means
  /// the outputs would mix two runs.
  void check_replay() const {
    const auto path = std::filesystem::path(opt_.out_dir) / "run.json";
    if (!std::filesystem::exists(path)) return;
    std::ifstream in(path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("mismatched replay: unreadable manifest " + path.string());
    }
    const auto old = j.value("config_hash", std::string{});
    if (old != hash_) {
      throw ConfigError("mismatched replay: " + path.string() + " records config hash " + old + ", this run has " + hash_);
    }
  }

  void write_csv_file(const std::string& name, const std::string& body) {
    write_file(name, "# command=" + opt_.command + " config_hash=" + hash_ + " seed=" + seed_text() + "\n" + body);
  }

  void write_json_file(const std::string& name, nlohmann::json body) {
    body["config_hash"] = hash_;
    body["seed"] = config_.run.seed ? nlohmann::json(*config_.run.seed) : nlohmann::json(nullptr);
    body["command"] = opt_.command;
    write_file(name, body.dump(2) + "\n");
  }

  void write_manifest(int exit_code) {
    nlohmann::json j;
    j["config_hash"] = hash_;
    j["config"] = canonical_json(config_);
    j["files"] = files_;
    j["exit_code"] = exit_code;
    j["command"] = opt_.command;
    std::ofstream(std::filesystem::path(opt_.out_dir) / "run.json") << j.dump(2) << "\n";
  }

  std::ostream& out() { return out_; }

 private:
  void write_file(const std::string& name, const std::string& text) {
    std::filesystem::create_directories(opt_.out_dir);
    std::ofstream f(std::filesystem::path(opt_.out_dir) / name, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + name);
    files_.push_back(name);
  }

  Options opt_;
  RunConfig config_;
  std::ostream& out_;
  std::string hash_;
  std::vector<std::string> files_;
};

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline nlohmann::json estimate_json(const PressureEstimate& e) {
  return {{"n_lo", e.n_lo},
          {"n_hi", e.n_hi},
          {"s_n_hi", e.s.back()},
          {"liminf_bracket", e.liminf_bracket},
          {"limsup_bracket", e.limsup_bracket},
          {"cauchy_gap", e.cauchy_gap}};
}

inline std::string estimate_csv(const PressureEstimate& e) {
  std::ostringstream os;
  write_csv(os, e);
  return os.str();
}

/// Capacity sequence plus Bowen and packing critical exponents.
inline int cmd_pressure(Session& ss, bool entropy) {
  const auto& c = ss.config();
  const auto f = entropy ? PotentialSeq::zero(c.m) : c.make_potential();
  const auto est = sn_sequence(f, c.potential.policy, c.run.n_hi, c.run.n_lo);
  ss.write_csv_file(entropy ? "entropy.csv" : "pressure.csv", estimate_csv(est));

  nlohmann::json summary;
  summary["mode"] = entropy ? "entropy" : "pressure";
  summary["policy"] = to_string(c.potential.policy);
  summary["estimate"] = estimate_json(est);
  int code = kOk;
  if (c.run.critical) {
    nlohmann::json crit;
    for (auto kind : {OuterMeasureKind::bowen, OuterMeasureKind::packing}) {
      const auto r = critical_s(f, kind, c.run.N, c.run.depth_max, Word{}, c.run.tol);
      crit[to_string(kind)] = {{"lower", r.lower},           {"upper", r.upper}, {"determined", r.determined},
                               {"iterations", r.iterations}, {"note", r.note},   {"N", c.run.N},
                               {"depth_max", c.run.depth_max}};
      if (!r.determined) code = kUndetermined;
    }
    summary["critical_s"] = crit;
  }
  ss.write_json_file(entropy ? "entropy_summary.json" : "pressure_summary.json", summary);
  ss.out() << (entropy ? "entropy" : "pressure") << " bracket [" << fmt17(est.liminf_bracket) << ", "
           << fmt17(est.limsup_bracket) << "] over n in [" << est.n_lo << ", " << est.n_hi << "]\n";
  if (code == kUndetermined) ss.out() << "critical exponent undetermined at depth " << c.run.depth_max << "\n";
  return code;
}

/// Measure-theoretic brackets, LLN diagnostic, and for equilibrium specs the
/// identity and Gibbs checks.
inline int cmd_measure(Session& ss, bool force_equilibrium) {
  auto c = ss.config();
  if (force_equilibrium) {
    c.measure = MeasureConfig{true, true, {}, {}};
  }
  const std::uint64_t seed = ss.require_seed();
  const auto mu = c.make_measure();
  const auto f = c.make_potential();
  const auto hyp = hypotheses(mu, f);
  const auto est = measure_pressure_sequence(mu, f, c.run.n_hi, c.run.n_lo);
  ss.write_csv_file("measure.csv", estimate_csv(est));

  const auto st = lln_diagnostic(mu, f, c.run.horizon, c.run.samples, seed);
  std::ostringstream samples;
  samples << "sample,value\n";
  for (std::size_t t = 0; t < st.values.size(); ++t) samples << t << "," << fmt17(st.values[t]) << "\n";
  ss.write_csv_file("samples.csv", samples.str());

  nlohmann::json summary;
  summary["estimate"] = estimate_json(est);
  summary["hypotheses"] = {{"p_star", hyp.p_star},
                           {"sup_norm", hyp.sup_norm},
                           {"clause_a", hyp.clause_a},
                           {"pointwise_convergent", hyp.pointwise_convergent}};
  summary["lln"] = {{"n", st.n},          {"samples", st.samples},     {"mean", st.mean},
                    {"target", st.target}, {"std_error", st.std_error}, {"distance", st.distance},
                    {"verdict", to_string(st.verdict)}};
  int code = kOk;
  if (c.measure.equilibrium) {
    const auto a = reduce(f, c.potential.policy);
    double identity = 0.0;
    for (std::size_t j = 0; j < a.horizon(); ++j) identity = std::max(identity, std::abs(equilibrium_residual(mu, a, j)));
    const auto cap = sn_sequence(a, EnvelopePolicy::midpoint, c.run.n_hi, c.run.n_lo);
    const double bracket_gap = std::max(std::abs(cap.liminf_bracket - est.liminf_bracket),
                                        std::abs(cap.limsup_bracket - est.limsup_bracket));
    const auto gibbs_est = sn_sequence(a, EnvelopePolicy::midpoint, std::max<std::size_t>(c.run.horizon, 2));
    double gibbs = 0.0;
    for (std::size_t t = 0; t < std::min<std::size_t>(c.run.samples, 100); ++t) {
      const auto omega = sample_path(mu, seed, gibbs_est.n_hi, 1000 + t);
      for (double r : gibbs_ratio_path(mu, a, omega, gibbs_est)) gibbs = std::max(gibbs, std::abs(r - 1.0));
    }
    const bool pass = identity <= 1e-12 && gibbs <= 1e-10 && bracket_gap <= 1e-12;
    nlohmann::json eq;
    eq["head"] = mu.vectors().head();
    eq["period"] = mu.vectors().period();
    summary["equilibrium"] = {{"identity_residual", identity},
                              {"bracket_gap", bracket_gap},
                              {"gibbs_max_deviation", gibbs},
                              {"verdict", pass ? "pass" : "fail"},
                              {"vectors", eq}};
    if (!pass) code = kPropertyFailed;
    ss.out() << "equilibrium identity residual " << fmt17(identity) << ", Gibbs deviation " << fmt17(gibbs) << ": "
             << (pass ? "pass" : "fail") << "\n";
  }
  ss.write_json_file(force_equilibrium ? "equilibrium_summary.json" : "measure_summary.json", summary);
  ss.out() << "measure bracket [" << fmt17(est.liminf_bracket) << ", " << fmt17(est.limsup_bracket) << "], LLN "
           << to_string(st.verdict) << " (seed " << seed << ")\n";
  return code;
}

/// Coding of the interval system, expansiveness, sue constants and
/// orbit-based pressure; the shift system gets the falsifier and sue only.
inline int cmd_code(Session& ss) {
  const auto& c = ss.config();
  if (!c.system.present) throw ConfigError("system: section [system] is required for this command");
  const std::uint64_t seed = ss.require_seed();
  const auto& sc = c.system;
  std::vector<double> ladder = c.run.eps_ladder;
  nlohmann::json summary;
  summary["system"] = sc.kind;

  if (sc.kind == "shift") {
    const ShiftSystem sys{c.m, std::max<std::size_t>(sc.horizon, 8)};
    RandomStream rng(seed, 0);
    std::vector<std::pair<PointPrefix, PointPrefix>> pairs;
    for (std::size_t t = 0; t < c.run.points; ++t) {
      std::vector<Symbol> a, b;
      const auto split = static_cast<std::size_t>(rng.uniform() * static_cast<double>(sys.max_depth));
      for (std::size_t j = 0; j < sys.max_depth; ++j) {
        const Symbol s = rng.draw(std::vector<double>(c.m(j), 1.0 / c.m(j)));
        a.push_back(s);
        b.push_back(j < split ? s : (j == split ? s % c.m(j) + 1 : rng.draw(std::vector<double>(c.m(j), 1.0 / c.m(j)))));
      }
      pairs.emplace_back(PointPrefix::finite(0, a), PointPrefix::finite(0, b));
    }
    const auto v = expansiveness_falsifier(sys, sc.delta, pairs, sys.max_depth);
    std::size_t mismatches = 0;
    for (const auto& s : v.separation) mismatches += s.index != s.meet;
    if (ladder.empty()) ladder = {std::exp(-1.0), std::exp(-2.0), std::exp(-4.0)};
    nlohmann::json sue = nlohmann::json::array();
    for (const auto& e : sue_modulus(sys, sc.delta, ladder))
      sue.push_back({{"eps", e.eps}, {"N", e.N == kNoIndex ? nlohmann::json(nullptr) : nlohmann::json(e.N)}});
    summary["expansiveness"] = {{"delta", sc.delta},
                                {"pairs_checked", v.pairs_checked},
                                {"counterexample", v.counterexample},
                                {"index_differs_from_meet", mismatches}};
    summary["sue"] = sue;
    ss.write_json_file("code_summary.json", summary);
    ss.out() << "shift: " << v.pairs_checked << " pairs, counterexample " << (v.counterexample ? "found" : "none")
             << "\n";
    return kOk;
  }

  const IntervalNDS<long double> sys(c.m, sc.metric);
  RandomStream rng(seed, 0);
  std::ostringstream csv;
  csv << "index,x,roundtrip_error,error_bound,residual\n";
  long double worst_res = 0.0L, worst_ratio = 0.0L;
  for (std::size_t t = 0; t < c.run.points; ++t) {
    const long double x = static_cast<long double>(rng.uniform());
    const auto w = encode(sys, x, c.run.steps + c.run.guard);
    const auto dec = decode(sys, encode(sys, x, kRoundtripDigits));
    const long double err = std::abs(dec.value - x);
    const long double res = semiconjugacy_residual(sys, w, c.run.steps, c.run.guard);
    worst_res = std::max(worst_res, res);
    worst_ratio = std::max(worst_ratio, err / dec.error_bound);
    csv << t << "," << fmt17(static_cast<double>(x)) << "," << fmt17(static_cast<double>(err)) << ","
        << fmt17(static_cast<double>(dec.error_bound)) << "," << fmt17(static_cast<double>(res)) << "\n";
  }
  ss.write_csv_file("code.csv", csv.str());

  const auto v = expansiveness_falsifier(sys, static_cast<long double>(sc.delta), sc.horizon, sc.grid);
  if (ladder.empty()) ladder = {sc.delta / 2, sc.delta / 8, sc.delta / 32};
  nlohmann::json sue = nlohmann::json::array();
  for (const auto& e : sue_modulus(sys, static_cast<long double>(sc.delta), ladder, sc.grid, 4 * sc.horizon))
    sue.push_back({{"eps", e.eps}, {"N", e.N == kNoIndex ? nlohmann::json(nullptr) : nlohmann::json(e.N)}});
  const auto op = pressure_via_orbits(sys, c.make_potential(), c.run.orbit_n, static_cast<long double>(c.run.eps));

  summary["metric"] = to_string(sc.metric);
  summary["coding"] = {{"points", c.run.points},
                       {"steps", c.run.steps},
                       {"guard", c.run.guard},
                       {"max_residual", static_cast<double>(worst_res)},
                       {"roundtrip_digits", kRoundtripDigits},
                       {"max_roundtrip_over_bound", static_cast<double>(worst_ratio)}};
  summary["expansiveness"] = {{"delta", sc.delta},
                              {"grid", sc.grid},
                              {"horizon", sc.horizon},
                              {"pairs_checked", v.pairs_checked},
                              {"counterexample", v.counterexample},
                              {"max_separation_index", v.max_index}};
  if (v.witness) summary["expansiveness"]["witness"] = {static_cast<double>(v.witness->first), static_cast<double>(v.witness->second)};
  summary["sue"] = sue;
  summary["orbit_pressure"] = {{"n", op.n},
                               {"eps", op.eps},
                               {"grid", op.grid},
                               {"separated_count", op.separated_count},
                               {"spanning_count", op.spanning_count},
                               {"rate_P", op.rate_P},
                               {"rate_Q", op.rate_Q},
                               {"symbolic_s_n", op.symbolic_s_n}};
  ss.write_json_file("code_summary.json", summary);
  ss.out() << "coding residual " << fmt17(static_cast<double>(worst_res)) << " over " << c.run.points
           << " points; expansiveness counterexample " << (v.counterexample ? "found" : "none") << "\n";
  return kOk;
}

inline int cmd_verify(Session& ss) {
  const auto& c = ss.config();
  const auto& reg = property_registry();
  std::vector<std::string> names;
  if (c.run.suite) {
    names = *c.run.suite;
    if (names.empty()) throw ConfigError("key 'run.suite': empty suite selection");
    for (const auto& n : names) {
      const bool known = std::any_of(reg.begin(), reg.end(), [&](const auto& p) { return p.first == n; });
      if (!known) throw ConfigError("key 'run.suite': unknown property '" + n + "'");
    }
  } else {
    for (const auto& p : reg) names.push_back(p.first);
  }
  const VerifyContext ctx{c, ss.require_seed()};
  nlohmann::json report = nlohmann::json::array();
  bool all = true;
  for (const auto& [name, prop] : reg) {
    if (std::find(names.begin(), names.end(), name) == names.end()) continue;
    const auto r = prop(ctx);
    all = all && r.pass;
    report.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"counterexample", r.counterexample}});
    ss.out() << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
  }
  ss.write_json_file("verify.json", {{"properties", report}, {"all_pass", all}, {"fault", c.run.fault}});
  return all ? kOk : kPropertyFailed;
}

/// Loads the config, applies flag overrides, dispatches, and maps errors to
/// exit codes.
inline int run(const Options& opt, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> commands{"pressure", "entropy", "measure", "equilibrium", "code", "verify"};
  if (std::find(commands.begin(), commands.end(), opt.command) == commands.end()) {
    err << "error: unknown command '" << opt.command << "'\n";
    return kConfigError;
  }
  try {
    RunConfig config = opt.config_path.empty() ? parse_config("", "<defaults>") : load_config(opt.config_path);
    if (opt.seed) config.run.seed = opt.seed;
    if (opt.depth) {
      if (*opt.depth < 2 || *opt.depth < config.run.N) throw ConfigError("--depth: must be >= 2 and >= run.N");
      config.run.depth_max = *opt.depth;
    }
    if (opt.window) {
      config.run.n_lo = opt.window->first;
      config.run.n_hi = opt.window->second;
    }
    Session ss(opt, std::move(config), out);
    ss.check_replay();
    int code = kOk;
    try {
      if (opt.command == "pressure") code = cmd_pressure(ss, false);
      else if (opt.command == "entropy") code = cmd_pressure(ss, true);
      else if (opt.command == "measure") code = cmd_measure(ss, false);
      else if (opt.command == "equilibrium") code = cmd_measure(ss, true);
      else if (opt.command == "code") code = cmd_code(ss);
      else code = cmd_verify(ss);
    } catch (const hypothesis_error& e) {
      err << "hypothesis violation: " << e.what() << "\n";
      return kHypothesis;
    }
    ss.write_manifest(code);
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const depth_error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kPropertyFailed;
  }
}

}  // namespace ntsym::cli

#endif  // NTSYM_CLI_COMMANDS_HPP
