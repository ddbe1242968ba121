#ifndef NTSYM_CLI_VERIFY_HPP
#define NTSYM_CLI_VERIFY_HPP

// The `verify` suite: each property recomputes a library result by a
// separate, deliberately naive route on small instances and reports
// pass/fail with a counterexample when one is found.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "../bernoulli.hpp"
#include "../expansive.hpp"
#include "../potentials.hpp"
#include "../pressure.hpp"
#include "../seqspace.hpp"
#include "config.hpp"

namespace ntsym::cli {

struct PropertyResult {
  std::string name;
  bool pass = true;
  std::string detail;
  nlohmann::json counterexample;  // null when none
};

struct VerifyContext {
  const RunConfig& config;
  std::uint64_t seed;
};

namespace verify_detail {

inline std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

/// The equilibrium vectors of a, with the fault hook that inflates the
/// level-0 denominator by 1% and hands the lost mass to the last symbol.
inline BernoulliSpec equilibrium_vectors(const PotentialSeq& a, bool perturb_denominator) {
  auto mu = equilibrium_from_potential(a);
  if (!perturb_denominator) return mu;
  const std::size_t H = mu.vectors().head().size() + mu.vectors().period().size();
  std::vector<BernoulliSpec::Vector> head, period;
  for (std::size_t k = 0; k < H; ++k) head.push_back(mu.vector(k));
  for (std::size_t i = 0; i < mu.vectors().period().size(); ++i) period.push_back(mu.vector(H + i));
  const auto& row = a.table(0);
  const double z = log_sum_exp(row);
  auto& p = head[0];
  double used = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    p[i] = std::exp(row[i] - z) / 1.01;
    used += p[i];
  }
  p.back() = 1.0 - used;
  return BernoulliSpec(mu.alphabet(), std::move(head), std::move(period));
}

inline PotentialSeq first_coord_of(const RunConfig& c) { return reduce(c.make_potential(), c.potential.policy); }

/// Every prefix-free family of cylinders inside [u] with ranks in [N, D]
/// that covers [u] (cover) or is arbitrary, the empty family included
/// (packing).
inline void antichains(const AlphabetSeq& m, const Word& u, std::size_t N, std::size_t D, bool cover,
                       std::vector<std::vector<Word>>& out) {
  std::vector<std::vector<Word>> acc;
  if (u.size() < D) {
    acc.push_back({});
    for (Symbol c = 1; c <= m(u.level + u.size()); ++c) {
      std::vector<std::vector<Word>> sub, next;
      antichains(m, u.extended(c), N, D, cover, sub);
      for (const auto& x : acc)
        for (const auto& y : sub) {
          auto joined = x;
          joined.insert(joined.end(), y.begin(), y.end());
          next.push_back(std::move(joined));
        }
      acc = std::move(next);
    }
  } else if (!cover) {
    acc.push_back({});
  }
  if (u.size() >= N) acc.push_back({u});
  out = std::move(acc);
}

}  // namespace verify_detail

inline PropertyResult prop_capacity_formula(const VerifyContext& ctx) {
  PropertyResult r{"capacity_formula"};
  const auto a = verify_detail::first_coord_of(ctx.config);
  const auto est = sn_sequence(a, EnvelopePolicy::midpoint, 8);
  for (std::size_t n = 1; n <= 8; ++n) {
    std::vector<double> terms;
    for_each_word(a.alphabet(), 0, n, [&](const Word& w) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a.coefficient(j, w[j]);
      terms.push_back(s);
    });
    const double brute = log_sum_exp(terms) / static_cast<double>(n);
    if (!verify_detail::close_rel(brute, est.s_at(n), 1e-12)) {
      r.pass = false;
      r.counterexample = {{"n", n}, {"s_n", est.s_at(n)}, {"enumerated", brute}};
      break;
    }
  }
  r.detail = "s_n against word enumeration, n <= 8";
  return r;
}

inline PropertyResult prop_bowen_ball_rank(const VerifyContext&) {
  PropertyResult r{"bowen_ball_rank"};
  const ShiftSystem sys{AlphabetSeq::constant(2), 16};
  const auto centre = PointPrefix::periodic(0, {}, {1});
  for (std::size_t n = 1; n <= 6 && r.pass; ++n)
    for (std::size_t rr = 0; rr <= 4 && r.pass; ++rr)
      for (bool closed : {false, true}) {
        const double eps = std::exp(-static_cast<double>(rr));
        const std::size_t rank = bowen_ball_rank({n, eps, closed}).rank;
        for (std::size_t L = 0; L + n < 16; ++L) {
          std::vector<Symbol> h(L, 1);
          h.push_back(2);
          const double d = sys.bowen_metric(centre, PointPrefix::periodic(0, h, {1}), n);
          const bool inside = closed ? d <= eps : d < eps;
          if (inside != (L >= rank)) {
            r.pass = false;
            r.counterexample = {{"n", n}, {"r", rr}, {"closed", closed}, {"meet", L}, {"rank", rank}};
            break;
          }
        }
      }
  r.detail = "ball membership through the Bowen metric, n <= 6, eps = e^-r, r <= 4";
  return r;
}

inline PropertyResult prop_outer_measure_oracle(const VerifyContext& ctx) {
  PropertyResult r{"outer_measure_oracle"};
  const auto a = verify_detail::first_coord_of(ctx.config);
  constexpr std::size_t D = 3;
  RandomStream rng(ctx.seed, 101);
  std::size_t cases = 0;
  for (std::size_t t = 0; t < 20 && r.pass; ++t) {
    const double s = -1.0 + 4.0 * rng.uniform();
    const std::size_t N = static_cast<std::size_t>(rng.uniform() * (D + 1));
    const CylinderTree tree(a, D, Word{}, CylinderWeight::sup);
    for (bool cover : {true, false}) {
      std::vector<std::vector<Word>> fams;
      verify_detail::antichains(a.alphabet(), Word{}, N, D, cover, fams);
      double best = cover ? kInf : 0.0;
      for (const auto& fam : fams) {
        double sum = 0.0;
        for (const auto& u : fam) {
          double b = 0.0;
          for (std::size_t j = 0; j < u.size(); ++j) b += a.coefficient(j, u[j]);
          sum += std::exp(-static_cast<double>(u.size()) * s + b);
        }
        best = cover ? std::min(best, sum) : std::max(best, sum);
      }
      const double dp = cover ? tree.cover(s, N).value : tree.packing(s, N).value;
      ++cases;
      if (!verify_detail::close_rel(dp, best, 1e-12)) {
        r.pass = false;
        r.counterexample = {{"s", s}, {"N", N}, {"kind", cover ? "cover" : "packing"}, {"dp", dp}, {"enumerated", best}};
        break;
      }
    }
  }
  r.detail = "antichain DP against explicit enumeration at depth 3, " + std::to_string(cases) + " cases";
  return r;
}

inline PropertyResult prop_rank_uniformization(const VerifyContext& ctx) {
  PropertyResult r{"rank_uniformization"};
  const auto a = verify_detail::first_coord_of(ctx.config);
  const auto& m = a.alphabet();
  RandomStream rng(ctx.seed, 202);
  for (std::size_t t = 0; t < 30 && r.pass; ++t) {
    // Random disjoint cover: split leaves at random down to depth 4.
    std::vector<Word> cover{Word{}}, done;
    while (!cover.empty()) {
      Word u = cover.back();
      cover.pop_back();
      if (u.size() == 4 || (!u.empty() && rng.uniform() < 0.4)) {
        done.push_back(u);
        continue;
      }
      for (Symbol c = 1; c <= m(u.size()); ++c) cover.push_back(u.extended(c));
    }
    const double s = -1.0 + 3.0 * rng.uniform();
    for (auto dir : {UniformizeDirection::lower, UniformizeDirection::upper}) {
      const auto cert = rank_uniformize(done, a, s, dir);
      long double cover_sum = 0.0L, uni = 0.0L;
      std::vector<long double> ct, ut;
      for (const auto& u : done) ct.push_back(cylinder_weight(a, u, s));
      for_each_word(m, 0, cert.rank, [&](const Word& u) { ut.push_back(cylinder_weight(a, u, s)); });
      cover_sum = canonical_sum(ct);
      uni = canonical_sum(ut);
      const bool ok = dir == UniformizeDirection::lower ? cover_sum >= uni * (1.0L - 1e-15L)
                                                         : cover_sum <= uni * (1.0L + 1e-15L);
      if (!ok || cover_sum != cert.cover_sum || uni != cert.uniform_sum) {
        r.pass = false;
        r.counterexample = {{"s", s}, {"direction", dir == UniformizeDirection::lower ? "lower" : "upper"},
                            {"rank", cert.rank}, {"cover_size", done.size()}};
        break;
      }
    }
  }
  r.detail = "certificates re-summed for 30 random disjoint covers";
  return r;
}

inline PropertyResult prop_equilibrium_identity(const VerifyContext& ctx) {
  PropertyResult r{"equilibrium_identity"};
  const auto a = verify_detail::first_coord_of(ctx.config);
  const auto mu = equilibrium_from_potential(a);
  double worst = 0.0;
  for (std::size_t j = 0; j < a.horizon(); ++j) worst = std::max(worst, std::abs(equilibrium_residual(mu, a, j)));
  r.pass = worst <= 1e-12;
  r.detail = "max |H(p_j) + E a_j - log Z_j| = " + verify_detail::fmt_g(worst);
  if (!r.pass) r.counterexample = {{"residual", worst}};
  return r;
}

inline PropertyResult prop_gibbs_ratio(const VerifyContext& ctx) {
  PropertyResult r{"gibbs_ratio"};
  const auto a = verify_detail::first_coord_of(ctx.config);
  const bool fault = ctx.config.run.fault == "equilibrium denominator";
  const auto mu = verify_detail::equilibrium_vectors(a, fault);
  const std::size_t n = std::min<std::size_t>(ctx.config.run.horizon, 1000);
  const auto est = sn_sequence(a, EnvelopePolicy::midpoint, std::max<std::size_t>(n, 2));
  double worst = 0.0;
  for (std::size_t t = 0; t < 20 && r.pass; ++t) {
    const auto omega = sample_path(mu, ctx.seed, est.n_hi, 300 + t);
    const auto ratios = gibbs_ratio_path(mu, a, omega, est);
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      worst = std::max(worst, std::abs(ratios[k] - 1.0));
      if (std::abs(ratios[k] - 1.0) > 1e-10) {
        r.pass = false;
        r.counterexample = {{"sample", t}, {"n", k + 1}, {"ratio", ratios[k]}};
        break;
      }
    }
  }
  r.detail = std::string(fault ? "fault injected; " : "") + "max |ratio - 1| = " + verify_detail::fmt_g(worst);
  return r;
}

inline PropertyResult prop_lln(const VerifyContext& ctx) {
  PropertyResult r{"lln"};
  const auto& c = ctx.config;
  const BernoulliSpec mu = c.measure.present ? c.make_measure() : BernoulliSpec::uniform(c.m);
  const auto st = lln_diagnostic(mu, 2000, 200, ctx.seed);
  r.pass = st.verdict == Verdict::pass;
  r.detail = "mean " + std::to_string(st.mean) + " vs " + std::to_string(st.target) + ", " + to_string(st.verdict);
  if (!r.pass) r.counterexample = {{"mean", st.mean}, {"target", st.target}, {"std_error", st.std_error}};
  return r;
}

inline PropertyResult prop_coding_residual(const VerifyContext& ctx) {
  PropertyResult r{"coding_residual"};
  const IntervalNDS<long double> sys(ctx.config.m);
  RandomStream rng(ctx.seed, 404);
  long double worst = 0.0L;
  for (std::size_t t = 0; t < 200 && r.pass; ++t) {
    const long double x = static_cast<long double>(rng.uniform());
    const auto w = encode(sys, x, 50);
    const auto dec = decode(sys, w.curtail(40));
    const long double res = semiconjugacy_residual(sys, w, 20, 30);
    worst = std::max(worst, res);
    if (res > 1e-9L || std::abs(dec.value - x) > dec.error_bound) {
      r.pass = false;
      r.counterexample = {{"x", static_cast<double>(x)}, {"residual", static_cast<double>(res)}};
    }
  }
  r.detail = "200 points, J = 20, guard 30, max residual " + verify_detail::fmt_g(static_cast<double>(worst));
  return r;
}

inline PropertyResult prop_homogeneity(const VerifyContext& ctx) {
  PropertyResult r{"homogeneity"};
  const auto f = ctx.config.make_potential();
  const auto rep = homogeneity_check(f, Word{0, {1}}, 40);
  r.pass = rep.within_envelope;
  r.detail = "u = 1, n <= 40, max |difference| = " + std::to_string(rep.max_difference);
  if (!r.pass) r.counterexample = {{"max_difference", rep.max_difference}};
  return r;
}

using Property = std::function<PropertyResult(const VerifyContext&)>;

inline const std::vector<std::pair<std::string, Property>>& property_registry() {
  static const std::vector<std::pair<std::string, Property>> reg{
      {"capacity_formula", prop_capacity_formula},
      {"bowen_ball_rank", prop_bowen_ball_rank},
      {"outer_measure_oracle", prop_outer_measure_oracle},
      {"rank_uniformization", prop_rank_uniformization},
      {"equilibrium_identity", prop_equilibrium_identity},
      {"gibbs_ratio", prop_gibbs_ratio},
      {"lln", prop_lln},
      {"coding_residual", prop_coding_residual},
      {"homogeneity", prop_homogeneity},
  };
  return reg;
}

}  // namespace ntsym::cli

#endif  // NTSYM_CLI_VERIFY_HPP
