#ifndef NTSYM_BERNOULLI_HPP
#define NTSYM_BERNOULLI_HPP

// Nonautonomous Bernoulli measures mu([u]_k) = prod_j p_{j, u_j}, their
// local entropies and pressures along sampled points, and the Bernoulli
// equilibrium states p_{j,i} = e^{a_{j,i}} / sum_i e^{a_{j,i}}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "periodic.hpp"
#include "potentials.hpp"
#include "pressure.hpp"
#include "seqspace.hpp"

namespace ntsym {

class BernoulliSpec {
 public:
  using Vector = std::vector<double>;

  BernoulliSpec() = default;

  BernoulliSpec(AlphabetSeq m, std::vector<Vector> head, std::vector<Vector> period)
      : m_(std::move(m)), vectors_(std::move(head), std::move(period)) {
    const std::size_t h = joint_horizon(m_.head().size(), m_.period().size(), vectors_.head().size(),
                                        vectors_.period().size());
    for (std::size_t j = 0; j < h; ++j) {
      const auto& p = vectors_(j);
      if (p.size() != m_(j)) {
        throw std::invalid_argument("probability vector at level " + std::to_string(j) + " has dimension " +
                                    std::to_string(p.size()) + ", alphabet size is " + std::to_string(m_(j)));
      }
      double sum = 0.0;
      for (double x : p) {
        if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("probabilities must be finite and >= 0");
        sum += x;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("probability vector at level " + std::to_string(j) + " sums to " +
                                    std::to_string(sum));
      }
    }
    p_star_ = std::numeric_limits<double>::infinity();
    for (const auto& p : vectors_.head()) p_star_ = std::min(p_star_, *std::min_element(p.begin(), p.end()));
    for (const auto& p : vectors_.period()) p_star_ = std::min(p_star_, *std::min_element(p.begin(), p.end()));
    if (!(p_star_ > 0.0)) throw hypothesis_error("probability vectors must be strictly positive (p_* = 0)");
  }

  static BernoulliSpec uniform(const AlphabetSeq& m) {
    auto row = [](Symbol s) { return Vector(s, 1.0 / static_cast<double>(s)); };
    std::vector<Vector> h, p;
    for (auto s : m.head()) h.push_back(row(s));
    for (auto s : m.period()) p.push_back(row(s));
    return BernoulliSpec(m, std::move(h), std::move(p));
  }

  const AlphabetSeq& alphabet() const noexcept { return m_; }
  const Vector& vector(std::size_t j) const { return vectors_(j); }
  double p(std::size_t j, Symbol i) const { return vectors_(j)[i - 1]; }
  const EventuallyPeriodic<Vector>& vectors() const noexcept { return vectors_; }

  /// p_* = inf over represented entries.
  double p_star() const noexcept { return p_star_; }

 private:
  AlphabetSeq m_;
  EventuallyPeriodic<Vector> vectors_;
  double p_star_ = 0.0;
};

inline double log_cylinder_measure(const BernoulliSpec& mu, const Word& u) {
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += std::log(mu.p(u.level + j, u[j]));
  return acc;
}

inline double cylinder_measure(const BernoulliSpec& mu, const Word& u) {
  require_valid(mu.alphabet(), u);
  double acc = 1.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc *= mu.p(u.level + j, u[j]);
  return acc;
}

/// H(p_j) in nats.
inline double entropy_H(const BernoulliSpec& mu, std::size_t j) {
  double h = 0.0;
  for (double p : mu.vector(j)) h -= p * std::log(p);
  return h;
}

/// E_mu[f_j] for f_j read from level j on.
inline double expected_potential(const BernoulliSpec& mu, const PotentialSeq& f, std::size_t j) {
  if (f.kind() == PotentialKind::first_coord) {
    double e = 0.0;
    for (Symbol i = 1; i <= mu.alphabet()(j); ++i) e += mu.p(j, i) * f.coefficient(j, i);
    return e;
  }
  double e = 0.0;
  for_each_word(mu.alphabet(), j, f.depth(), [&](const Word& w) {
    e += std::exp(log_cylinder_measure(mu, w)) * f.value(j, w.symbols);
  });
  return e;
}

// ---------------------------------------------------------------------------
// Sampling

/// Independent random stream for task `task` of a run seeded by `seed`.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t task) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(task), static_cast<std::uint32_t>(task >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) from the top 53 bits, identical on every platform.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  Symbol draw(std::span<const double> p) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      acc += p[i];
      if (u < acc) return static_cast<Symbol>(i + 1);
    }
    return static_cast<Symbol>(p.size());
  }

 private:
  std::mt19937_64 engine_;
};

/// A mu-random point resolved to depth n, independent across levels.
inline PointPrefix sample_path(const BernoulliSpec& mu, std::uint64_t seed, std::size_t n, std::uint64_t task = 0,
                               std::size_t level = 0) {
  if (n == 0) throw std::invalid_argument("sample_path: n must be >= 1");
  RandomStream rng(seed, task);
  std::vector<Symbol> s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = rng.draw(mu.vector(level + j));
  return PointPrefix::finite(level, std::move(s));
}

// ---------------------------------------------------------------------------
// Local entropy and pressure

/// -(1/t) sum_{j<t} log p_{j, omega_j} for t = 1..n.
inline std::vector<double> local_entropy_seq(const BernoulliSpec& mu, const PointPrefix& omega, std::size_t n) {
  if (!omega.resolvable(n)) throw depth_error("local_entropy_seq: prefix too short");
  std::vector<double> out;
  out.reserve(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc -= std::log(mu.p(omega.level() + j, omega[j]));
    out.push_back(acc / static_cast<double>(j + 1));
  }
  return out;
}

/// (1/t) sum_{j<t} (f_j(sigma^j omega) - log p_{j, omega_j}) for t = 1..n.
inline std::vector<double> local_pressure_seq(const BernoulliSpec& mu, const PotentialSeq& f,
                                              const PointPrefix& omega, std::size_t n) {
  const std::size_t need = n + f.depth() - 1;
  if (!omega.resolvable(need)) throw depth_error("local_pressure_seq: prefix too short");
  const Word w = omega.curtail(need);
  std::vector<double> out;
  out.reserve(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = omega.level() + j;
    acc += f.value(k, std::span<const Symbol>(w.symbols).subspan(j)) - std::log(mu.p(k, w[j]));
    out.push_back(acc / static_cast<double>(j + 1));
  }
  return out;
}

/// (1/n) sum_{j<n} (H(p_j) + E f_j) for n = 1..n_hi as a bracket record.
inline PressureEstimate measure_pressure_sequence(const BernoulliSpec& mu, const PotentialSeq& f, std::size_t n_hi,
                                                  std::size_t n_lo = 0) {
  std::vector<double> s;
  s.reserve(n_hi);
  double acc = 0.0;
  for (std::size_t j = 0; j < n_hi; ++j) {
    acc += entropy_H(mu, j) + expected_potential(mu, f, j);
    s.push_back(acc / static_cast<double>(j + 1));
  }
  return make_estimate(std::move(s), n_lo);
}

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/// pass within 3 standard errors, fail beyond 5, inconclusive in between.
/// Distances at rounding level pass outright (degenerate, zero-variance cases).
inline Verdict z_verdict(double distance, double std_error, double scale) {
  if (distance <= 1e-12 * std::max(1.0, std::abs(scale))) return Verdict::pass;
  if (!(std_error > 0.0)) return Verdict::fail;
  const double z = distance / std_error;
  if (z <= 3.0) return Verdict::pass;
  if (z <= 5.0) return Verdict::inconclusive;
  return Verdict::fail;
}

struct SampleStats {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t samples = 0;
  double mean = 0.0;
  double variance = 0.0;   // sample variance of the per-sample values
  double std_error = 0.0;  // sqrt(variance / samples)
  double target = 0.0;     // (1/n) sum (H(p_j) + E f_j)
  double distance = 0.0;   // |mean - target|
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> values;  // per-sample value at horizon n
};

/// Empirical mean over `samples` mu-random points of the local pressure at
/// horizon n (local entropy when f is zero), against its expectation.
inline SampleStats lln_diagnostic(const BernoulliSpec& mu, const PotentialSeq& f, std::size_t n, std::size_t samples,
                                  std::uint64_t seed) {
  if (n == 0 || samples == 0) throw std::invalid_argument("lln_diagnostic: n and samples must be positive");
  SampleStats st;
  st.seed = seed;
  st.n = n;
  st.samples = samples;
  st.values.resize(samples);
  const std::size_t need = n + f.depth() - 1;
  for (std::size_t t = 0; t < samples; ++t) {
    const auto omega = sample_path(mu, seed, need, t);
    st.values[t] = local_pressure_seq(mu, f, omega, n).back();
  }
  double sum = 0.0;
  for (double v : st.values) sum += v;
  st.mean = sum / static_cast<double>(samples);
  double ss = 0.0;
  for (double v : st.values) ss += (v - st.mean) * (v - st.mean);
  st.variance = samples > 1 ? ss / static_cast<double>(samples - 1) : 0.0;
  st.std_error = std::sqrt(st.variance / static_cast<double>(samples));
  st.target = measure_pressure_sequence(mu, f, n, n).s.back();
  st.distance = std::abs(st.mean - st.target);
  st.verdict = z_verdict(st.distance, st.std_error, st.target);
  return st;
}

inline SampleStats lln_diagnostic(const BernoulliSpec& mu, std::size_t n, std::size_t samples, std::uint64_t seed) {
  return lln_diagnostic(mu, PotentialSeq::zero(mu.alphabet()), n, samples, seed);
}

// ---------------------------------------------------------------------------
// Equilibrium states

/// p_{j,i} = e^{a_{j,i}} / sum_i e^{a_{j,i}} with a chosen by policy.
inline BernoulliSpec equilibrium_from_potential(const PotentialSeq& f,
                                                EnvelopePolicy policy = EnvelopePolicy::midpoint) {
  const auto a = reduce(f, policy);
  auto softmax = [](const PotentialSeq::Table& row) {
    const double z = log_sum_exp(row);
    BernoulliSpec::Vector p(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) p[i] = std::exp(row[i] - z);
    return p;
  };
  std::vector<BernoulliSpec::Vector> h, p;
  for (const auto& row : a.tables().head()) h.push_back(softmax(row));
  for (const auto& row : a.tables().period()) p.push_back(softmax(row));
  return BernoulliSpec(a.alphabet(), std::move(h), std::move(p));
}

/// H(p_j) + sum_i p_{j,i} a_{j,i} - log sum_i e^{a_{j,i}}; zero for the
/// equilibrium state of a.
inline double equilibrium_residual(const BernoulliSpec& mu, const PotentialSeq& first_coord, std::size_t j) {
  return entropy_H(mu, j) + expected_potential(mu, first_coord, j) - log_partition(first_coord, j);
}

/// mu([omega|n]) / exp(-proxy + S_n f(omega)).
inline double gibbs_ratio(const BernoulliSpec& mu, const PotentialSeq& f, const PointPrefix& omega, std::size_t n,
                          double proxy) {
  const double log_mass = log_cylinder_measure(mu, omega.curtail(n));
  return std::exp(log_mass + proxy - birkhoff_sum(f, omega, n));
}

/// Gibbs ratios for n = 1..N along one point, with proxy(n) = n * s_n.
inline std::vector<double> gibbs_ratio_path(const BernoulliSpec& mu, const PotentialSeq& f, const PointPrefix& omega,
                                            const PressureEstimate& est) {
  const std::size_t N = est.n_hi;
  const std::size_t need = N + f.depth() - 1;
  if (!omega.resolvable(need)) throw depth_error("gibbs_ratio_path: prefix too short");
  const Word w = omega.curtail(need);
  std::vector<double> out;
  out.reserve(N);
  double log_mass = 0.0, birk = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    const std::size_t k = omega.level() + j;
    log_mass += std::log(mu.p(k, w[j]));
    birk += f.value(k, std::span<const Symbol>(w.symbols).subspan(j));
    out.push_back(std::exp(log_mass + static_cast<double>(j + 1) * est.s[j] - birk));
  }
  return out;
}

/// Which clause of the measure-theoretic pressure formula the representation
/// satisfies.
struct HypothesisReport {
  double p_star = 0.0;
  double sup_norm = 0.0;
  bool clause_a = false;  // p_* > 0 and ||f|| < inf
  /// f_k(sigma^k omega) converges for every omega; decided only for tables
  /// that are eventually constant in k and in the symbol.
  bool pointwise_convergent = false;
};

inline HypothesisReport hypotheses(const BernoulliSpec& mu, const PotentialSeq& f) {
  HypothesisReport r;
  r.p_star = mu.p_star();
  r.sup_norm = f.sup_norm();
  r.clause_a = r.p_star > 0.0 && std::isfinite(r.sup_norm);
  const auto& per = f.tables().period();
  r.pointwise_convergent = per.size() == 1 && std::all_of(per[0].begin(), per[0].end(),
                                                          [&](double x) { return x == per[0].front(); });
  return r;
}

// ---------------------------------------------------------------------------
// Conditional measures on finite unions of cylinders

/// nu = mu restricted to Theta, normalized; Theta a finite union of level-0
/// cylinders.
class ConditionalMeasure {
 public:
  ConditionalMeasure(BernoulliSpec mu, std::vector<Word> theta) : mu_(std::move(mu)) {
    for (const auto& t : theta) {
      require_valid(mu_.alphabet(), t);
      if (t.level != 0) throw std::invalid_argument("restriction set must use level-0 words");
    }
    // Keep only maximal cylinders so the union is a disjoint one.
    std::sort(theta.begin(), theta.end(), [](const Word& a, const Word& b) { return a.size() < b.size(); });
    for (const auto& t : theta) {
      const bool covered =
          std::any_of(theta_.begin(), theta_.end(), [&](const Word& kept) { return is_prefix(kept, t); });
      if (!covered) theta_.push_back(t);
    }
    for (const auto& t : theta_) mass_ += cylinder_measure(mu_, t);
    if (!(mass_ > 0.0)) throw std::domain_error("restriction set has mu-measure zero");
  }

  double mass() const noexcept { return mass_; }
  const std::vector<Word>& theta() const noexcept { return theta_; }
  const BernoulliSpec& base() const noexcept { return mu_; }

  /// nu([u]) = mu([u] cap Theta) / mu(Theta).
  double measure(const Word& u) const {
    require_valid(mu_.alphabet(), u);
    double acc = 0.0;
    for (const auto& t : theta_) {
      switch (net_relation(t, u)) {
        case NetRelation::equal:
        case NetRelation::u_contains_v: return cylinder_measure(mu_, u) / mass_;  // [u] inside [t]
        case NetRelation::v_contains_u: acc += cylinder_measure(mu_, t); break;
        case NetRelation::disjoint: break;
      }
    }
    return acc / mass_;
  }

  /// log nu([u]); long words stay finite where measure() would underflow.
  double log_measure(const Word& u) const {
    require_valid(mu_.alphabet(), u);
    double acc = 0.0;
    for (const auto& t : theta_) {
      switch (net_relation(t, u)) {
        case NetRelation::equal:
        case NetRelation::u_contains_v: return log_cylinder_measure(mu_, u) - std::log(mass_);
        case NetRelation::v_contains_u: acc += cylinder_measure(mu_, t); break;
        case NetRelation::disjoint: break;
      }
    }
    return std::log(acc / mass_);
  }

  /// A nu-random point resolved to depth n.
  PointPrefix sample(std::uint64_t seed, std::size_t n, std::uint64_t task = 0) const {
    RandomStream rng(seed, task);
    double u = rng.uniform() * mass_;
    std::size_t pick = theta_.size() - 1;
    for (std::size_t i = 0; i < theta_.size(); ++i) {
      u -= cylinder_measure(mu_, theta_[i]);
      if (u < 0.0) {
        pick = i;
        break;
      }
    }
    std::vector<Symbol> s = theta_[pick].symbols;
    if (s.size() > n) s.resize(n);
    for (std::size_t j = s.size(); j < n; ++j) s.push_back(rng.draw(mu_.vector(j)));
    return PointPrefix::finite(0, std::move(s));
  }

 private:
  BernoulliSpec mu_;
  std::vector<Word> theta_;
  double mass_ = 0.0;
};

struct RestrictedReport {
  double mass = 0.0;
  std::size_t n = 0;
  std::size_t samples = 0;
  double mean_local_pressure = 0.0;  // under nu's own cylinder masses
  double offset = 0.0;               // log mu(Theta) / n
  double target = 0.0;               // (1/n) sum (H(p_j) + E f_j) under mu
  double std_error = 0.0;
  double distance = 0.0;  // |mean - offset - target|
  Verdict verdict = Verdict::inconclusive;
};

/// Samples nu and compares its local pressure at horizon n with the pressure
/// of mu on the whole space; they differ by log mu(Theta) / n plus sampling
/// noise once n exceeds the longest word of Theta.
inline RestrictedReport restricted_equilibrium(const ConditionalMeasure& nu, const PotentialSeq& f, std::size_t n,
                                               std::size_t samples, std::uint64_t seed) {
  std::size_t longest = 0;
  for (const auto& t : nu.theta()) longest = std::max(longest, t.size());
  if (n < longest) throw std::invalid_argument("restricted_equilibrium: horizon shorter than Theta's words");
  RestrictedReport r;
  r.mass = nu.mass();
  r.n = n;
  r.samples = samples;
  const double dn = static_cast<double>(n);
  const std::size_t need = n + f.depth() - 1;
  std::vector<double> vals(samples);
  for (std::size_t t = 0; t < samples; ++t) {
    const auto omega = nu.sample(seed, need, t);
    const double log_nu = nu.log_measure(omega.curtail(n));
    vals[t] = (-log_nu + birkhoff_sum(f, omega, n)) / dn;
  }
  double sum = 0.0;
  for (double v : vals) sum += v;
  r.mean_local_pressure = sum / static_cast<double>(samples);
  double ss = 0.0;
  for (double v : vals) ss += (v - r.mean_local_pressure) * (v - r.mean_local_pressure);
  const double var = samples > 1 ? ss / static_cast<double>(samples - 1) : 0.0;
  r.std_error = std::sqrt(var / static_cast<double>(samples));
  r.offset = std::log(r.mass) / dn;
  r.target = measure_pressure_sequence(nu.base(), f, n, n).s.back();
  r.distance = std::abs(r.mean_local_pressure - r.offset - r.target);
  r.verdict = z_verdict(r.distance, r.std_error, r.target);
  return r;
}

}  // namespace ntsym

#endif  // NTSYM_BERNOULLI_HPP
