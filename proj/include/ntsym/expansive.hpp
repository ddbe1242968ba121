#ifndef NTSYM_EXPANSIVE_HPP
#define NTSYM_EXPANSIVE_HPP

// Expansiveness, generators and strongly uniform expansiveness checked on
// two concrete nonautonomous systems: the nonautonomous shift, and the
// expanding interval maps T_k(x) = m_k x mod 1, together with the symbolic
// coding of the latter by the shift. Every verdict is a finite-resolution
// statement ("no counterexample at (horizon, grid)"), never a proof.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bernoulli.hpp"
#include "errors.hpp"
#include "potentials.hpp"
#include "pressure.hpp"
#include "seqspace.hpp"

namespace ntsym {

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

enum class MetricConvention { circle, interval };

inline const char* to_string(MetricConvention c) { return c == MetricConvention::circle ? "circle" : "interval"; }

/// T_k(x) = m_k x mod 1 on [0, 1). Under the circle metric every T_k is
/// continuous; under |x - y| it jumps at the points l / m_k.
template <class Real = long double>
class IntervalNDS {
 public:
  using real_type = Real;

  explicit IntervalNDS(AlphabetSeq m, MetricConvention metric = MetricConvention::circle)
      : m_(std::move(m)), metric_(metric) {}

  const AlphabetSeq& alphabet() const noexcept { return m_; }
  MetricConvention metric_convention() const noexcept { return metric_; }

  Real step(std::size_t k, Real x) const {
    Real y = x * static_cast<Real>(m_(k));
    y -= std::floor(y);
    return y;
  }

  /// T_k^j x = T_{k+j-1} o ... o T_k (x)
  Real orbit(std::size_t k, std::size_t j, Real x) const {
    for (std::size_t i = 0; i < j; ++i) x = step(k + i, x);
    return x;
  }

  Real distance(Real x, Real y) const {
    const Real t = std::abs(x - y);
    return metric_ == MetricConvention::circle ? std::min(t, Real(1) - t) : t;
  }

  /// Levels 0..level_classes()-1 represent every level's map.
  std::size_t level_classes() const noexcept { return m_.head().size() + m_.period().size(); }

 private:
  AlphabetSeq m_;
  MetricConvention metric_;
};

/// The nonautonomous full shift with the metric e^{-|common prefix|};
/// points are compared through max_depth symbols.
struct ShiftSystem {
  AlphabetSeq m;
  std::size_t max_depth = 64;

  /// d_{n}(a, b) = max_{j<n} d(sigma^j a, sigma^j b)
  double bowen_metric(const PointPrefix& a, const PointPrefix& b, std::size_t n) const {
    double best = 0.0;
    PointPrefix x = a, y = b;
    for (std::size_t j = 0; j < n && j < max_depth; ++j) {
      best = std::max(best, metric(x, y, max_depth - j));
      x = x.shifted();
      y = y.shifted();
    }
    return best;
  }
};

/// d_{k,n}(x, y) = max_{0<=j<n} d(T_k^j x, T_k^j y)
template <class Real>
Real bowen_metric_nds(const IntervalNDS<Real>& sys, Real x, Real y, std::size_t k, std::size_t n) {
  Real best = 0;
  for (std::size_t j = 0; j < n; ++j) {
    best = std::max(best, sys.distance(x, y));
    x = sys.step(k + j, x);
    y = sys.step(k + j, y);
  }
  return best;
}

/// First j <= horizon with d(T^j x, T^j y) > delta, or kNoIndex.
template <class Real>
std::size_t separation_index(const IntervalNDS<Real>& sys, Real x, Real y, std::size_t k, Real delta,
                             std::size_t horizon, bool strict = true) {
  for (std::size_t j = 0; j <= horizon; ++j) {
    const Real d = sys.distance(x, y);
    if (strict ? d > delta : d >= delta) return j;
    x = sys.step(k + j, x);
    y = sys.step(k + j, y);
  }
  return kNoIndex;
}

// ---------------------------------------------------------------------------
// Expansiveness

template <class Real>
struct ExpansivenessVerdict {
  bool counterexample = false;
  std::optional<std::pair<Real, Real>> witness;  // distinct pair that stays delta-close
  std::size_t witness_level = 0;
  std::size_t pairs_checked = 0;
  std::size_t excluded_identical = 0;
  std::size_t max_index = 0;              // largest minimal separating j seen
  std::vector<std::size_t> separation;    // per (level class, pair), kNoIndex if none
};

/// Grid search over pairs (a/grid, b/grid), a < b, at every level class.
template <class Real>
ExpansivenessVerdict<Real> expansiveness_falsifier(const IntervalNDS<Real>& sys, Real delta, std::size_t horizon,
                                                   std::size_t grid) {
  if (!(delta > 0)) throw std::invalid_argument("expansive constant candidate must be positive");
  if (grid < 2) throw std::invalid_argument("grid must have at least two points");
  ExpansivenessVerdict<Real> v;
  for (std::size_t k = 0; k < sys.level_classes(); ++k) {
    for (std::size_t a = 0; a < grid; ++a) {
      for (std::size_t b = a + 1; b < grid; ++b) {
        const Real x = static_cast<Real>(a) / static_cast<Real>(grid);
        const Real y = static_cast<Real>(b) / static_cast<Real>(grid);
        const std::size_t j = separation_index(sys, x, y, k, delta, horizon);
        ++v.pairs_checked;
        v.separation.push_back(j);
        if (j == kNoIndex) {
          if (!v.counterexample) {
            v.counterexample = true;
            v.witness = std::pair{x, y};
            v.witness_level = k;
          }
        } else {
          v.max_index = std::max(v.max_index, j);
        }
      }
    }
  }
  return v;
}

struct ShiftSeparation {
  std::size_t index = kNoIndex;  // first j with d(sigma^j a, sigma^j b) > delta
  std::size_t meet = 0;          // |a ^ b|
  double distance = 0.0;         // d(sigma^index a, sigma^index b)
};

struct ShiftExpansivenessVerdict {
  bool counterexample = false;
  std::size_t pairs_checked = 0;
  std::size_t excluded_identical = 0;
  std::vector<ShiftSeparation> separation;
};

/// Checks the given pairs; pairs agreeing through max_depth are excluded as
/// not distinct at this resolution.
inline ShiftExpansivenessVerdict expansiveness_falsifier(const ShiftSystem& sys, double delta,
                                                         const std::vector<std::pair<PointPrefix, PointPrefix>>& pairs,
                                                         std::size_t horizon) {
  if (!(delta > 0.0)) throw std::invalid_argument("expansive constant candidate must be positive");
  ShiftExpansivenessVerdict v;
  for (const auto& [a, b] : pairs) {
    const auto ml = meet_length(a, b, sys.max_depth);
    if (ml.saturated) {
      ++v.excluded_identical;
      continue;
    }
    ++v.pairs_checked;
    ShiftSeparation s;
    s.meet = ml.length;
    PointPrefix x = a, y = b;
    for (std::size_t j = 0; j <= horizon && j < sys.max_depth; ++j) {
      const double d = metric(x, y, sys.max_depth - j);
      if (d > delta) {
        s.index = j;
        s.distance = d;
        break;
      }
      x = x.shifted();
      y = y.shifted();
    }
    if (s.index == kNoIndex) v.counterexample = true;
    v.separation.push_back(s);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Covers and generators

/// Closed set given as a sorted union of disjoint closed intervals of [0, 1].
template <class Real>
using IntervalSet = std::vector<std::pair<Real, Real>>;

template <class Real>
IntervalSet<Real> normalize(IntervalSet<Real> s) {
  std::sort(s.begin(), s.end());
  IntervalSet<Real> out;
  for (auto [a, b] : s) {
    a = std::max(a, Real(0));
    b = std::min(b, Real(1));
    if (a > b) continue;
    if (!out.empty() && a <= out.back().second) out.back().second = std::max(out.back().second, b);
    else out.emplace_back(a, b);
  }
  return out;
}

template <class Real>
IntervalSet<Real> intersect(const IntervalSet<Real>& s, const IntervalSet<Real>& t) {
  IntervalSet<Real> out;
  for (const auto& [a, b] : s)
    for (const auto& [c, d] : t) {
      const Real lo = std::max(a, c), hi = std::min(b, d);
      if (lo <= hi) out.emplace_back(lo, hi);
    }
  return normalize(std::move(out));
}

/// Open ball B(center, radius) in the system's metric.
template <class Real>
struct Ball {
  Real center = 0;
  Real radius = 0;
};

template <class Real>
struct CoverSeq {
  std::vector<std::vector<Ball<Real>>> levels;  // levels[k] covers X_k
  Real lebesgue = 0;                            // declared Lebesgue number
  bool lebesgue_verified = false;               // on the verification grid
  std::size_t verification_grid = 0;
};

/// Closure of a ball as an interval set, split at the wrap for the circle.
template <class Real>
IntervalSet<Real> closure(const IntervalNDS<Real>& sys, const Ball<Real>& b) {
  if (b.radius >= Real(0.5) && sys.metric_convention() == MetricConvention::circle) return {{Real(0), Real(1)}};
  const Real lo = b.center - b.radius, hi = b.center + b.radius;
  IntervalSet<Real> s{{lo, hi}};
  if (sys.metric_convention() == MetricConvention::circle) {
    if (lo < 0) s.emplace_back(lo + 1, Real(1));
    if (hi > 1) s.emplace_back(Real(0), hi - 1);
  }
  return normalize(std::move(s));
}

/// Balls of radius delta/2 centred on a (delta/2 - eps)-net, one cover per
/// level 0..k_max-1; every eps-ball lies inside a member, so eps is a
/// Lebesgue number.
template <class Real>
CoverSeq<Real> generator_from_net(const IntervalNDS<Real>& sys, Real delta, Real eps, std::size_t k_max,
                                  std::size_t verification_grid = 4096) {
  if (!(delta > 0)) throw std::invalid_argument("generator_from_net: delta must be positive");
  if (!(eps > 0) || !(eps < delta / 4)) throw std::invalid_argument("generator_from_net: need 0 < eps < delta/4");
  const Real spacing = delta - 2 * eps;  // twice the net radius
  const auto count = static_cast<std::size_t>(std::max<Real>(1, std::ceil(Real(1) / spacing - Real(1e-12))));
  std::vector<Ball<Real>> balls;
  for (std::size_t i = 0; i < count; ++i) {
    balls.push_back({(static_cast<Real>(i) + Real(0.5)) / static_cast<Real>(count), delta / 2});
  }
  CoverSeq<Real> cs;
  cs.levels.assign(k_max, balls);
  cs.lebesgue = eps;
  cs.verification_grid = verification_grid;
  cs.lebesgue_verified = true;
  for (std::size_t g = 0; g < verification_grid && cs.lebesgue_verified; ++g) {
    const Real x = static_cast<Real>(g) / static_cast<Real>(verification_grid);
    const bool inside = std::any_of(balls.begin(), balls.end(), [&](const Ball<Real>& b) {
      return sys.distance(x, b.center) + eps <= b.radius + Real(1e-15);
    });
    if (!inside) cs.lebesgue_verified = false;
  }
  return cs;
}

/// Diameter of a closed set in the system's metric (0 when empty).
template <class Real>
Real diameter(const IntervalNDS<Real>& sys, const IntervalSet<Real>& s) {
  if (s.empty()) return 0;
  if (sys.metric_convention() == MetricConvention::interval) return s.back().second - s.front().first;
  auto circ = [](Real t) {
    t = std::abs(t);
    return std::min(t, Real(1) - t);
  };
  Real best = 0;
  for (const auto& [a1, b1] : s)
    for (const auto& [a2, b2] : s) {
      const Real lo = a1 - b2, hi = b1 - a2;  // range of x - y
      if ((lo <= Real(0.5) && Real(0.5) <= hi) || (lo <= Real(-0.5) && Real(-0.5) <= hi)) return Real(0.5);
      best = std::max({best, circ(lo), circ(hi)});
    }
  return best;
}

/// T_k^{-1}(V): one copy of V per branch of x -> m_k x mod 1.
template <class Real>
IntervalSet<Real> preimage(const IntervalNDS<Real>& sys, std::size_t k, const IntervalSet<Real>& v) {
  const Symbol m = sys.alphabet()(k);
  IntervalSet<Real> pre;
  for (const auto& [a, b] : v)
    for (Symbol l = 0; l < m; ++l)
      pre.emplace_back((a + static_cast<Real>(l)) / static_cast<Real>(m), (b + static_cast<Real>(l)) / static_cast<Real>(m));
  return normalize(std::move(pre));
}

/// Closed Bowen ball {y : d_{k,n}(x, y) <= eps} as an interval set.
template <class Real>
IntervalSet<Real> bowen_ball_set(const IntervalNDS<Real>& sys, Real x, Real eps, std::size_t k, std::size_t n) {
  if (n == 0) return {{Real(0), Real(1)}};
  std::vector<Real> orbit{x};
  for (std::size_t j = 1; j < n; ++j) orbit.push_back(sys.step(k + j - 1, orbit.back()));
  IntervalSet<Real> v = closure(sys, Ball<Real>{orbit[n - 1], eps});
  for (std::size_t j = n - 1; j-- > 0;) {
    v = intersect(closure(sys, Ball<Real>{orbit[j], eps}), preimage(sys, k + j, v));
    if (v.empty()) break;
  }
  return v;
}

/// The intersection over j < |members| of T_k^{-j}(closure of U_j), where
/// U_j = cover.levels[k + j][members[j]].
template <class Real>
IntervalSet<Real> dynamical_intersection(const IntervalNDS<Real>& sys, const CoverSeq<Real>& cover, std::size_t k,
                                         const std::vector<std::size_t>& members) {
  if (members.empty()) return {{Real(0), Real(1)}};
  if (k + members.size() > cover.levels.size()) throw depth_error("cover sequence shorter than the member sequence");
  IntervalSet<Real> v = closure(sys, cover.levels[k + members.size() - 1][members.back()]);
  for (std::size_t j = members.size() - 1; j-- > 0;) {
    v = intersect(closure(sys, cover.levels[k + j][members[j]]), preimage(sys, k + j, v));
    if (v.empty()) break;
  }
  return v;
}

template <class Real>
struct GeneratorCheck {
  std::vector<Real> max_diameter;  // max_diameter[J-1] over the probed sequences of length J
  std::size_t sequences = 0;       // sequences probed per J
  bool exhaustive = false;
  bool non_increasing = true;
  bool shrinks_below_tol = false;  // at J_max
};

/// Probes intersections along member sequences of length 1..J_max at level
/// k: every sequence when there are at most `cap`, else sequences picked
/// along seeded random orbits (members containing T^j x).
template <class Real>
GeneratorCheck<Real> check_generator(const IntervalNDS<Real>& sys, const CoverSeq<Real>& cover, std::size_t k,
                                     std::size_t J_max, Real tol, std::uint64_t seed = 1, std::size_t cap = 200000,
                                     std::size_t samples = 2000) {
  if (cover.levels.size() < k + J_max) throw depth_error("cover sequence too short for J_max");
  GeneratorCheck<Real> g;
  double total = 1.0;
  for (std::size_t j = 0; j < J_max; ++j) total *= static_cast<double>(cover.levels[k + j].size());
  g.exhaustive = total <= static_cast<double>(cap);
  std::vector<std::vector<std::size_t>> seqs;
  if (g.exhaustive) {
    std::vector<std::size_t> idx(J_max, 0);
    while (true) {
      seqs.push_back(idx);
      std::size_t j = J_max;
      bool done = true;
      while (j-- > 0) {
        if (++idx[j] < cover.levels[k + j].size()) {
          done = false;
          break;
        }
        idx[j] = 0;
      }
      if (done) break;
    }
  } else {
    RandomStream rng(seed, 0);
    for (std::size_t t = 0; t < samples; ++t) {
      Real x = static_cast<Real>(rng.uniform());
      std::vector<std::size_t> seq;
      for (std::size_t j = 0; j < J_max; ++j) {
        const auto& balls = cover.levels[k + j];
        std::vector<std::size_t> hits;
        for (std::size_t i = 0; i < balls.size(); ++i)
          if (sys.distance(x, balls[i].center) < balls[i].radius) hits.push_back(i);
        seq.push_back(hits.empty() ? 0 : hits[static_cast<std::size_t>(rng.uniform() * hits.size())]);
        x = sys.step(k + j, x);
      }
      seqs.push_back(std::move(seq));
    }
  }
  g.sequences = seqs.size();
  g.max_diameter.assign(J_max, 0);
  for (const auto& seq : seqs) {
    for (std::size_t J = 1; J <= J_max; ++J) {
      const std::vector<std::size_t> prefix(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(J));
      g.max_diameter[J - 1] = std::max(g.max_diameter[J - 1], diameter(sys, dynamical_intersection(sys, cover, k, prefix)));
    }
  }
  for (std::size_t J = 1; J < J_max; ++J)
    if (g.max_diameter[J] > g.max_diameter[J - 1] + Real(1e-15)) g.non_increasing = false;
  g.shrinks_below_tol = g.max_diameter.back() <= tol;
  return g;
}

/// Largest diameter of sigma^{-j}-joins of J rank-1 cylinders in the shift,
/// i.e. of rank-J cylinders, measured on two points that first differ at
/// position J.
inline double shift_join_diameter(const ShiftSystem& sys, std::size_t level, std::size_t J) {
  if (J >= sys.max_depth) return 0.0;
  std::vector<Symbol> differ(J, 1);
  differ.push_back(2);
  const auto a = PointPrefix::periodic(level, {}, {1});
  const auto b = PointPrefix::periodic(level, differ, {1});
  return metric(a, b, sys.max_depth);
}

// ---------------------------------------------------------------------------
// Strongly uniform expansiveness

struct SueEntry {
  double eps = 0.0;
  std::size_t N = kNoIndex;  // kNoIndex: no N up to the search bound works
};

/// For each eps, the smallest N such that on the grid, at every level class,
/// d(x, y) >= eps forces max_{j<N} d(T^j x, T^j y) >= delta.
template <class Real>
std::vector<SueEntry> sue_modulus(const IntervalNDS<Real>& sys, Real delta, const std::vector<double>& eps_list,
                                  std::size_t grid = 1024, std::size_t n_bound = 64) {
  if (!(delta > 0)) throw std::invalid_argument("sue_modulus: delta must be positive");
  struct PairInfo {
    Real d;
    std::size_t first;
  };
  std::vector<PairInfo> info;
  for (std::size_t k = 0; k < sys.level_classes(); ++k)
    for (std::size_t a = 0; a < grid; ++a)
      for (std::size_t b = a + 1; b < grid; ++b) {
        const Real x = static_cast<Real>(a) / static_cast<Real>(grid);
        const Real y = static_cast<Real>(b) / static_cast<Real>(grid);
        info.push_back({sys.distance(x, y), separation_index(sys, x, y, k, delta, n_bound, false)});
      }
  std::vector<SueEntry> out;
  for (double eps : eps_list) {
    SueEntry e{eps, 1};
    for (const auto& p : info) {
      if (p.d < static_cast<Real>(eps)) continue;
      if (p.first == kNoIndex) {
        e.N = kNoIndex;
        break;
      }
      e.N = std::max(e.N, p.first + 1);
    }
    out.push_back(e);
  }
  return out;
}

/// Shift version: the probing pairs are 1^inf against 1^L 2 1^inf for every
/// meet length L < max_depth, at every level class.
inline std::vector<SueEntry> sue_modulus(const ShiftSystem& sys, double delta, const std::vector<double>& eps_list) {
  if (!(delta > 0.0)) throw std::invalid_argument("sue_modulus: delta must be positive");
  struct PairInfo {
    double d;
    std::size_t first;
  };
  std::vector<PairInfo> info;
  const std::size_t classes = sys.m.head().size() + sys.m.period().size();
  for (std::size_t k = 0; k < classes; ++k)
    for (std::size_t L = 0; L + 1 < sys.max_depth; ++L) {
      std::vector<Symbol> h(L, 1);
      h.push_back(2);
      PointPrefix a = PointPrefix::periodic(k, {}, {1});
      PointPrefix b = PointPrefix::periodic(k, h, {1});
      const double d = metric(a, b, sys.max_depth);
      std::size_t first = kNoIndex;
      for (std::size_t j = 0; j < sys.max_depth; ++j) {
        if (metric(a, b, sys.max_depth) >= delta) {
          first = j;
          break;
        }
        a = a.shifted();
        b = b.shifted();
      }
      info.push_back({d, first});
    }
  std::vector<SueEntry> out;
  for (double eps : eps_list) {
    SueEntry e{eps, 1};
    for (const auto& p : info) {
      if (p.d < eps) continue;
      if (p.first == kNoIndex) {
        e.N = kNoIndex;
        break;
      }
      e.N = std::max(e.N, p.first + 1);
    }
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symbolic coding

/// omega_j = floor(m_{k+j} T^j x) + 1 under the half-open partition
/// {[l/m, (l+1)/m)}; boundary points take the right-hand digit.
template <class Real>
Word encode(const IntervalNDS<Real>& sys, Real x, std::size_t n, std::size_t level = 0) {
  if (!(x >= 0) || !(x < 1)) throw std::invalid_argument("encode: x must lie in [0, 1)");
  Word w{level, {}};
  w.symbols.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Symbol m = sys.alphabet()(level + j);
    const Real y = x * static_cast<Real>(m);
    auto digit = static_cast<Symbol>(std::floor(y));
    digit = std::min<Symbol>(digit, m - 1);
    w.symbols.push_back(digit + 1);
    x = y - static_cast<Real>(digit);
  }
  return w;
}

template <class Real>
struct Decoded {
  Real value = 0;
  Real error_bound = 0;  // 1 / prod_{i<|w|} m_{k+i}
};

/// x = sum_j (w_j - 1) / prod_{i<=j} m_{k+i}, truncated at |w|.
template <class Real>
Decoded<Real> decode(const IntervalNDS<Real>& sys, const Word& w) {
  if (w.empty()) throw std::invalid_argument("decode: empty word");
  require_valid(sys.alphabet(), w);
  Decoded<Real> d;
  Real x = 0;
  for (std::size_t j = w.size(); j-- > 0;) {
    x = (x + static_cast<Real>(w[j] - 1)) / static_cast<Real>(sys.alphabet()(w.level + j));
  }
  d.value = x;
  Real bound = 1;
  for (std::size_t j = 0; j < w.size(); ++j) bound /= static_cast<Real>(sys.alphabet()(w.level + j));
  d.error_bound = bound;
  return d;
}

/// max_{j<=J} d(decode(sigma^j w), T^j decode(w)), on the circle.
template <class Real>
Real semiconjugacy_residual(const IntervalNDS<Real>& sys, const Word& w, std::size_t J, std::size_t guard = 30) {
  if (w.size() < J + guard) throw depth_error("semiconjugacy_residual: word shorter than J + guard");
  Real x = decode(sys, w).value;
  Word v = w;
  Real worst = 0;
  for (std::size_t j = 0; j <= J; ++j) {
    const Real t = std::abs(decode(sys, v).value - x);
    worst = std::max(worst, std::min(t, Real(1) - t));
    if (j == J) break;
    x = sys.step(w.level + j, x);
    v = shift(v);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Orbit-based pressure

template <class Real>
struct OrbitPressure {
  std::size_t n = 0;
  double eps = 0.0;
  std::size_t grid = 0;
  std::size_t separated_count = 0;
  std::size_t spanning_count = 0;
  double log_P = 0.0;  // log of the weighted maximal separated set (sup side)
  double log_Q = 0.0;  // log of the weighted spanning set (inf side)
  double rate_P = 0.0;  // log_P / n
  double rate_Q = 0.0;  // log_Q / n
  double symbolic_s_n = 0.0;
};

/// (n, eps)-separated and spanning sums of e^{S_n f} computed on the interval
/// system itself, f read through the coding, over a grid fine enough to
/// resolve Bowen balls. The separated set is greedy maximal with heavier
/// points first. The spanning set is a left-to-right sweep that covers the
/// first uncovered point by the admissible centre reaching furthest right
/// (lighter on ties); it bounds the infimum from above.
template <class Real>
OrbitPressure<Real> pressure_via_orbits(const IntervalNDS<Real>& sys, const PotentialSeq& f, std::size_t n, Real eps,
                                        std::size_t grid = 0, std::size_t level = 0) {
  if (n == 0) throw std::invalid_argument("pressure_via_orbits: n must be >= 1");
  if (!(eps > 0) || !(eps < Real(0.5))) throw std::invalid_argument("pressure_via_orbits: need 0 < eps < 1/2");
  constexpr std::size_t kMaxGrid = std::size_t{1} << 22;
  if (grid == 0) {
    double branches = 1.0;
    for (std::size_t j = 0; j < n; ++j) branches *= sys.alphabet()(level + j);
    const double want = 8.0 * branches / static_cast<double>(eps);
    grid = 1;
    while (static_cast<double>(grid) < want && grid <= kMaxGrid) grid <<= 1;
  }
  if (grid > kMaxGrid) throw depth_error("net construction failure at requested resolution");

  const std::size_t digits = n + f.depth() - 1;
  std::vector<Real> xs(grid);
  std::vector<double> weight(grid);
  for (std::size_t g = 0; g < grid; ++g) {
    xs[g] = static_cast<Real>(g) / static_cast<Real>(grid);
    weight[g] = birkhoff_sum(f, PointPrefix::from_word(encode(sys, xs[g], digits, level)), n);
  }
  const auto G = static_cast<std::ptrdiff_t>(grid);
  auto close = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
    return bowen_metric_nds(sys, xs[static_cast<std::size_t>(a)], xs[static_cast<std::size_t>(b)], level, n) <= eps;
  };
  // Grid indices whose points may lie in the closed Bowen ball around g;
  // membership is then decided by close().
  auto ball = [&](std::ptrdiff_t g) {
    std::vector<std::ptrdiff_t> idx;
    for (const auto& [a, b] : bowen_ball_set(sys, xs[static_cast<std::size_t>(g)], eps, level, n)) {
      const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::floor(a * static_cast<Real>(G))) - 1);
      const auto hi = std::min<std::ptrdiff_t>(G - 1, static_cast<std::ptrdiff_t>(std::ceil(b * static_cast<Real>(G))) + 1);
      for (std::ptrdiff_t h = lo; h <= hi; ++h)
        if (idx.empty() || idx.back() < h) idx.push_back(h);
    }
    return idx;
  };

  OrbitPressure<Real> r;
  r.n = n;
  r.eps = static_cast<double>(eps);
  r.grid = grid;

  {
    std::vector<std::size_t> order(grid);
    for (std::size_t g = 0; g < grid; ++g) order[g] = g;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
    std::vector<char> chosen(grid, 0);
    std::vector<double> logs;
    for (std::size_t gi : order) {
      const auto g = static_cast<std::ptrdiff_t>(gi);
      bool hit = false;
      for (auto h : ball(g)) {
        if (h != g && chosen[static_cast<std::size_t>(h)] && close(g, h)) {
          hit = true;
          break;
        }
      }
      if (!hit) {
        chosen[gi] = 1;
        logs.push_back(weight[gi]);
      }
    }
    r.separated_count = logs.size();
    r.log_P = log_sum_exp(logs);
  }
  {
    // Offsets are measured forward from g around the circle so that the
    // centre reaching furthest past g wins.
    auto ahead = [&](std::ptrdiff_t g, std::ptrdiff_t h) {
      std::ptrdiff_t d = h - g;
      if (sys.metric_convention() == MetricConvention::circle) {
        d = ((d % G) + G) % G;
        if (d > G / 2) d -= G;
      }
      return d;
    };
    std::vector<char> covered(grid, 0);
    std::vector<double> logs;
    for (std::ptrdiff_t g = 0; g < G; ++g) {
      if (covered[static_cast<std::size_t>(g)]) continue;
      std::ptrdiff_t best = g, best_off = 0;
      for (auto h : ball(g)) {
        if (!close(g, h)) continue;
        const auto off = ahead(g, h);
        if (off > best_off || (off == best_off && weight[static_cast<std::size_t>(h)] < weight[static_cast<std::size_t>(best)])) {
          best = h;
          best_off = off;
        }
      }
      for (auto h : ball(best))
        if (close(best, h)) covered[static_cast<std::size_t>(h)] = 1;
      covered[static_cast<std::size_t>(g)] = 1;
      logs.push_back(weight[static_cast<std::size_t>(best)]);
    }
    r.spanning_count = logs.size();
    r.log_Q = log_sum_exp(logs);
  }
  r.rate_P = r.log_P / static_cast<double>(n);
  r.rate_Q = r.log_Q / static_cast<double>(n);
  r.symbolic_s_n = sn_sequence(f, EnvelopePolicy::midpoint, std::max<std::size_t>(n, 2)).s_at(n);
  return r;
}

}  // namespace ntsym

#endif  // NTSYM_EXPANSIVE_HPP
