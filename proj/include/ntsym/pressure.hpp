#ifndef NTSYM_PRESSURE_HPP
#define NTSYM_PRESSURE_HPP

// Finite-window pressure estimators for the nonautonomous full shift:
// capacity sequences s_n, (n, eps)-spanning and separated sums, the
// Caratheodory-type cover and packing sums over cylinder antichains, their
// critical exponents, and the rank-uniformization of disjoint covers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "potentials.hpp"
#include "seqspace.hpp"

namespace ntsym {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -kInf;
  const double mx = *std::max_element(xs.begin(), xs.end());
  if (mx == -kInf || mx == kInf) return mx;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

inline double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double mx = std::max(a, b);
  return mx + std::log1p(std::exp(-std::abs(a - b)));
}

/// log sum_i e^{a_{j,i}}
inline double log_partition(const PotentialSeq& first_coord, std::size_t j) {
  return log_sum_exp(first_coord.table(j));
}

enum class Extremum { sup, inf };

namespace detail {

// Word-keyed partial sums; D is small so the key is the last D-1 symbols.
using StateMap = std::map<std::vector<Symbol>, double>;

inline std::vector<Symbol> push_window(const std::vector<Symbol>& state, Symbol c, std::size_t keep) {
  std::vector<Symbol> w = state;
  w.push_back(c);
  if (w.size() > keep) w.erase(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(w.size() - keep));
  return w;
}

}  // namespace detail

/// log of sum over rank-`rank` words v at level through.level with [v]
/// meeting [through] of exp(ext over [v] of S_n f).
///
/// Positions below `rank` are summed, positions at or beyond it are
/// extremized. The state carried between positions is the last D-1 symbols,
/// which is all a depth-D term needs.
inline double log_weighted_count(const PotentialSeq& f, std::size_t n, std::size_t rank, Extremum ext,
                                 const Word& through = {}) {
  const auto& m = f.alphabet();
  const std::size_t k = through.level;
  const std::size_t D = f.depth();
  const std::size_t keep = D - 1;
  const std::size_t total = std::max(rank, n == 0 ? std::size_t{0} : n + D - 1);

  auto term_at = [&](std::size_t p, const std::vector<Symbol>& state, Symbol c) {
    // Term j = p - D + 1 completes when the symbol at position p is placed.
    if (p + 1 < D) return 0.0;
    const std::size_t j = p + 1 - D;
    if (j >= n) return 0.0;
    std::vector<Symbol> win = state;
    win.push_back(c);
    return f.value(k + j, std::span<const Symbol>(win).subspan(win.size() - D));
  };
  auto symbols_at = [&](std::size_t p) -> std::pair<Symbol, Symbol> {
    if (p < rank && p < through.size()) return {through[p], through[p]};
    return {1, m(k + p)};
  };

  detail::StateMap fwd{{{}, 0.0}};
  for (std::size_t p = 0; p < rank; ++p) {
    detail::StateMap next;
    const auto [lo, hi] = symbols_at(p);
    for (const auto& [state, acc] : fwd) {
      for (Symbol c = lo; c <= hi; ++c) {
        const double v = acc + term_at(p, state, c);
        auto key = detail::push_window(state, c, keep);
        auto it = next.find(key);
        if (it == next.end()) next.emplace(std::move(key), v);
        else it->second = log_add(it->second, v);
      }
    }
    fwd = std::move(next);
  }

  const bool take_max = ext == Extremum::sup;
  double result = -kInf;
  for (const auto& [origin, acc] : fwd) {
    detail::StateMap tail{{origin, 0.0}};
    for (std::size_t p = rank; p < total; ++p) {
      detail::StateMap next;
      for (const auto& [state, best] : tail) {
        for (Symbol c = 1; c <= m(k + p); ++c) {
          const double v = best + term_at(p, state, c);
          auto key = detail::push_window(state, c, keep);
          auto it = next.find(key);
          if (it == next.end()) next.emplace(std::move(key), v);
          else it->second = take_max ? std::max(it->second, v) : std::min(it->second, v);
        }
      }
      tail = std::move(next);
    }
    double g = take_max ? -kInf : kInf;
    for (const auto& [state, v] : tail) g = take_max ? std::max(g, v) : std::min(g, v);
    result = log_add(result, acc + g);
  }
  return result;
}

/// ext over [u] of S_{|u|} f, for a word u.
inline double cylinder_birkhoff(const PotentialSeq& f, const Word& u, Extremum ext) {
  return log_weighted_count(f, u.size(), u.size(), ext, u);
}

// ---------------------------------------------------------------------------
// Capacity sequences

/// s_n for n = 1..n_hi together with window brackets over [n_lo, n_hi].
struct PressureEstimate {
  std::vector<double> s;         // s[n-1] = s_n
  std::vector<double> tail_inf;  // min_{n<=k<=n_hi} s_k
  std::vector<double> tail_sup;  // max_{n<=k<=n_hi} s_k
  std::size_t n_lo = 1;
  std::size_t n_hi = 1;
  double liminf_bracket = 0.0;  // tail_inf(n_lo)
  double limsup_bracket = 0.0;  // tail_sup(n_lo)
  double cauchy_gap = 0.0;      // |s_{n_hi} - s_{n_lo}|

  double s_at(std::size_t n) const { return s.at(n - 1); }
};

/// Builds the bracket record from a sequence s_1..s_N; n_lo = 0 picks N/2.
inline PressureEstimate make_estimate(std::vector<double> s, std::size_t n_lo = 0) {
  if (s.empty()) throw std::invalid_argument("empty s_n sequence");
  PressureEstimate e;
  e.n_hi = s.size();
  e.n_lo = n_lo == 0 ? std::max<std::size_t>(1, e.n_hi / 2) : n_lo;
  if (e.n_lo > e.n_hi) throw std::invalid_argument("window start after window end");
  e.s = std::move(s);
  e.tail_inf.resize(e.n_hi);
  e.tail_sup.resize(e.n_hi);
  double lo = kInf, hi = -kInf;
  for (std::size_t i = e.n_hi; i-- > 0;) {
    if (!std::isfinite(e.s[i])) throw std::domain_error("non-finite s_n");
    lo = std::min(lo, e.s[i]);
    hi = std::max(hi, e.s[i]);
    e.tail_inf[i] = lo;
    e.tail_sup[i] = hi;
  }
  e.liminf_bracket = e.tail_inf[e.n_lo - 1];
  e.limsup_bracket = e.tail_sup[e.n_lo - 1];
  e.cauchy_gap = std::abs(e.s[e.n_hi - 1] - e.s[e.n_lo - 1]);
  return e;
}

/// s_n = (1/n) sum_{j<n} log sum_i e^{a_{j,i}}, with a chosen by policy.
inline PressureEstimate sn_sequence(const PotentialSeq& f, EnvelopePolicy policy, std::size_t n_hi,
                                    std::size_t n_lo = 0) {
  if (n_hi < 2) throw std::invalid_argument("sn_sequence: n_hi must be >= 2");
  const auto a = reduce(f, policy);
  std::vector<double> s;
  s.reserve(n_hi);
  double acc = 0.0;
  for (std::size_t j = 0; j < n_hi; ++j) {
    acc += log_partition(a, j);
    s.push_back(acc / static_cast<double>(j + 1));
  }
  return make_estimate(std::move(s), n_lo);
}

inline void write_csv(std::ostream& os, const PressureEstimate& e) {
  os << "n,s_n,tail_inf,tail_sup\n";
  char buf[128];
  for (std::size_t i = 0; i < e.n_hi; ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i + 1, e.s[i], e.tail_inf[i], e.tail_sup[i]);
    os << buf;
  }
}

// ---------------------------------------------------------------------------
// Spanning and separated sums

/// Rank of the cylinders that realize both (n, eps)-spanning and
/// (n, eps)-separated sets in the shift: d_{0,n}(x, y) <= eps exactly when
/// x and y share their first n + ceil(-log eps) - 1 symbols.
inline std::size_t spanning_rank(std::size_t n, double eps) {
  return bowen_ball_rank({n, eps, true}).rank;
}

/// log Q_n(f, eps): one representative per closed Bowen ball, placed where
/// S_n f is smallest.
inline double log_spanning_Q(const PotentialSeq& f, std::size_t n, double eps) {
  return log_weighted_count(f, n, spanning_rank(n, eps), Extremum::inf);
}

/// log P_n(f, eps): one point per class of (n, eps)-inseparable points,
/// placed where S_n f is largest.
inline double log_separated_P(const PotentialSeq& f, std::size_t n, double eps) {
  return log_weighted_count(f, n, spanning_rank(n, eps), Extremum::sup);
}

inline double spanning_Q(const PotentialSeq& f, std::size_t n, double eps) {
  return std::exp(log_spanning_Q(f, n, eps));
}

inline double separated_P(const PotentialSeq& f, std::size_t n, double eps) {
  return std::exp(log_separated_P(f, n, eps));
}

/// P_n(0, eps) = Q_n(0, eps) as an exact integer: the number of admissible
/// words of the ball rank.
inline BigInt separated_count(const AlphabetSeq& m, std::size_t n, double eps) {
  return count_admissible(m, 0, spanning_rank(n, eps));
}

// ---------------------------------------------------------------------------
// Cover and packing sums over cylinder antichains

/// Which extremum of S_{n(v)} f over [v] enters a cylinder's weight.
using CylinderWeight = Extremum;

struct OuterMeasureResult {
  double s = 0.0;
  double value = 0.0;  // +inf when no admissible cover exists
  std::vector<Word> optimizer;
  std::size_t n_min = 0;  // rank bounds of the searched family
  std::size_t depth_max = 0;
};

enum class OuterMeasureKind { bowen, packing };

inline const char* to_string(OuterMeasureKind k) { return k == OuterMeasureKind::bowen ? "bowen" : "packing"; }

/// The cylinder tree below a target word, truncated at depth_max, with the
/// s-independent part S^*(v) of every weight cached.
///
/// Any cylinder cover of [target] can be refined to a prefix-free one of no
/// larger weight (nested cylinders are redundant), and every prefix-free
/// family is an antichain of this tree, so the optimum over antichains is
/// val(v) = min(w(v), sum over children val(child)) at the root.
class CylinderTree {
 public:
  static constexpr std::size_t kMaxDepth = 14;
  static constexpr std::size_t kMaxNodes = std::size_t{1} << 24;

  CylinderTree(const PotentialSeq& f, std::size_t depth_max, Word target = {},
               CylinderWeight weight = CylinderWeight::sup)
      : target_(std::move(target)), depth_max_(depth_max) {
    if (depth_max > kMaxDepth) throw depth_error("cylinder tree depth bound exceeded (max 14)");
    require_valid(f.alphabet(), target_);
    build(f, weight);
  }

  std::size_t depth_max() const noexcept { return depth_max_; }
  const Word& target() const noexcept { return target_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  /// inf over prefix-free covers of [target] by cylinders of rank in
  /// [N, depth] of sum exp(-n(v) s + S^*(v)).
  OuterMeasureResult cover(double s, std::size_t N, std::size_t depth = npos) const {
    return solve(s, N, depth, true);
  }

  /// sup over prefix-free families of cylinders of rank in [N, depth]
  /// inside [target] of the same sum.
  OuterMeasureResult packing(double s, std::size_t N, std::size_t depth = npos) const {
    return solve(s, N, depth, false);
  }

  OuterMeasureResult evaluate(OuterMeasureKind kind, double s, std::size_t N, std::size_t depth = npos) const {
    return kind == OuterMeasureKind::bowen ? cover(s, N, depth) : packing(s, N, depth);
  }

  /// Sum of the weights of all rank-n cylinders inside [target] (n >= |target|).
  double uniform_rank_sum(double s, std::size_t n) const {
    double acc = 0.0;
    for (const auto& nd : nodes_) {
      if (nd.depth == n && nd.inside) acc += std::exp(-static_cast<double>(n) * s + nd.birkhoff);
    }
    return acc;
  }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  struct Node {
    double birkhoff = 0.0;  // ext over [v] of S_{|v|} f
    std::uint32_t depth = 0;
    std::int64_t parent = -1;
    Symbol symbol = 0;
    std::uint32_t first_child = 0;
    std::uint32_t child_count = 0;
    bool inside = false;  // [v] is contained in [target]
  };

  void build(const PotentialSeq& f, CylinderWeight weight) {
    const auto& m = f.alphabet();
    const std::size_t k = target_.level;
    nodes_.push_back(Node{cylinder_birkhoff(f, Word{k, {}}, weight), 0, -1, 0, 0, 0, target_.empty()});
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const std::size_t d = nodes_[i].depth;
      if (d >= depth_max_) continue;
      const Word u = word_of(i);
      Symbol lo = 1, hi = m(k + d);
      if (d < target_.size()) lo = hi = target_[d];
      if (nodes_.size() + (hi - lo + 1) > kMaxNodes) throw depth_error("cylinder tree too large");
      nodes_[i].first_child = static_cast<std::uint32_t>(nodes_.size());
      nodes_[i].child_count = hi - lo + 1;
      for (Symbol c = lo; c <= hi; ++c) {
        // First-coordinate sums extend by one term; deeper potentials need
        // the extremum over the unresolved window.
        const double b = f.depth() == 1 ? nodes_[i].birkhoff + f.coefficient(k + d, c)
                                        : cylinder_birkhoff(f, u.extended(c), weight);
        nodes_.push_back(Node{b, static_cast<std::uint32_t>(d + 1), static_cast<std::int64_t>(i), c, 0, 0,
                              d + 1 >= target_.size()});
      }
    }
  }

  Word word_of(std::size_t i) const {
    Word w{target_.level, {}};
    for (std::int64_t j = static_cast<std::int64_t>(i); nodes_[j].parent >= 0; j = nodes_[j].parent) {
      w.symbols.push_back(nodes_[j].symbol);
    }
    std::reverse(w.symbols.begin(), w.symbols.end());
    return w;
  }

  OuterMeasureResult solve(double s, std::size_t N, std::size_t depth, bool is_cover) const {
    if (depth == npos) depth = depth_max_;
    if (depth > depth_max_) throw depth_error("requested depth beyond the built tree");
    if (N > depth) throw std::invalid_argument("rank floor N exceeds depth bound");
    const double none = is_cover ? kInf : 0.0;
    std::vector<double> val(nodes_.size(), none);
    std::vector<char> take(nodes_.size(), 0);
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      const Node& nd = nodes_[i];
      if (nd.depth > depth) continue;
      const bool allowed = nd.depth >= N && (is_cover || nd.inside);
      const double own = allowed ? std::exp(-static_cast<double>(nd.depth) * s + nd.birkhoff) : none;
      double kids = none;
      if (nd.depth < depth && nd.child_count > 0) {
        kids = 0.0;
        for (std::uint32_t c = 0; c < nd.child_count; ++c) kids += val[nd.first_child + c];
      }
      const bool own_better = is_cover ? own <= kids : own >= kids;
      val[i] = own_better ? own : kids;
      take[i] = own_better && allowed;
    }
    OuterMeasureResult r;
    r.s = s;
    r.value = val[0];
    r.n_min = N;
    r.depth_max = depth;
    if (std::isfinite(r.value)) collect(0, depth, take, r.optimizer);
    return r;
  }

  void collect(std::size_t i, std::size_t depth, const std::vector<char>& take, std::vector<Word>& out) const {
    if (take[i]) {
      out.push_back(word_of(i));
      return;
    }
    const Node& nd = nodes_[i];
    if (nd.depth >= depth) return;
    for (std::uint32_t c = 0; c < nd.child_count; ++c) collect(nd.first_child + c, depth, take, out);
  }

  Word target_;
  std::size_t depth_max_;
  std::vector<Node> nodes_;
};

inline OuterMeasureResult bowen_outer_measure(const PotentialSeq& f, double s, std::size_t N, std::size_t depth_max,
                                              const Word& target = {},
                                              CylinderWeight weight = CylinderWeight::sup) {
  if (N > depth_max) throw std::invalid_argument("N must not exceed depth_max");
  return CylinderTree(f, depth_max, target, weight).cover(s, N);
}

inline OuterMeasureResult packing_content(const PotentialSeq& f, double s, std::size_t N, std::size_t depth_max,
                                          const Word& target = {}, CylinderWeight weight = CylinderWeight::sup) {
  if (N > depth_max) throw std::invalid_argument("N must not exceed depth_max");
  return CylinderTree(f, depth_max, target, weight).packing(s, N);
}

// ---------------------------------------------------------------------------
// Critical exponents

struct CriticalExponent {
  double lower = 0.0;  // largest probed s still on the "+inf" side
  double upper = 0.0;  // smallest probed s on the "0" side
  bool determined = false;
  std::size_t iterations = 0;
  std::string note;

  double midpoint() const { return 0.5 * (lower + upper); }
};

/// Bisection for the jump of a depth-truncated cover or packing sum.
///
/// The proxy compares the optimum at depth_max with the optimum at
/// depth_max - 2 for the same rank floor N. A cover sum can only go down as
/// the depth grows and does so strictly once s passes the critical value; a
/// packing sum can only go up and does so strictly below it. Each kind is
/// bisected on its strict side; a flat trend at both ends is reported.
inline CriticalExponent critical_s(const CylinderTree& tree, OuterMeasureKind kind, std::size_t N, double tol,
                                   double s_lo, double s_hi) {
  if (!(tol > 0.0)) throw std::invalid_argument("critical_s: tol must be positive");
  const std::size_t D = tree.depth_max();
  if (D < 2 || N + 2 > D) throw std::invalid_argument("critical_s: need N + 2 <= depth_max");
  constexpr double rel = 1e-12;
  auto above = [&](double s) {
    const double deep = tree.evaluate(kind, s, N, D).value;
    const double shallow = tree.evaluate(kind, s, N, D - 2).value;
    if (kind == OuterMeasureKind::bowen) return deep < shallow * (1.0 - rel);
    return !(deep > shallow * (1.0 + rel));
  };
  CriticalExponent r;
  if (above(s_lo) || !above(s_hi)) {
    r.lower = s_lo;
    r.upper = s_hi;
    r.note = "undetermined at this depth: depth trend does not change sign on the search interval";
    return r;
  }
  while (s_hi - s_lo > tol) {
    const double mid = 0.5 * (s_lo + s_hi);
    (above(mid) ? s_hi : s_lo) = mid;
    ++r.iterations;
  }
  r.lower = s_lo;
  r.upper = s_hi;
  r.determined = true;
  return r;
}

/// Search interval wide enough to contain every cylinder critical exponent.
inline std::pair<double, double> critical_search_interval(const PotentialSeq& f) {
  const double norm = f.sup_norm();
  const auto& m = f.alphabet();
  return {std::log(static_cast<double>(m.min())) - norm - 1.0, std::log(static_cast<double>(m.max())) + norm + 1.0};
}

inline CriticalExponent critical_s(const PotentialSeq& f, OuterMeasureKind kind, std::size_t N, std::size_t depth_max,
                                   const Word& target, double tol, CylinderWeight weight = CylinderWeight::sup) {
  const CylinderTree tree(f, depth_max, target, weight);
  const auto [lo, hi] = critical_search_interval(f);
  return critical_s(tree, kind, N, tol, lo, hi);
}

// ---------------------------------------------------------------------------
// Rank uniformization

enum class UniformizeDirection { lower, upper };

struct RankCertificate {
  std::size_t rank = 0;
  long double cover_sum = 0.0L;
  long double uniform_sum = 0.0L;
};

/// Sum of long double terms in ascending order, so equal multisets of terms
/// give bit-identical sums.
inline long double canonical_sum(std::vector<long double> terms) {
  std::sort(terms.begin(), terms.end());
  long double acc = 0.0L;
  for (auto t : terms) acc += t;
  return acc;
}

/// Throws unless the words form a finite disjoint cover of the whole space
/// at their common level.
inline void require_disjoint_cover(const AlphabetSeq& m, const std::vector<Word>& cover) {
  if (cover.empty()) throw std::invalid_argument("cover is empty");
  const std::size_t level = cover.front().level;
  std::size_t depth = 0;
  for (const auto& u : cover) {
    if (u.level != level) throw std::invalid_argument("cover mixes levels");
    require_valid(m, u);
    depth = std::max(depth, u.size());
  }
  for (std::size_t a = 0; a < cover.size(); ++a)
    for (std::size_t b = a + 1; b < cover.size(); ++b)
      if (net_relation(cover[a], cover[b]) != NetRelation::disjoint)
        throw std::invalid_argument("cover is not disjoint");
  BigInt leaves = 0;
  for (const auto& u : cover) leaves += count_admissible(m, level + u.size(), depth - u.size());
  if (leaves != count_admissible(m, level, depth)) throw std::invalid_argument("cover is not complete");
}

inline long double cylinder_weight(const PotentialSeq& f, const Word& u, double s) {
  return std::exp(static_cast<long double>(-static_cast<double>(u.size()) * s) +
                  static_cast<long double>(cylinder_birkhoff(f, u, Extremum::sup)));
}

/// Sum over all rank-n words of the cylinder weights.
inline long double uniform_rank_weight(const PotentialSeq& f, std::size_t level, std::size_t n, double s) {
  std::vector<long double> terms;
  for_each_word(f.alphabet(), level, n, [&](const Word& u) { terms.push_back(cylinder_weight(f, u, s)); });
  return canonical_sum(std::move(terms));
}

/// Smallest n in [n_min, n_max] with cover sum >= rank-n sum (lower) or
/// cover sum <= rank-n sum (upper); both exist for first-coordinate f.
inline RankCertificate rank_uniformize(const std::vector<Word>& cover, const PotentialSeq& f, double s,
                                       UniformizeDirection direction) {
  if (f.kind() != PotentialKind::first_coord)
    throw std::invalid_argument("rank_uniformize needs a first-coordinate potential");
  require_disjoint_cover(f.alphabet(), cover);
  std::size_t n_min = std::numeric_limits<std::size_t>::max(), n_max = 0;
  std::vector<long double> terms;
  for (const auto& u : cover) {
    n_min = std::min(n_min, u.size());
    n_max = std::max(n_max, u.size());
    terms.push_back(cylinder_weight(f, u, s));
  }
  const long double cover_sum = canonical_sum(std::move(terms));
  const std::size_t level = cover.front().level;
  auto qualifies = [&](long double uni, long double slack) {
    return direction == UniformizeDirection::lower ? cover_sum >= uni * (1.0L - slack)
                                                   : cover_sum <= uni * (1.0L + slack);
  };
  // Exact comparison first; a rounding-level slack only if no rank passes.
  for (long double slack : {0.0L, 1e-15L}) {
    for (std::size_t n = n_min; n <= n_max; ++n) {
      const long double uni = uniform_rank_weight(f, level, n, s);
      if (qualifies(uni, slack)) return {n, cover_sum, uni};
    }
  }
  throw std::logic_error("rank_uniformize: no qualifying rank found");
}

// ---------------------------------------------------------------------------
// Homogeneity

struct HomogeneityReport {
  std::vector<double> full;        // s_n on the whole space
  std::vector<double> restricted;  // s_n over cylinders meeting [u]
  std::vector<double> difference;  // full - restricted
  double max_difference = 0.0;     // max over n >= n_from of |difference|
  double envelope_constant = 0.0;  // |difference_n| <= (|u| * C + gap_n) / n, gap_n from sbv_bound
  bool within_envelope = true;
};

/// Compares the capacity sums of the whole space and of [u] for n = 1..n_hi.
inline HomogeneityReport homogeneity_check(const PotentialSeq& f, const Word& u, std::size_t n_hi,
                                           std::size_t n_from = 1) {
  require_valid(f.alphabet(), u);
  if (u.level != 0) throw std::invalid_argument("homogeneity_check expects a level-0 word");
  HomogeneityReport r;
  const auto env = envelopes(f);
  const auto sbv = sbv_bound(f, n_hi);
  for (std::size_t j = 0; j < std::max(u.size(), std::size_t{1}); ++j) {
    double lo = kInf;
    for (Symbol i = 1; i <= f.alphabet()(j); ++i) lo = std::min(lo, env.lower.coefficient(j, i));
    r.envelope_constant = std::max(r.envelope_constant, log_partition(env.upper, j) - lo);
  }
  for (std::size_t n = 1; n <= n_hi; ++n) {
    const double dn = static_cast<double>(n);
    const double full = log_weighted_count(f, n, n, Extremum::sup) / dn;
    const double part = log_weighted_count(f, n, n, Extremum::sup, u) / dn;
    r.full.push_back(full);
    r.restricted.push_back(part);
    r.difference.push_back(full - part);
    if (n >= n_from) r.max_difference = std::max(r.max_difference, std::abs(full - part));
    const double bound = (static_cast<double>(u.size()) * r.envelope_constant + sbv.gaps[n - 1]) / dn;
    if (std::abs(full - part) > bound + 1e-12) r.within_envelope = false;
  }
  return r;
}

}  // namespace ntsym

#endif  // NTSYM_PRESSURE_HPP
