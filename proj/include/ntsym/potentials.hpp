#ifndef NTSYM_POTENTIALS_HPP
#define NTSYM_POTENTIALS_HPP

// Potential sequences f = (f_k) on the sequence space. Two shapes are
// supported: first-coordinate potentials f_k(w) = a_{k, w_k}, and potentials
// that depend on the first D symbols through a table per level.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "periodic.hpp"
#include "seqspace.hpp"

namespace ntsym {

enum class PotentialKind { first_coord, depth };

/// How a_{j,i} is picked from [inf f_j over [i]_j, sup f_j over [i]_j].
enum class EnvelopePolicy { lower, midpoint, upper };

inline const char* to_string(EnvelopePolicy p) {
  switch (p) {
    case EnvelopePolicy::lower: return "lower";
    case EnvelopePolicy::midpoint: return "midpoint";
    case EnvelopePolicy::upper: return "upper";
  }
  return "?";
}

class PotentialSeq {
 public:
  using Table = std::vector<double>;

  PotentialSeq() = default;

  /// a_{k,i} for i = 1..m_k; tables[k][i-1].
  static PotentialSeq first_coord(AlphabetSeq m, std::vector<Table> head, std::vector<Table> period) {
    return PotentialSeq(std::move(m), PotentialKind::first_coord, 1, std::move(head), std::move(period));
  }

  /// f_k as a table over the words of length D at level k, in lexicographic
  /// order (last symbol varies fastest).
  static PotentialSeq depth_dependent(AlphabetSeq m, std::size_t depth, std::vector<Table> head,
                                      std::vector<Table> period) {
    if (depth == 0) throw std::invalid_argument("potential depth must be >= 1");
    return PotentialSeq(std::move(m), PotentialKind::depth, depth, std::move(head), std::move(period));
  }

  static PotentialSeq constant(const AlphabetSeq& m, double c) {
    auto row = [c](Symbol size) { return Table(size, c); };
    std::vector<Table> h, p;
    for (auto s : m.head()) h.push_back(row(s));
    for (auto s : m.period()) p.push_back(row(s));
    return first_coord(m, std::move(h), std::move(p));
  }

  static PotentialSeq zero(const AlphabetSeq& m) { return constant(m, 0.0); }

  /// The same a-vector at every level; requires a constant alphabet size.
  static PotentialSeq uniform_first_coord(const AlphabetSeq& m, Table a) {
    if (m.min() != m.max() || a.size() != m.max()) {
      throw std::invalid_argument("uniform first-coordinate table needs constant m matching its length");
    }
    return first_coord(m, {}, {std::move(a)});
  }

  PotentialKind kind() const noexcept { return kind_; }
  std::size_t depth() const noexcept { return depth_; }
  const AlphabetSeq& alphabet() const noexcept { return m_; }
  const Table& table(std::size_t k) const { return tables_(k); }
  const EventuallyPeriodic<Table>& tables() const noexcept { return tables_; }

  /// Number of entries table(k) must have.
  std::size_t table_size(std::size_t k) const {
    std::size_t s = 1;
    for (std::size_t i = 0; i < depth_; ++i) s *= m_(k + i);
    return s;
  }

  /// f_k evaluated on any point whose symbols from level k on start with
  /// window (only the first depth() symbols are read).
  double value(std::size_t k, std::span<const Symbol> window) const {
    if (window.size() < depth_) throw depth_error("potential window shorter than its depth");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < depth_; ++i) idx = idx * m_(k + i) + (window[i] - 1);
    return tables_(k)[idx];
  }

  /// a_{k,i}; first-coordinate potentials only.
  double coefficient(std::size_t k, Symbol i) const {
    if (kind_ != PotentialKind::first_coord) throw std::logic_error("coefficient() needs a first-coordinate potential");
    return tables_(k)[i - 1];
  }

  /// ||f|| = sup_k sup |f_k|.
  double sup_norm() const {
    double r = 0.0;
    for (const auto& t : tables_.head())
      for (double x : t) r = std::max(r, std::abs(x));
    for (const auto& t : tables_.period())
      for (double x : t) r = std::max(r, std::abs(x));
    return r;
  }

  /// Levels whose tables and alphabets determine every other level.
  std::size_t horizon() const {
    return joint_horizon(m_.head().size(), m_.period().size(), tables_.head().size(), tables_.period().size()) +
           depth_;
  }

 private:
  PotentialSeq(AlphabetSeq m, PotentialKind kind, std::size_t depth, std::vector<Table> head,
               std::vector<Table> period)
      : m_(std::move(m)), kind_(kind), depth_(depth), tables_(std::move(head), std::move(period)) {
    for (std::size_t k = 0; k < horizon(); ++k) {
      const auto& t = tables_(k);
      if (t.size() != table_size(k)) {
        throw std::invalid_argument("potential table at level " + std::to_string(k) + " has " +
                                    std::to_string(t.size()) + " entries, expected " + std::to_string(table_size(k)));
      }
      for (double x : t) {
        if (!std::isfinite(x)) throw std::invalid_argument("potential table entries must be finite");
      }
    }
  }

  AlphabetSeq m_;
  PotentialKind kind_ = PotentialKind::first_coord;
  std::size_t depth_ = 1;
  EventuallyPeriodic<Table> tables_;
};

/// S_n f(omega) = sum_{j<n} f_{k+j}(sigma^j omega) for omega at level k.
inline double birkhoff_sum(const PotentialSeq& f, const PointPrefix& w, std::size_t n) {
  if (n == 0) return 0.0;
  const std::size_t need = n + f.depth() - 1;
  if (!w.resolvable(need)) throw depth_error("birkhoff_sum: prefix must resolve to depth " + std::to_string(need));
  const Word prefix = w.curtail(need);
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    s += f.value(w.level() + j, std::span<const Symbol>(prefix.symbols).subspan(j));
  }
  return s;
}

/// First-coordinate lower and upper envelopes f_* <= f <= f^*.
struct EnvelopePair {
  PotentialSeq lower;
  PotentialSeq upper;
};

inline EnvelopePair envelopes(const PotentialSeq& f) {
  if (f.kind() == PotentialKind::first_coord) return {f, f};
  const auto& m = f.alphabet();
  const std::size_t head_len = std::max(m.head().size(), f.tables().head().size());
  const std::size_t per_len = f.horizon() - f.depth() - head_len;
  auto level_rows = [&](std::size_t k) {
    const auto& t = f.table(k);
    const std::size_t block = t.size() / m(k);
    PotentialSeq::Table lo(m(k)), hi(m(k));
    for (std::size_t i = 0; i < m(k); ++i) {
      auto first = t.begin() + static_cast<std::ptrdiff_t>(i * block);
      auto last = first + static_cast<std::ptrdiff_t>(block);
      lo[i] = *std::min_element(first, last);
      hi[i] = *std::max_element(first, last);
    }
    return std::pair{lo, hi};
  };
  std::vector<PotentialSeq::Table> lh, lp, uh, up;
  for (std::size_t k = 0; k < head_len + per_len; ++k) {
    auto [lo, hi] = level_rows(k);
    (k < head_len ? lh : lp).push_back(std::move(lo));
    (k < head_len ? uh : up).push_back(std::move(hi));
  }
  return {PotentialSeq::first_coord(m, std::move(lh), std::move(lp)),
          PotentialSeq::first_coord(m, std::move(uh), std::move(up))};
}

/// First-coordinate reduction with a_{j,i} chosen by policy.
inline PotentialSeq reduce(const PotentialSeq& f, EnvelopePolicy policy) {
  if (f.kind() == PotentialKind::first_coord) return f;
  auto env = envelopes(f);
  if (policy == EnvelopePolicy::lower) return env.lower;
  if (policy == EnvelopePolicy::upper) return env.upper;
  auto mid = [](const std::vector<PotentialSeq::Table>& a, const std::vector<PotentialSeq::Table>& b) {
    std::vector<PotentialSeq::Table> out = a;
    for (std::size_t k = 0; k < a.size(); ++k)
      for (std::size_t i = 0; i < a[k].size(); ++i) out[k][i] = 0.5 * (a[k][i] + b[k][i]);
    return out;
  };
  return PotentialSeq::first_coord(f.alphabet(), mid(env.lower.tables().head(), env.upper.tables().head()),
                                   mid(env.lower.tables().period(), env.upper.tables().period()));
}

/// Strong-bounded-variation diagnostic: gap_n = max over rank-n cylinders
/// [u] of S_n f^* - S_n f_* on [u], for n = 1..n_max.
struct SbvReport {
  std::vector<double> gaps;  // gaps[n-1]
  double bound = 0.0;        // max_n gap_n
  /// gap_n - gap_{n-1} is non-increasing over the second half of the window,
  /// which is what a convergent (bounded) gap sequence looks like.
  bool increments_settle = true;
  double last_increment = 0.0;
};

inline SbvReport sbv_bound(const PotentialSeq& f, std::size_t n_max) {
  if (n_max == 0) throw std::invalid_argument("sbv_bound: n_max must be >= 1");
  const auto env = envelopes(f);
  const auto& m = f.alphabet();
  SbvReport r;
  // Both envelopes are first-coordinate, so S_n f^* - S_n f_* on [u] is a
  // sum of per-level terms and its maximum over u splits level by level.
  double acc = 0.0;
  std::vector<double> inc;
  for (std::size_t j = 0; j < n_max; ++j) {
    double best = 0.0;
    for (Symbol i = 1; i <= m(j); ++i) best = std::max(best, env.upper.coefficient(j, i) - env.lower.coefficient(j, i));
    acc += best;
    inc.push_back(best);
    r.gaps.push_back(acc);
  }
  r.bound = acc;
  r.last_increment = inc.back();
  for (std::size_t j = n_max / 2 + 1; j < n_max; ++j) {
    if (inc[j] > inc[j - 1] + 1e-15) r.increments_settle = false;
  }
  return r;
}

}  // namespace ntsym

#endif  // NTSYM_POTENTIALS_HPP
