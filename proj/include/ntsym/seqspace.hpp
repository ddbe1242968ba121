#ifndef NTSYM_SEQSPACE_HPP
#define NTSYM_SEQSPACE_HPP

// Nonautonomous one-sided sequence spaces: the alphabet-size sequence m,
// finite words and the cylinders they define, points given by finite or
// eventually periodic prefixes, the metric e^{-|common prefix|}, the shift,
// and the cylinder form of Bowen balls.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "periodic.hpp"

namespace ntsym {

using BigInt = boost::multiprecision::cpp_int;
using Symbol = unsigned;

/// Alphabet sizes m_k >= 2, eventually periodic in k.
class AlphabetSeq {
 public:
  AlphabetSeq() : sizes_({}, {2}) {}

  AlphabetSeq(std::vector<Symbol> head, std::vector<Symbol> period)
      : sizes_(std::move(head), std::move(period)) {
    auto bad = [](Symbol s) { return s < 2; };
    if (std::any_of(sizes_.head().begin(), sizes_.head().end(), bad) ||
        std::any_of(sizes_.period().begin(), sizes_.period().end(), bad)) {
      throw std::invalid_argument("alphabet sizes must be >= 2");
    }
  }

  static AlphabetSeq constant(Symbol m) { return AlphabetSeq({}, {m}); }

  Symbol operator()(std::size_t k) const { return sizes_(k); }

  const std::vector<Symbol>& head() const noexcept { return sizes_.head(); }
  const std::vector<Symbol>& period() const noexcept { return sizes_.period(); }

  Symbol max() const {
    Symbol r = 0;
    for (auto s : head()) r = std::max(r, s);
    for (auto s : period()) r = std::max(r, s);
    return r;
  }

  Symbol min() const {
    Symbol r = std::numeric_limits<Symbol>::max();
    for (auto s : head()) r = std::min(r, s);
    for (auto s : period()) r = std::min(r, s);
    return r;
  }

  bool operator==(const AlphabetSeq&) const = default;

 private:
  EventuallyPeriodic<Symbol> sizes_;
};

/// A finite word u = u_k ... u_{k+|u|-1} at level k, symbols 1-based. It
/// names the cylinder [u]_k; the empty word names the whole space.
struct Word {
  std::size_t level = 0;
  std::vector<Symbol> symbols;

  std::size_t size() const noexcept { return symbols.size(); }
  bool empty() const noexcept { return symbols.empty(); }
  Symbol operator[](std::size_t j) const { return symbols[j]; }

  /// u|n, the first n symbols.
  Word curtail(std::size_t n) const {
    if (n > symbols.size()) throw depth_error("curtailment longer than the word");
    return Word{level, std::vector<Symbol>(symbols.begin(), symbols.begin() + static_cast<std::ptrdiff_t>(n))};
  }

  Word extended(Symbol s) const {
    Word w = *this;
    w.symbols.push_back(s);
    return w;
  }

  bool operator==(const Word&) const = default;
  auto operator<=>(const Word&) const = default;
};

inline bool is_valid(const AlphabetSeq& m, const Word& u) {
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] < 1 || u[j] > m(u.level + j)) return false;
  }
  return true;
}

inline void require_valid(const AlphabetSeq& m, const Word& u) {
  if (!is_valid(m, u)) throw std::invalid_argument("word symbol outside its level's alphabet");
}

/// A point of Sigma_k given by a finite head and an optional periodic tail.
/// With an empty tail only the head is resolvable.
class PointPrefix {
 public:
  PointPrefix() = default;

  static PointPrefix finite(std::size_t level, std::vector<Symbol> symbols) {
    PointPrefix p;
    p.level_ = level;
    p.head_ = std::move(symbols);
    return p;
  }

  static PointPrefix periodic(std::size_t level, std::vector<Symbol> head, std::vector<Symbol> tail) {
    if (tail.empty()) throw std::invalid_argument("periodic point needs a nonempty tail");
    PointPrefix p;
    p.level_ = level;
    p.head_ = std::move(head);
    p.tail_ = std::move(tail);
    return p;
  }

  static PointPrefix from_word(const Word& w) { return finite(w.level, w.symbols); }

  std::size_t level() const noexcept { return level_; }
  bool infinite() const noexcept { return !tail_.empty(); }

  /// Largest depth to which the point is known, or SIZE_MAX when infinite.
  std::size_t depth() const noexcept {
    return infinite() ? std::numeric_limits<std::size_t>::max() : head_.size();
  }

  bool resolvable(std::size_t depth) const noexcept { return infinite() || depth <= head_.size(); }

  /// omega_{level + j}
  Symbol operator[](std::size_t j) const {
    if (j < head_.size()) return head_[j];
    if (!infinite()) throw depth_error("point prefix not resolvable to depth " + std::to_string(j + 1));
    return tail_[(j - head_.size()) % tail_.size()];
  }

  /// omega|n as a word at the same level.
  Word curtail(std::size_t n) const {
    if (!resolvable(n)) throw depth_error("point prefix not resolvable to depth " + std::to_string(n));
    Word w{level_, {}};
    w.symbols.reserve(n);
    for (std::size_t j = 0; j < n; ++j) w.symbols.push_back((*this)[j]);
    return w;
  }

  const std::vector<Symbol>& head() const noexcept { return head_; }
  const std::vector<Symbol>& tail() const noexcept { return tail_; }

  PointPrefix shifted() const {
    PointPrefix p;
    p.level_ = level_ + 1;
    if (!head_.empty()) {
      p.head_.assign(head_.begin() + 1, head_.end());
      p.tail_ = tail_;
    } else if (infinite()) {
      p.tail_.assign(tail_.begin() + 1, tail_.end());
      p.tail_.push_back(tail_.front());
    } else {
      throw std::invalid_argument("cannot shift an empty prefix");
    }
    return p;
  }

 private:
  std::size_t level_ = 0;
  std::vector<Symbol> head_;
  std::vector<Symbol> tail_;
};

/// Length of the common initial word, or saturation at max_depth.
struct MeetLength {
  std::size_t length = 0;
  bool saturated = false;  // no disagreement found within max_depth
};

inline MeetLength meet_length(const PointPrefix& a, const PointPrefix& b, std::size_t max_depth) {
  if (a.level() != b.level()) throw std::invalid_argument("meet_length: level mismatch");
  if (!a.resolvable(max_depth) || !b.resolvable(max_depth)) {
    throw depth_error("meet_length: points not resolvable to max_depth");
  }
  for (std::size_t j = 0; j < max_depth; ++j) {
    if (a[j] != b[j]) return {j, false};
  }
  return {max_depth, true};
}

/// d_k(a, b) = e^{-|a ^ b|}; 0 when the points agree through max_depth.
inline double metric(const PointPrefix& a, const PointPrefix& b, std::size_t max_depth) {
  const auto ml = meet_length(a, b, max_depth);
  return ml.saturated ? 0.0 : std::exp(-static_cast<double>(ml.length));
}

struct BallSpec {
  std::size_t n = 1;
  double eps = 1.0;
  bool closed = false;
};

struct BallRank {
  std::size_t rank = 0;
  bool clamped = false;      // formula went negative and was clamped to 0
  bool whole_space = false;  // radius reaches the diameter 1: the ball is everything
};

/// -log(eps), snapped to the nearest integer when within rounding of it so
/// that eps = e^{-r} is treated as an exact ladder point.
inline double neg_log_radius(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("Bowen ball radius must be positive");
  const double x = -std::log(eps);
  const double r = std::round(x);
  return std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x)) ? r : x;
}

/// Rank of the cylinder that equals the n-th Bowen ball of radius eps in
/// the shift: open n + floor(-log eps + 1) - 1, closed n + ceil(-log eps) - 1.
/// Distances never exceed 1, so a closed ball of radius >= 1 or an open one
/// of radius > 1 is the whole space (rank 0) whatever n is.
inline BallRank bowen_ball_rank(const BallSpec& spec) {
  const double t = neg_log_radius(spec.eps);
  if (spec.closed ? t <= 0.0 : t < 0.0) return {0, false, true};
  const double offset = spec.closed ? std::ceil(t) : std::floor(t + 1.0);
  const double r = static_cast<double>(spec.n) + offset - 1.0;
  if (r < 0.0) return {0, true};
  return {static_cast<std::size_t>(r), false};
}

enum class NetRelation { disjoint, u_contains_v, v_contains_u, equal };

inline const char* to_string(NetRelation r) {
  switch (r) {
    case NetRelation::disjoint: return "disjoint";
    case NetRelation::u_contains_v: return "u_contains_v";
    case NetRelation::v_contains_u: return "v_contains_u";
    case NetRelation::equal: return "equal";
  }
  return "?";
}

inline bool is_prefix(const Word& u, const Word& v) {
  return u.level == v.level && u.size() <= v.size() &&
         std::equal(u.symbols.begin(), u.symbols.end(), v.symbols.begin());
}

/// Cylinders at one level are either disjoint or nested.
inline NetRelation net_relation(const Word& u, const Word& v) {
  if (u.level != v.level) throw std::invalid_argument("net_relation: level mismatch");
  const std::size_t n = std::min(u.size(), v.size());
  if (!std::equal(u.symbols.begin(), u.symbols.begin() + static_cast<std::ptrdiff_t>(n), v.symbols.begin())) {
    return NetRelation::disjoint;
  }
  if (u.size() == v.size()) return NetRelation::equal;
  return u.size() < v.size() ? NetRelation::u_contains_v : NetRelation::v_contains_u;
}

inline Word shift(const Word& w) {
  if (w.empty()) throw std::invalid_argument("cannot shift the empty word");
  return Word{w.level + 1, std::vector<Symbol>(w.symbols.begin() + 1, w.symbols.end())};
}

inline PointPrefix shift(const PointPrefix& p) { return p.shifted(); }

/// Number of words of length n at level k: prod_{j=k}^{k+n-1} m_j.
inline BigInt count_admissible(const AlphabetSeq& m, std::size_t k, std::size_t n) {
  BigInt c = 1;
  for (std::size_t j = 0; j < n; ++j) c *= m(k + j);
  return c;
}

/// Calls fn(word) for every word of length n at level k, in lexicographic
/// order (last symbol fastest).
template <class F>
void for_each_word(const AlphabetSeq& m, std::size_t k, std::size_t n, F&& fn) {
  Word w{k, std::vector<Symbol>(n, 1)};
  while (true) {
    fn(static_cast<const Word&>(w));
    std::size_t j = n;
    while (j > 0) {
      --j;
      if (w.symbols[j] < m(k + j)) {
        ++w.symbols[j];
        break;
      }
      w.symbols[j] = 1;
      if (j == 0) return;
    }
    if (n == 0) return;
  }
}

/// All words of length n at level k, in lexicographic order.
inline std::vector<Word> words_of_length(const AlphabetSeq& m, std::size_t k, std::size_t n) {
  std::vector<Word> out;
  for_each_word(m, k, n, [&](const Word& w) { out.push_back(w); });
  return out;
}

}  // namespace ntsym

#endif  // NTSYM_SEQSPACE_HPP
