#ifndef NTSYM_PERIODIC_HPP
#define NTSYM_PERIODIC_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ntsym {

/// A sequence indexed by level k >= 0 that is stored as a finite head
/// followed by a periodic tail: x_k = head[k] for k < |head|, and
/// x_k = period[(k - |head|) mod |period|] afterwards.
template <class T>
class EventuallyPeriodic {
 public:
  EventuallyPeriodic() = default;

  EventuallyPeriodic(std::vector<T> head, std::vector<T> period)
      : head_(std::move(head)), period_(std::move(period)) {
    if (period_.empty()) {
      throw std::invalid_argument("eventually periodic sequence needs a nonempty period");
    }
  }

  static EventuallyPeriodic constant(T value) { return EventuallyPeriodic({}, {std::move(value)}); }

  const T& operator()(std::size_t k) const {
    if (k < head_.size()) return head_[k];
    return period_[(k - head_.size()) % period_.size()];
  }

  const std::vector<T>& head() const noexcept { return head_; }
  const std::vector<T>& period() const noexcept { return period_; }

  /// Number of distinct stored entries; every level maps onto one of them.
  std::size_t represented() const noexcept { return head_.size() + period_.size(); }

  template <class F>
  auto map(F&& fn) const -> EventuallyPeriodic<decltype(fn(std::declval<const T&>()))> {
    using U = decltype(fn(std::declval<const T&>()));
    std::vector<U> h, p;
    h.reserve(head_.size());
    p.reserve(period_.size());
    for (const auto& x : head_) h.push_back(fn(x));
    for (const auto& x : period_) p.push_back(fn(x));
    return EventuallyPeriodic<U>(std::move(h), std::move(p));
  }

  bool operator==(const EventuallyPeriodic&) const = default;

 private:
  std::vector<T> head_;
  std::vector<T> period_{T{}};
};

/// A level bound past which two eventually periodic sequences (with the
/// given head lengths and periods) jointly repeat: every level k has a
/// representative k' < joint_horizon(...) with identical values of both.
inline std::size_t joint_horizon(std::size_t head_a, std::size_t period_a, std::size_t head_b,
                                 std::size_t period_b) {
  return std::max(head_a, head_b) + std::lcm(period_a, period_b);
}

}  // namespace ntsym

#endif  // NTSYM_PERIODIC_HPP
