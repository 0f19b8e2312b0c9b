#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace pmuf::detail {

// Multiset of the values currently inside a sliding window, kept sorted so
// the median is O(1) and the MAD a k-th-element merge.
class SortedWindow {
 public:
  void reserve(std::size_t n) { sorted_.reserve(n); }
  void clear() { sorted_.clear(); }
  std::size_t size() const noexcept { return sorted_.size(); }
  bool empty() const noexcept { return sorted_.empty(); }

  void insert(double v) {
    sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), v), v);
  }

  // v must have been inserted earlier.
  void erase(double v) {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), v);
    if (it != sorted_.end() && *it == v) sorted_.erase(it);
  }

  double median() const {
    const std::size_t n = sorted_.size();
    if (n % 2 == 1) return sorted_[n / 2];
    return 0.5 * (sorted_[n / 2 - 1] + sorted_[n / 2]);
  }

  // Median of |x - center| over the window. The deviations to the left of
  // `center` are increasing as we walk left, to the right as we walk right,
  // so the k-th smallest comes from merging the two runs.
  double median_abs_deviation(double center) const {
    const std::size_t n = sorted_.size();
    if (n == 0) return 0.0;
    const auto split = std::lower_bound(sorted_.begin(), sorted_.end(), center);
    std::ptrdiff_t left = (split - sorted_.begin()) - 1;
    std::size_t right = static_cast<std::size_t>(split - sorted_.begin());
    const std::size_t hi_rank = n / 2;
    double prev = 0.0;
    double cur = 0.0;
    for (std::size_t rank = 0; rank <= hi_rank; ++rank) {
      const bool take_left =
          right >= n || (left >= 0 && center - sorted_[static_cast<std::size_t>(left)] <
                                          sorted_[right] - center);
      prev = cur;
      if (take_left) {
        cur = center - sorted_[static_cast<std::size_t>(left)];
        --left;
      } else {
        cur = sorted_[right] - center;
        ++right;
      }
    }
    return n % 2 == 1 ? cur : 0.5 * (prev + cur);
  }

 private:
  std::vector<double> sorted_;
};

}  // namespace pmuf::detail
