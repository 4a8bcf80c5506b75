#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flatflow/geometry.hpp"

namespace flatflow {

/// Finite union of closed arcs of the circle [0, period), stored as sorted,
/// pairwise disjoint intervals. Arcs crossing 0 are split in two.
class IntervalUnion {
 public:
  struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Interval&, const Interval&) = default;
  };

  explicit IntervalUnion(double period = kTwoPi) : period_(period) {}

  /// Union of arbitrary arcs [lo, hi] with lo <= hi, taken modulo period.
  static IntervalUnion from_arcs(const std::vector<std::pair<double, double>>& arcs, double period = kTwoPi);
  static IntervalUnion full(double period = kTwoPi);

  double period() const { return period_; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  double measure() const;
  bool contains(double x) const;

  IntervalUnion complement() const;
  IntervalUnion intersect(const IntervalUnion& other) const;

  /// [[lo,hi],...]
  std::string to_json() const;

 private:
  double period_;
  std::vector<Interval> intervals_;
};

}  // namespace flatflow
