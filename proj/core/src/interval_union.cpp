#include "flatflow/interval_union.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "flatflow/error.hpp"

namespace flatflow {

IntervalUnion IntervalUnion::from_arcs(const std::vector<std::pair<double, double>>& arcs, double period) {
  IntervalUnion u(period);
  std::vector<Interval> raw;
  raw.reserve(arcs.size() + 2);
  for (auto [lo, hi] : arcs) {
    if (!(hi >= lo)) throw Error(ErrorCode::InvalidArgument, "arc with hi < lo");
    if (hi - lo >= period) return full(period);
    double a = std::fmod(lo, period);
    if (a < 0.0) a += period;
    const double b = a + (hi - lo);
    if (b <= period) {
      raw.push_back({a, b});
    } else {
      raw.push_back({a, period});
      raw.push_back({0.0, b - period});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (const Interval& iv : raw) {
    if (!u.intervals_.empty() && iv.lo <= u.intervals_.back().hi)
      u.intervals_.back().hi = std::max(u.intervals_.back().hi, iv.hi);
    else
      u.intervals_.push_back(iv);
  }
  return u;
}

IntervalUnion IntervalUnion::full(double period) {
  IntervalUnion u(period);
  u.intervals_.push_back({0.0, period});
  return u;
}

double IntervalUnion::measure() const {
  double m = 0.0;
  for (const Interval& iv : intervals_) m += iv.hi - iv.lo;
  return m;
}

bool IntervalUnion::contains(double x) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return false;
  return x <= (it - 1)->hi;
}

IntervalUnion IntervalUnion::complement() const {
  IntervalUnion c(period_);
  double cursor = 0.0;
  for (const Interval& iv : intervals_) {
    if (iv.lo > cursor) c.intervals_.push_back({cursor, iv.lo});
    cursor = std::max(cursor, iv.hi);
  }
  if (cursor < period_) c.intervals_.push_back({cursor, period_});
  return c;
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion& other) const {
  IntervalUnion r(period_);
  std::size_t i = 0, j = 0;
  const auto& a = intervals_;
  const auto& b = other.intervals_;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].lo, b[j].lo), hi = std::min(a[i].hi, b[j].hi);
    if (lo < hi) r.intervals_.push_back({lo, hi});
    if (a[i].hi < b[j].hi)
      ++i;
    else
      ++j;
  }
  return r;
}

std::string IntervalUnion::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const Interval& iv : intervals_) j.push_back({iv.lo, iv.hi});
  return j.dump();
}

}  // namespace flatflow
