#include "flatflow/geometry.hpp"

#include <algorithm>
#include <limits>

namespace flatflow {

double signed_area(std::span<const Vec2> poly) {
  double twice = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * twice;
}

double polygon_diameter(std::span<const Vec2> poly) {
  double best = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j) best = std::max(best, norm(poly[i] - poly[j]));
  return best;
}

bool point_in_polygon(std::span<const Vec2> poly, Vec2 p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xcross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xcross) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * d));
}

namespace {

int orient(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool is_simple_polygon(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (poly[i] == poly[(i + 1) % n]) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  // Adjacent edges folding back onto each other.
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 prev = poly[(i + n - 1) % n], cur = poly[i], next = poly[(i + 1) % n];
    if (cross(cur - prev, next - cur) == 0.0 && dot(cur - prev, next - cur) < 0.0) return false;
  }
  return true;
}

double interior_angle(std::span<const Vec2> poly, std::size_t i) {
  const std::size_t n = poly.size();
  const Vec2 out = poly[(i + 1) % n] - poly[i];
  const Vec2 back = poly[(i + n - 1) % n] - poly[i];
  double a = std::atan2(cross(out, back), dot(out, back));
  if (a <= 0.0) a += kTwoPi;
  return a;
}

std::vector<Vec2> clip_to_box(std::span<const Vec2> poly, Vec2 lo, Vec2 hi) {
  std::vector<Vec2> cur(poly.begin(), poly.end());
  // Each plane: keep points with sign * coord(p) >= sign * bound.
  struct Plane {
    bool use_x;
    double bound;
    double sign;
  };
  const Plane planes[4] = {{true, lo.x, 1.0}, {true, hi.x, -1.0}, {false, lo.y, 1.0}, {false, hi.y, -1.0}};
  for (const Plane& pl : planes) {
    if (cur.empty()) break;
    std::vector<Vec2> next;
    next.reserve(cur.size() + 4);
    auto value = [&](Vec2 p) { return pl.sign * ((pl.use_x ? p.x : p.y) - pl.bound); };
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const Vec2 a = cur[i], b = cur[(i + 1) % cur.size()];
      const double va = value(a), vb = value(b);
      if (va >= 0.0) next.push_back(a);
      if ((va >= 0.0) != (vb >= 0.0)) {
        const double t = va / (va - vb);
        Vec2 p = a + t * (b - a);
        if (pl.use_x)
          p.x = pl.bound;
        else
          p.y = pl.bound;
        next.push_back(p);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

double segment_length_inside(std::span<const Vec2> poly, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len = norm(d);
  if (len == 0.0) return 0.0;
  std::vector<double> params{0.0, 1.0};
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = poly[i], e = poly[(i + 1) % n] - poly[i];
    const double den = cross(d, e);
    if (den == 0.0) continue;
    const Vec2 r = p - a;
    const double t = cross(r, e) / den;
    const double s = cross(r, d) / den;
    if (t > 0.0 && t < 1.0 && s >= 0.0 && s <= 1.0) params.push_back(t);
  }
  std::sort(params.begin(), params.end());
  double inside = 0.0;
  for (std::size_t i = 0; i + 1 < params.size(); ++i) {
    const double t0 = params[i], t1 = params[i + 1];
    if (t1 <= t0) continue;
    const Vec2 mid = a + (0.5 * (t0 + t1)) * d;
    if (point_in_polygon(poly, mid)) inside += (t1 - t0) * len;
  }
  return inside;
}

namespace {

double boundary_distance(std::span<const Vec2> poly, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  return best;
}

}  // namespace

InscribedCircle largest_inscribed_circle(std::span<const Vec2> poly) {
  Vec2 lo = poly[0], hi = poly[0];
  for (Vec2 p : poly) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  constexpr int kGrid = 48;
  InscribedCircle best{};
  const Vec2 span = hi - lo;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const Vec2 p{lo.x + span.x * (i + 0.5) / kGrid, lo.y + span.y * (j + 0.5) / kGrid};
      if (!point_in_polygon(poly, p)) continue;
      const double r = boundary_distance(poly, p);
      if (r > best.radius) best = {p, r};
    }
  }
  if (best.radius == 0.0) return best;
  // Compass search around the best grid point.
  double step = std::max(span.x, span.y) / kGrid;
  const Vec2 dirs[8] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  while (step > 1e-12 * std::max(span.x, span.y)) {
    bool improved = false;
    for (Vec2 d : dirs) {
      const Vec2 p = best.centre + step * d;
      if (!point_in_polygon(poly, p)) continue;
      const double r = boundary_distance(poly, p);
      if (r > best.radius) {
        best = {p, r};
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace flatflow
