#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace flatflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double angle_of(Vec2 a) { return std::atan2(a.y, a.x); }
inline Vec2 unit_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps any angle into [0, 2pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// 2x2 linear map, row-major.
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  constexpr Vec2 operator()(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  friend constexpr Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c,
            m.c * n.b + m.d * n.d};
  }
  constexpr double det() const { return a * d - b * c; }
  Mat2 inverse() const {
    const double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
  }
  static Mat2 rotation(double angle) {
    const double cs = std::cos(angle), sn = std::sin(angle);
    return {cs, -sn, sn, cs};
  }
  /// Reflection across the line through the origin at the given angle.
  static Mat2 reflection(double line_angle) {
    const double cs = std::cos(2.0 * line_angle), sn = std::sin(2.0 * line_angle);
    return {cs, sn, sn, -cs};
  }
};

double signed_area(std::span<const Vec2> poly);

/// Largest vertex-to-vertex distance.
double polygon_diameter(std::span<const Vec2> poly);

/// Even-odd test; points on the boundary may land on either side.
bool point_in_polygon(std::span<const Vec2> poly, Vec2 p);

/// Distance from p to the closed segment [a, b].
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// True when the closed segments [a, b] and [c, d] share a point.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// True when no two non-adjacent edges of the closed polygon meet.
bool is_simple_polygon(std::span<const Vec2> poly);

/// Interior angle at vertex i of a counterclockwise polygon, in (0, 2pi).
double interior_angle(std::span<const Vec2> poly, std::size_t i);

/// Sutherland-Hodgman clip of an arbitrary polygon against an axis-aligned box.
std::vector<Vec2> clip_to_box(std::span<const Vec2> poly, Vec2 lo, Vec2 hi);

/// Length of the part of segment [a, b] that lies inside the simple polygon.
double segment_length_inside(std::span<const Vec2> poly, Vec2 a, Vec2 b);

/// Best inscribed circle found by grid search plus pattern refinement.
/// The returned radius is exact for the returned centre, so it is always a
/// valid lower bound on the true inradius.
struct InscribedCircle {
  Vec2 centre;
  double radius = 0.0;
};
InscribedCircle largest_inscribed_circle(std::span<const Vec2> poly);

}  // namespace flatflow
