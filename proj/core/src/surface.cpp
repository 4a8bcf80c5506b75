#include "flatflow/surface.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "flatflow/error.hpp"

namespace flatflow {

namespace {

std::string ref_str(EdgeRef e) { return "(" + std::to_string(e.face) + "," + std::to_string(e.edge) + ")"; }

int find_root(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    x = parent[static_cast<std::size_t>(x)];
  }
  return x;
}

void validate_polygon(const Polygon& p, std::size_t index) {
  const std::string where = "face " + std::to_string(index);
  if (p.size() < 3) throw Error(ErrorCode::InvalidPolygon, where + " has fewer than 3 vertices");
  for (Vec2 v : p.vertices)
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw Error(ErrorCode::InvalidPolygon, where + " has a non-finite vertex");
  if (!is_simple_polygon(p.vertices)) throw Error(ErrorCode::InvalidPolygon, where + " is not simple");
  if (!(p.area() > 0.0)) throw Error(ErrorCode::InvalidPolygon, where + " is not counterclockwise");
}

}  // namespace

TranslationSurface build_surface(std::vector<Polygon> faces, std::span<const EdgePairing> pairing) {
  if (faces.empty()) throw Error(ErrorCode::InvalidPolygon, "surface has no faces");
  for (std::size_t i = 0; i < faces.size(); ++i) validate_polygon(faces[i], i);

  TranslationSurface s;
  s.faces_ = std::move(faces);
  const std::size_t nf = s.faces_.size();
  s.edge_offset_.resize(nf + 1, 0);
  for (std::size_t f = 0; f < nf; ++f) s.edge_offset_[f + 1] = s.edge_offset_[f] + s.faces_[f].size();
  const std::size_t total_edges = s.edge_offset_[nf];

  for (const Polygon& p : s.faces_) s.max_face_diameter_ = std::max(s.max_face_diameter_, polygon_diameter(p.vertices));
  const double tol = s.tolerance();

  auto in_range = [&](EdgeRef e) {
    return e.face >= 0 && static_cast<std::size_t>(e.face) < nf && e.edge >= 0 &&
           static_cast<std::size_t>(e.edge) < s.faces_[static_cast<std::size_t>(e.face)].size();
  };
  const EdgeRef unset{-1, -1};
  s.partner_.assign(total_edges, unset);
  for (const EdgePairing& pr : pairing) {
    if (!in_range(pr.first) || !in_range(pr.second))
      throw Error(ErrorCode::UnpairedEdge, "pairing refers to a missing edge " + ref_str(pr.first) + "-" + ref_str(pr.second));
    if (pr.first == pr.second) throw Error(ErrorCode::UnpairedEdge, "edge " + ref_str(pr.first) + " paired with itself");
    for (EdgeRef e : {pr.first, pr.second})
      if (s.partner_[s.index(e)] != unset) throw Error(ErrorCode::UnpairedEdge, "edge " + ref_str(e) + " paired twice");
    s.partner_[s.index(pr.first)] = pr.second;
    s.partner_[s.index(pr.second)] = pr.first;
  }
  for (std::size_t f = 0; f < nf; ++f)
    for (std::size_t k = 0; k < s.faces_[f].size(); ++k) {
      const EdgeRef e{static_cast<int>(f), static_cast<int>(k)};
      if (s.partner_[s.index(e)] == unset) throw Error(ErrorCode::UnpairedEdge, "edge " + ref_str(e) + " is unpaired");
    }

  std::vector<int> parent(nf);
  std::iota(parent.begin(), parent.end(), 0);
  s.translation_.assign(total_edges, Vec2{});
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t k = 0; k < s.faces_[f].size(); ++k) {
      const EdgeRef e{static_cast<int>(f), static_cast<int>(k)};
      const EdgeRef o = s.partner(e);
      const Vec2 ve = s.edge_vector(e), vo = s.edge_vector(o);
      if (e < o) {
        if (std::abs(norm(ve) - norm(vo)) > tol)
          throw Error(ErrorCode::LengthMismatch, "edges " + ref_str(e) + " and " + ref_str(o) + " differ in length");
        if (norm(ve + vo) > tol)
          throw Error(ErrorCode::NotAntiparallel, "edges " + ref_str(e) + " and " + ref_str(o) + " are not opposite");
        s.pairings_.push_back({e, o});
        s.canonical_edges_.push_back(e);
        s.total_edge_length_ += norm(ve);
      }
      s.translation_[s.index(e)] = (s.edge_start(o) + vo) - s.edge_start(e);
      parent[static_cast<std::size_t>(find_root(parent, e.face))] = find_root(parent, o.face);
    }
  }
  for (std::size_t f = 1; f < nf; ++f)
    if (find_root(parent, static_cast<int>(f)) != find_root(parent, 0))
      throw Error(ErrorCode::Disconnected, "face " + std::to_string(f) + " is not connected to face 0");

  // Corner cycles: the corner after (f, i) counterclockwise is the start of
  // the partner of the incoming edge i-1.
  s.corner_class_.assign(total_edges, -1);
  int order_excess = 0;
  for (std::size_t f = 0; f < nf; ++f) {
    const std::size_t n = s.faces_[f].size();
    for (std::size_t i = 0; i < n; ++i) {
      Corner c{static_cast<int>(f), static_cast<int>(i)};
      if (s.corner_class_[s.corner_index(c)] >= 0) continue;
      const int id = static_cast<int>(s.singularities_.size());
      Singularity sing;
      while (s.corner_class_[s.corner_index(c)] < 0) {
        s.corner_class_[s.corner_index(c)] = id;
        sing.corners.push_back(c);
        const Polygon& p = s.face(c.face);
        sing.cone_angle += interior_angle(p.vertices, static_cast<std::size_t>(c.vertex));
        const int n_c = static_cast<int>(p.size());
        const EdgeRef in = s.partner({c.face, (c.vertex + n_c - 1) % n_c});
        c = {in.face, in.edge};
      }
      const double turns = sing.cone_angle / kTwoPi;
      sing.order = static_cast<int>(std::lround(turns));
      if (sing.order < 1 || std::abs(turns - sing.order) > 1e-7)
        throw Error(ErrorCode::BadConeAngle,
                    "cone angle " + std::to_string(sing.cone_angle) + " at singularity " + std::to_string(id));
      order_excess += sing.order - 1;
      s.singularities_.push_back(std::move(sing));
    }
  }
  if (order_excess % 2 != 0) throw Error(ErrorCode::BadConeAngle, "cone angles give a non-integer genus");
  s.genus_ = 1 + order_excess / 2;

  for (const Polygon& p : s.faces_) {
    s.area_ += p.area();
    s.inscribed_diameter_ = std::max(s.inscribed_diameter_, 2.0 * largest_inscribed_circle(p.vertices).radius);
  }
  return s;
}

std::uint64_t TranslationSurface::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(faces_.size());
  for (const Polygon& p : faces_) {
    mix(p.size());
    for (Vec2 v : p.vertices) {
      mix(std::bit_cast<std::uint64_t>(v.x));
      mix(std::bit_cast<std::uint64_t>(v.y));
    }
  }
  for (const EdgePairing& pr : pairings_) {
    mix(static_cast<std::uint64_t>(pr.first.face));
    mix(static_cast<std::uint64_t>(pr.first.edge));
    mix(static_cast<std::uint64_t>(pr.second.face));
    mix(static_cast<std::uint64_t>(pr.second.edge));
  }
  return h;
}

TranslationSurface revalidate(const TranslationSurface& surface) {
  return build_surface(surface.faces(), surface.pairings());
}

TranslationSurface scale_surface(const TranslationSurface& surface, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw Error(ErrorCode::NonpositiveInput, "scale factor must be positive");
  std::vector<Polygon> faces = surface.faces();
  for (Polygon& p : faces)
    for (Vec2& v : p.vertices) v = factor * v;
  return build_surface(std::move(faces), surface.pairings());
}

TranslationSurface normalize_area(const TranslationSurface& surface) {
  if (!(surface.area() > 0.0)) throw Error(ErrorCode::NonpositiveInput, "surface area must be positive");
  if (surface.area() == 1.0) return surface;
  return scale_surface(surface, 1.0 / std::sqrt(surface.area()));
}

TranslationSurface make_torus(double width, double height) {
  if (!(width > 0.0) || !(height > 0.0)) throw Error(ErrorCode::NonpositiveInput, "torus sides must be positive");
  std::vector<Polygon> faces{{{{0.0, 0.0}, {width, 0.0}, {width, height}, {0.0, height}}}};
  const EdgePairing pairs[] = {{{0, 0}, {0, 2}}, {{0, 1}, {0, 3}}};
  return build_surface(std::move(faces), pairs);
}

// ---------------------------------------------------------------------------
// Triangulation

namespace {

bool in_closed_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
  return cross(b - a, p - a) >= 0.0 && cross(c - b, p - b) >= 0.0 && cross(a - c, p - c) >= 0.0;
}

std::vector<std::array<int, 3>> ear_clip(const Polygon& poly) {
  const std::vector<Vec2>& v = poly.vertices;
  std::vector<int> rest(v.size());
  std::iota(rest.begin(), rest.end(), 0);
  std::vector<std::array<int, 3>> tris;
  while (rest.size() > 3) {
    bool clipped = false;
    const std::size_t m = rest.size();
    for (std::size_t k = 0; k < m && !clipped; ++k) {
      const int ia = rest[(k + m - 1) % m], ib = rest[k], ic = rest[(k + 1) % m];
      const Vec2 a = v[static_cast<std::size_t>(ia)], b = v[static_cast<std::size_t>(ib)],
                 c = v[static_cast<std::size_t>(ic)];
      if (cross(b - a, c - b) <= 0.0) continue;
      bool blocked = false;
      for (int other : rest) {
        if (other == ia || other == ib || other == ic) continue;
        const Vec2 p = v[static_cast<std::size_t>(other)];
        if (p == a || p == b || p == c) continue;
        if (in_closed_triangle(p, a, b, c)) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;
      tris.push_back({ia, ib, ic});
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      clipped = true;
    }
    if (!clipped) throw Error(ErrorCode::InvalidPolygon, "ear clipping found no ear");
  }
  tris.push_back({rest[0], rest[1], rest[2]});
  return tris;
}

}  // namespace

Triangulation triangulate(const TranslationSurface& surface) {
  Triangulation out;
  std::vector<Polygon> tris;
  // Triangle edge that carries each original edge, and diagonal twins.
  std::map<EdgeRef, EdgeRef> carrier;
  std::vector<EdgePairing> pairs;
  for (int f = 0; f < surface.face_count(); ++f) {
    const Polygon& poly = surface.face(f);
    const int n = static_cast<int>(poly.size());
    std::map<std::pair<int, int>, EdgeRef> diagonal;
    for (const auto& t : ear_clip(poly)) {
      const int tid = static_cast<int>(tris.size());
      Polygon tri;
      std::array<Corner, 3> src{};
      for (int k = 0; k < 3; ++k) {
        tri.vertices.push_back(poly.vertices[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])]);
        src[static_cast<std::size_t>(k)] = {f, t[static_cast<std::size_t>(k)]};
      }
      for (int k = 0; k < 3; ++k) {
        const int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
        const EdgeRef here{tid, k};
        if (b == (a + 1) % n) {
          carrier[{f, a}] = here;
        } else if (auto it = diagonal.find({b, a}); it != diagonal.end()) {
          pairs.push_back({it->second, here});
        } else {
          diagonal[{a, b}] = here;
        }
      }
      tris.push_back(std::move(tri));
      out.source_corner.push_back(src);
    }
  }
  for (const EdgePairing& pr : surface.pairings()) pairs.push_back({carrier.at(pr.first), carrier.at(pr.second)});
  out.surface = build_surface(std::move(tris), pairs);
  return out;
}

// ---------------------------------------------------------------------------
// Rational billiards

double RationalAngle::radians() const { return std::numbers::pi * static_cast<double>(num) / static_cast<double>(den); }

namespace {

constexpr double kAngleTolerance = 1e-8;

// Smallest-denominator fraction within tolerance of x, by continued fractions.
bool rational_approximation(double x, long max_den, long& num, long& den) {
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(r);
    const long a = static_cast<long>(a_real);
    const long h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) return false;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) * std::numbers::pi <= kAngleTolerance) {
      num = h1;
      den = k1;
      return true;
    }
    const double frac = r - a_real;
    if (frac <= 0.0) return false;
    r = 1.0 / frac;
  }
  return false;
}

long lcm_checked(long a, long b) {
  const long g = std::gcd(a, b);
  return a / g * b;
}

std::vector<Vec2> counterclockwise(std::vector<Vec2> v) {
  if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());
  return v;
}

}  // namespace

RationalPolygon make_rational_polygon(std::vector<Vec2> vertices, long max_denominator) {
  if (vertices.size() < 3 || !is_simple_polygon(vertices) || signed_area(vertices) == 0.0)
    throw Error(ErrorCode::DegeneratePolygon, "polygon must be simple with nonzero area");
  RationalPolygon out;
  out.vertices = counterclockwise(std::move(vertices));
  for (std::size_t i = 0; i < out.vertices.size(); ++i) {
    const double ratio = interior_angle(out.vertices, i) / std::numbers::pi;
    RationalAngle a;
    if (!rational_approximation(ratio, max_denominator, a.num, a.den))
      throw Error(ErrorCode::IrrationalAngle, "angle at vertex " + std::to_string(i) + " is not a rational multiple of pi");
    out.angles.push_back(a);
  }
  return out;
}

Unfolding unfold(const RationalPolygon& poly, const UnfoldOptions& options) {
  const std::size_t n = poly.vertices.size();
  if (n < 3 || poly.angles.size() != n || !is_simple_polygon(poly.vertices) || !(signed_area(poly.vertices) > 0.0))
    throw Error(ErrorCode::DegeneratePolygon, "need a simple counterclockwise polygon with one angle per vertex");
  long big_n = 1;
  std::vector<RationalAngle> angles = poly.angles;
  for (std::size_t i = 0; i < n; ++i) {
    RationalAngle& a = angles[i];
    if (a.den < 1 || a.num < 1) throw Error(ErrorCode::DegeneratePolygon, "angles must be positive fractions");
    const long g = std::gcd(a.num, a.den);
    a.num /= g;
    a.den /= g;
    if (a.den > options.max_denominator)
      throw Error(ErrorCode::IrrationalAngle, "angle denominator " + std::to_string(a.den) + " exceeds the cap");
    if (std::abs(a.radians() - interior_angle(poly.vertices, i)) > 1e-7)
      throw Error(ErrorCode::DegeneratePolygon, "angle at vertex " + std::to_string(i) + " disagrees with the geometry");
    big_n = lcm_checked(big_n, a.den);
  }

  // Direction of edge j is alpha0 + m_j * pi / N.
  std::vector<long> m(n, 0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const RationalAngle& a = angles[j + 1];
    m[j + 1] = m[j] + (a.den - a.num) * (big_n / a.den);
  }
  const Vec2 e0 = poly.vertices[1] - poly.vertices[0];
  const double alpha0 = angle_of(e0);
  auto mod_n = [big_n](long x) { return ((x % big_n) + big_n) % big_n; };

  // Group element (flip, k): rotation by 2 pi k / N, or reflection across the
  // line at alpha0 + pi k / N.
  struct Elem {
    int flip;
    long k;
  };
  auto compose = [&](Elem g, Elem h) -> Elem {
    if (g.flip == 0) return {h.flip, mod_n(g.k + h.k)};
    return {1 - h.flip, mod_n(g.k - h.k)};
  };
  auto linear = [&](Elem g) {
    return g.flip == 0 ? Mat2::rotation(kTwoPi * static_cast<double>(g.k) / static_cast<double>(big_n))
                       : Mat2::reflection(alpha0 + std::numbers::pi * static_cast<double>(g.k) / static_cast<double>(big_n));
  };
  auto key = [big_n](Elem g) { return static_cast<long>(g.flip) * big_n + g.k; };

  std::vector<Elem> elems{{0, 0}};
  std::map<long, int> index_of{{0, 0}};
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (std::size_t j = 0; j < n; ++j) {
      const Elem h = compose(elems[head], {1, mod_n(m[j])});
      if (index_of.emplace(key(h), static_cast<int>(elems.size())).second) elems.push_back(h);
    }
  }

  Unfolding out;
  out.group_order = big_n;
  std::vector<Polygon> faces;
  const int ni = static_cast<int>(n);
  for (const Elem& g : elems) {
    const Mat2 l = linear(g);
    Polygon face;
    std::vector<int> src_v(n), src_e(n);
    for (int i = 0; i < ni; ++i) {
      const int v = g.flip ? ni - 1 - i : i;
      face.vertices.push_back(l(poly.vertices[static_cast<std::size_t>(v)]));
      src_v[static_cast<std::size_t>(i)] = v;
      src_e[static_cast<std::size_t>(i)] = g.flip ? ((ni - 2 - i) % ni + ni) % ni : i;
    }
    faces.push_back(std::move(face));
    out.linear_part.push_back(l);
    out.source_vertex.push_back(std::move(src_v));
    out.source_edge.push_back(std::move(src_e));
  }
  auto face_edge = [&](const Elem& g, int j) { return g.flip ? ((ni - 2 - j) % ni + ni) % ni : j; };
  std::vector<EdgePairing> pairs;
  for (std::size_t a = 0; a < elems.size(); ++a) {
    for (int j = 0; j < ni; ++j) {
      const Elem h = compose(elems[a], {1, mod_n(m[static_cast<std::size_t>(j)])});
      const int b = index_of.at(key(h));
      if (static_cast<int>(a) < b)
        pairs.push_back({{static_cast<int>(a), face_edge(elems[a], j)}, {b, face_edge(h, j)}});
    }
  }
  out.surface = build_surface(std::move(faces), pairs);
  return out;
}

TranslationSurface unfold_rational_polygon(const RationalPolygon& poly, const UnfoldOptions& options) {
  return unfold(poly, options).surface;
}

}  // namespace flatflow
