#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "flatflow/geometry.hpp"

namespace flatflow {

/// A face of a translation surface: a simple polygon with counterclockwise
/// vertices. Edge i runs from vertex i to vertex i+1 (mod n).
struct Polygon {
  std::vector<Vec2> vertices;

  std::size_t size() const { return vertices.size(); }
  Vec2 vertex(std::size_t i) const { return vertices[i % vertices.size()]; }
  Vec2 edge_vector(std::size_t i) const { return vertex(i + 1) - vertex(i); }
  double area() const { return signed_area(vertices); }
};

struct EdgeRef {
  int face = 0;
  int edge = 0;
  friend auto operator<=>(const EdgeRef&, const EdgeRef&) = default;
};

struct EdgePairing {
  EdgeRef first;
  EdgeRef second;
};

/// Vertex `vertex` of face `face`, together with the angular sector the face
/// occupies there.
struct Corner {
  int face = 0;
  int vertex = 0;
  friend auto operator<=>(const Corner&, const Corner&) = default;
};

/// An equivalence class of polygon vertices under the edge identifications.
struct Singularity {
  double cone_angle = 0.0;
  int order = 1;  // cone_angle / 2pi
  std::vector<Corner> corners;  // counterclockwise around the point
};

/// Immutable, validated translation surface. Construct with build_surface().
class TranslationSurface {
 public:
  TranslationSurface() = default;

  const std::vector<Polygon>& faces() const { return faces_; }
  const Polygon& face(int f) const { return faces_[static_cast<std::size_t>(f)]; }
  int face_count() const { return static_cast<int>(faces_.size()); }

  /// Pairings normalized so that first < second, sorted by first.
  const std::vector<EdgePairing>& pairings() const { return pairings_; }

  EdgeRef partner(EdgeRef e) const { return partner_[index(e)]; }

  /// Vector that carries a point of edge `e`, expressed in the chart of
  /// e.face, to the same point expressed in the chart of partner(e).face.
  Vec2 translation(EdgeRef e) const { return translation_[index(e)]; }

  Vec2 edge_start(EdgeRef e) const { return face(e.face).vertex(static_cast<std::size_t>(e.edge)); }
  Vec2 edge_vector(EdgeRef e) const { return face(e.face).edge_vector(static_cast<std::size_t>(e.edge)); }

  /// One representative per identified pair (the smaller EdgeRef), sorted by
  /// (face, edge). These are the edges E_1 ... E_b.
  const std::vector<EdgeRef>& edges() const { return canonical_edges_; }
  bool is_canonical(EdgeRef e) const { return !(partner(e) < e); }

  /// Canonical representative and the parameter along it of the point at
  /// parameter s on edge e.
  std::pair<EdgeRef, double> canonical_point(EdgeRef e, double s) const {
    return is_canonical(e) ? std::pair{e, s} : std::pair{partner(e), 1.0 - s};
  }

  int singularity_of(Corner c) const { return corner_class_[corner_index(c)]; }
  const std::vector<Singularity>& singularities() const { return singularities_; }

  double area() const { return area_; }
  int genus() const { return genus_; }

  /// Diameter of the largest inscribed circle found over the faces. Lower
  /// bound for the projected edge length c1(theta).
  double inscribed_diameter() const { return inscribed_diameter_; }
  /// Total length of the edges E_1 ... E_b. Upper bound for c1(theta).
  double total_edge_length() const { return total_edge_length_; }
  /// Largest face diameter.
  double max_face_diameter() const { return max_face_diameter_; }
  /// Twice the largest face diameter; bounds developed saddle-connection
  /// length per transport step.
  double transport_length_constant() const { return 2.0 * max_face_diameter_; }

  /// Coincidence tolerance, 1e-9 times the largest face diameter.
  double tolerance() const { return 1e-9 * max_face_diameter_; }

  /// Stable 64-bit FNV-1a digest of the geometry and pairings.
  std::uint64_t fingerprint() const;

 private:
  friend TranslationSurface build_surface(std::vector<Polygon> faces, std::span<const EdgePairing> pairing);

  std::size_t index(EdgeRef e) const {
    return edge_offset_[static_cast<std::size_t>(e.face)] + static_cast<std::size_t>(e.edge);
  }
  std::size_t corner_index(Corner c) const {
    return edge_offset_[static_cast<std::size_t>(c.face)] + static_cast<std::size_t>(c.vertex);
  }

  std::vector<Polygon> faces_;
  std::vector<EdgePairing> pairings_;
  std::vector<std::size_t> edge_offset_;
  std::vector<EdgeRef> partner_;
  std::vector<Vec2> translation_;
  std::vector<EdgeRef> canonical_edges_;
  std::vector<int> corner_class_;
  std::vector<Singularity> singularities_;
  double area_ = 0.0;
  int genus_ = 0;
  double inscribed_diameter_ = 0.0;
  double total_edge_length_ = 0.0;
  double max_face_diameter_ = 0.0;
};

/// Validates faces and pairings and derives singularities, genus and the
/// geometric constants. Throws flatflow::Error on invalid input.
TranslationSurface build_surface(std::vector<Polygon> faces, std::span<const EdgePairing> pairing);

/// Rebuilds `surface` from its own faces and pairings.
TranslationSurface revalidate(const TranslationSurface& surface);

/// Uniform scaling of every chart.
TranslationSurface scale_surface(const TranslationSurface& surface, double factor);

/// Uniformly scaled copy with area 1.
TranslationSurface normalize_area(const TranslationSurface& surface);

/// The flat torus [0,w) x [0,h) as a single rectangle with opposite sides glued.
TranslationSurface make_torus(double width = 1.0, double height = 1.0);

/// Faces split into triangles by ear clipping. Diagonals become new edges glued
/// with zero translation, so the underlying flat surface and its vertex set are
/// unchanged.
struct Triangulation {
  TranslationSurface surface;
  /// For triangle t and its corner k, the corner of the original surface.
  std::vector<std::array<Corner, 3>> source_corner;
};
Triangulation triangulate(const TranslationSurface& surface);

// ---------------------------------------------------------------------------
// Rational billiards

struct RationalAngle {
  long num = 1;
  long den = 1;
  double radians() const;
};

/// A polygon whose interior angles are rational multiples of pi.
struct RationalPolygon {
  std::vector<Vec2> vertices;  // counterclockwise
  std::vector<RationalAngle> angles;  // angle at vertex i is (num/den) * pi
};

/// Recovers the angles of a polygon as reduced fractions of pi. Throws
/// IrrationalAngle if some angle has no approximation with denominator at most
/// `max_denominator` within 1e-9 radians.
RationalPolygon make_rational_polygon(std::vector<Vec2> vertices, long max_denominator = 1000);

struct UnfoldOptions {
  long max_denominator = 1000;
};

/// The unfolded surface together with the linear map that places the
/// original polygon onto each face (face point = linear_part * table point).
struct Unfolding {
  TranslationSurface surface;
  long group_order = 0;  // N; the surface has 2N faces
  std::vector<Mat2> linear_part;
  /// source_edge[f][k]: polygon edge that face edge k is a copy of.
  std::vector<std::vector<int>> source_edge;
  /// source_vertex[f][k]: polygon vertex that face vertex k is a copy of.
  std::vector<std::vector<int>> source_vertex;
};

Unfolding unfold(const RationalPolygon& poly, const UnfoldOptions& options = {});
TranslationSurface unfold_rational_polygon(const RationalPolygon& poly, const UnfoldOptions& options = {});

}  // namespace flatflow
