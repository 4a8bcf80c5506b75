#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "flatflow/surface.hpp"

namespace flatflow {

struct DirectedPoint {
  int face = 0;
  Vec2 position;
  double theta = 0.0;
};

/// One edge crossing. `edge` is the edge the geodesic leaves through; it
/// re-enters through surface.partner(edge) at parameter 1 - s.
struct HitRecord {
  double t = 0.0;
  EdgeRef edge;
  double s = 0.0;
  Vec2 dev_point;
};

struct TraceBudget {
  double max_time = std::numeric_limits<double>::infinity();
  std::size_t max_hits = std::numeric_limits<std::size_t>::max();
};

struct HitSequence {
  DirectedPoint start;
  std::vector<HitRecord> hits;
  int end_face = 0;
  Vec2 end_position;  // chart coordinates of end_face
  double end_time = 0.0;
};

/// One straight piece of a geodesic inside a single face, in that face's chart.
struct FaceSegment {
  int face = 0;
  Vec2 a, b;
  double t0 = 0.0, t1 = 0.0;
};

/// Incremental tracer. The orbit is the developed line origin + t * u; the
/// current face chart sits in the developed plane shifted by offset().
class FlowCursor {
 public:
  FlowCursor(const TranslationSurface& surface, const DirectedPoint& start);

  /// Moves to the next edge crossing or to time t_limit, whichever is first.
  /// Returns true if an edge was crossed; the face piece just travelled is in
  /// segment() and the crossing in hit(). Throws VertexHitError.
  bool advance(double t_limit);

  const FaceSegment& segment() const { return segment_; }
  const HitRecord& hit() const { return hit_; }

  double time() const { return t_; }
  int face() const { return face_; }
  Vec2 position() const { return origin_ + t_ * u_ - offset_; }
  Vec2 offset() const { return offset_; }
  Vec2 direction() const { return u_; }
  Vec2 origin() const { return origin_; }

 private:
  const TranslationSurface* surface_;
  Vec2 origin_, u_, offset_;
  double t_ = 0.0;
  int face_ = 0;
  double eps_ = 0.0;
  FaceSegment segment_;
  HitRecord hit_;
};

HitSequence trace(const TranslationSurface& surface, const DirectedPoint& start, const TraceBudget& budget);

/// Calls visit for every face piece of the orbit on [0, T].
void for_each_segment(const TranslationSurface& surface, const DirectedPoint& start, double T,
                      const std::function<void(const FaceSegment&)>& visit);

struct PlacedFace {
  int face = 0;
  Vec2 offset;  // developed = chart + offset
  std::vector<Vec2> vertices;  // developed coordinates
};

struct Development {
  Vec2 origin;
  double theta = 0.0;
  std::vector<PlacedFace> copies;
  std::vector<HitRecord> hits;  // hits[i] is the shared edge of copies i and i+1
};

Development develop(const TranslationSurface& surface, const DirectedPoint& start, std::size_t n_steps);

/// A convex region inside a single face, in that face's chart.
struct Cell {
  int face = 0;
  std::vector<Vec2> polygon;
};

/// Time the orbit spends in the union of `region` during [0, T].
double occupancy(const TranslationSurface& surface, const DirectedPoint& start, double T,
                 const std::vector<Cell>& region);

/// Columns t,face,edge,s,dev_x,dev_y.
std::string hits_to_csv(const HitSequence& seq);

}  // namespace flatflow
