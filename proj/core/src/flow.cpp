#include "flatflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include "flatflow/error.hpp"
#include "flatflow/text.hpp"

namespace flatflow {

namespace {

// Index of a vertex of `face` within tol of p, or -1.
int nearby_vertex(const Polygon& face, Vec2 p, double tol) {
  for (std::size_t i = 0; i < face.size(); ++i)
    if (norm(face.vertices[i] - p) <= tol) return static_cast<int>(i);
  return -1;
}

bool on_boundary(const Polygon& face, Vec2 p, double tol) {
  for (std::size_t i = 0; i < face.size(); ++i)
    if (point_segment_distance(p, face.vertex(i), face.vertex(i + 1)) <= tol) return true;
  return false;
}

}  // namespace

FlowCursor::FlowCursor(const TranslationSurface& surface, const DirectedPoint& start)
    : surface_(&surface), origin_(start.position), u_(unit_vector(start.theta)), face_(start.face) {
  if (start.face < 0 || start.face >= surface.face_count())
    throw Error(ErrorCode::InvalidArgument, "start face out of range");
  eps_ = 1e-12 * surface.max_face_diameter();
  const Polygon& f = surface.face(face_);
  if (const int v = nearby_vertex(f, origin_, eps_); v >= 0)
    throw VertexHitError(0.0, surface.singularity_of({face_, v}));
  if (!point_in_polygon(f.vertices, origin_) && !on_boundary(f, origin_, surface.tolerance()))
    throw Error(ErrorCode::InvalidArgument, "start point is outside its face");
  segment_ = {face_, origin_, origin_, 0.0, 0.0};
}

bool FlowCursor::advance(double t_limit) {
  const TranslationSurface& s = *surface_;
  const Polygon& f = s.face(face_);
  const Vec2 rel = offset_ - origin_;
  double best_t = std::numeric_limits<double>::infinity();
  int best_k = -1;
  double best_s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Vec2 e = f.edge_vector(k);
    const double den = cross(u_, e);
    if (den <= 0.0) continue;
    const Vec2 r = f.vertex(k) + rel;
    const double t = cross(r, e) / den;
    const double sp = cross(r, u_) / den;
    if (sp < -1e-9 || sp > 1.0 + 1e-9) continue;
    if (t < t_ - eps_) continue;
    if (t < best_t) {
      best_t = t;
      best_k = static_cast<int>(k);
      best_s = sp;
    }
  }
  if (best_k < 0) throw Error(ErrorCode::InvalidArgument, "orbit lost its face; inconsistent surface geometry");
  const Vec2 here = position();
  if (best_t > t_limit) {
    segment_ = {face_, here, origin_ + t_limit * u_ - offset_, t_, t_limit};
    t_ = t_limit;
    return false;
  }
  const EdgeRef edge{face_, best_k};
  const double len = norm(f.edge_vector(static_cast<std::size_t>(best_k)));
  if (best_s * len < eps_) throw VertexHitError(best_t, s.singularity_of({face_, best_k}));
  if ((1.0 - best_s) * len < eps_)
    throw VertexHitError(best_t, s.singularity_of({face_, (best_k + 1) % static_cast<int>(f.size())}));
  const double t_exit = std::max(best_t, t_);
  segment_ = {face_, here, origin_ + t_exit * u_ - offset_, t_, t_exit};
  hit_ = {t_exit, edge, best_s, origin_ + t_exit * u_};
  t_ = t_exit;
  offset_ = offset_ - s.translation(edge);
  face_ = s.partner(edge).face;
  return true;
}

HitSequence trace(const TranslationSurface& surface, const DirectedPoint& start, const TraceBudget& budget) {
  HitSequence out;
  out.start = start;
  FlowCursor cur(surface, start);
  const double eps = 1e-12 * surface.max_face_diameter();
  bool first = true;
  while (out.hits.size() < budget.max_hits) {
    const bool crossed = cur.advance(budget.max_time);
    if (!crossed) break;
    // A start on an edge pointing outward crosses it immediately; that is a
    // change of chart, not a hit.
    if (first && cur.hit().t <= eps) {
      first = false;
      continue;
    }
    first = false;
    out.hits.push_back(cur.hit());
  }
  out.end_face = cur.face();
  out.end_position = cur.position();
  out.end_time = cur.time();
  return out;
}

void for_each_segment(const TranslationSurface& surface, const DirectedPoint& start, double T,
                      const std::function<void(const FaceSegment&)>& visit) {
  FlowCursor cur(surface, start);
  while (cur.time() < T) {
    const bool crossed = cur.advance(T);
    const FaceSegment& seg = cur.segment();
    if (seg.t1 > seg.t0) visit(seg);
    if (!crossed) break;
  }
}

Development develop(const TranslationSurface& surface, const DirectedPoint& start, std::size_t n_steps) {
  Development dev;
  dev.origin = start.position;
  dev.theta = start.theta;
  auto place = [&](int face, Vec2 offset) {
    PlacedFace pf{face, offset, {}};
    for (Vec2 v : surface.face(face).vertices) pf.vertices.push_back(v + offset);
    dev.copies.push_back(std::move(pf));
  };
  const double eps = 1e-12 * surface.max_face_diameter();
  FlowCursor cur(surface, start);
  while (dev.hits.size() < n_steps) {
    cur.advance(std::numeric_limits<double>::infinity());
    const HitRecord& h = cur.hit();
    if (dev.copies.empty()) {
      if (h.t <= eps) continue;
      place(h.edge.face, cur.offset() + surface.translation(h.edge));
    }
    dev.hits.push_back(h);
    place(cur.face(), cur.offset());
  }
  if (dev.copies.empty()) place(cur.face(), cur.offset());
  return dev;
}

double occupancy(const TranslationSurface& surface, const DirectedPoint& start, double T,
                 const std::vector<Cell>& region) {
  std::vector<std::vector<const Cell*>> by_face(static_cast<std::size_t>(surface.face_count()));
  for (const Cell& c : region) {
    if (c.face < 0 || c.face >= surface.face_count()) throw Error(ErrorCode::InvalidArgument, "cell face out of range");
    by_face[static_cast<std::size_t>(c.face)].push_back(&c);
  }
  double total = 0.0;
  for_each_segment(surface, start, T, [&](const FaceSegment& seg) {
    for (const Cell* c : by_face[static_cast<std::size_t>(seg.face)]) total += segment_length_inside(c->polygon, seg.a, seg.b);
  });
  return total;
}

std::string hits_to_csv(const HitSequence& seq) {
  std::string out = "t,face,edge,s,dev_x,dev_y\n";
  for (const HitRecord& h : seq.hits) {
    out += format_number(h.t) + "," + std::to_string(h.edge.face) + "," + std::to_string(h.edge.edge) + "," +
           format_number(h.s) + "," + format_number(h.dev_point.x) + "," + format_number(h.dev_point.y) + "\n";
  }
  return out;
}

}  // namespace flatflow
