#include "flatflow/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "flatflow/error.hpp"
#include "flatflow/text.hpp"

namespace flatflow {

// ---------------------------------------------------------------------------
// ProjectionMap

ProjectionMap build_projection(const TranslationSurface& surface, double theta) {
  ProjectionMap pm;
  pm.surface_ = &surface;
  pm.theta_ = wrap_angle(theta);
  pm.u_ = unit_vector(pm.theta_);
  for (EdgeRef e : surface.edges()) {
    const Vec2 v = surface.edge_vector(e);
    const double c = cross(pm.u_, v);
    if (std::abs(c) < kDirectionMargin * norm(v))
      throw Error(ErrorCode::DegenerateDirection, "direction " + format_number(theta) + " is parallel to an edge");
    pm.entries_.push_back({e, std::abs(c), 0.0, 0.0, c > 0.0});
    pm.c1_ += std::abs(c);
  }
  double lo = 0.0;
  for (auto& en : pm.entries_) {
    en.lo = lo;
    en.length = en.h_length / pm.c1_;
    lo += en.length;
  }
  pm.face_offset_.assign(static_cast<std::size_t>(surface.face_count()) + 1, 0);
  for (int f = 0; f < surface.face_count(); ++f)
    pm.face_offset_[static_cast<std::size_t>(f) + 1] = pm.face_offset_[static_cast<std::size_t>(f)] + surface.face(f).size();
  pm.entry_of_edge_.assign(pm.face_offset_.back(), 0);
  for (std::size_t i = 0; i < pm.entries_.size(); ++i) {
    const EdgeRef e = pm.entries_[i].edge, o = surface.partner(e);
    pm.entry_of_edge_[pm.face_offset_[static_cast<std::size_t>(e.face)] + static_cast<std::size_t>(e.edge)] = i;
    pm.entry_of_edge_[pm.face_offset_[static_cast<std::size_t>(o.face)] + static_cast<std::size_t>(o.edge)] = i;
  }
  return pm;
}

std::size_t ProjectionMap::entry_index(EdgeRef e) const {
  return entry_of_edge_[face_offset_[static_cast<std::size_t>(e.face)] + static_cast<std::size_t>(e.edge)];
}

const ProjectionMap::Entry& ProjectionMap::entry(EdgeRef e) const { return entries_[entry_index(e)]; }

double ProjectionMap::operator()(EdgeRef e, double s) const {
  const auto [canon, sc] = surface_->canonical_point(e, s);
  const Entry& en = entry(canon);
  return en.lo + (en.increasing ? sc : 1.0 - sc) * en.length;
}

double ProjectionMap::edge_parameter(std::size_t i, double x) const {
  const Entry& en = entries_[i];
  const double r = (x - en.lo) / en.length;
  return en.increasing ? r : 1.0 - r;
}

std::size_t ProjectionMap::locate(double x) const {
  auto it = std::upper_bound(entries_.begin(), entries_.end(), x,
                             [](double v, const Entry& en) { return v < en.lo; });
  return it == entries_.begin() ? 0 : static_cast<std::size_t>(it - entries_.begin()) - 1;
}

double ProjectionMap::intercept(EdgeRef e) const {
  const Entry& en = entry(e);
  const Vec2 a = surface_->edge_start(en.edge);
  const Vec2 b = a + surface_->edge_vector(en.edge);
  const double m = std::min(cross(u_, a), cross(u_, b));
  double shift = 0.0;
  if (!(en.edge == e)) shift = cross(u_, surface_->translation(e));
  return en.lo + (shift - m) / c1_;
}

// ---------------------------------------------------------------------------
// Interval exchange

namespace {

struct Exit {
  double t = std::numeric_limits<double>::infinity();
  int edge = -1;
  double s = 0.0;
};

// First boundary crossing of the ray p + t dir, t > t_min, leaving the face.
Exit first_exit(const Polygon& face, Vec2 p, Vec2 dir, double t_min) {
  Exit best;
  for (std::size_t k = 0; k < face.size(); ++k) {
    const Vec2 e = face.edge_vector(k);
    const double den = cross(dir, e);
    if (den <= 0.0) continue;
    const Vec2 r = face.vertex(k) - p;
    const double t = cross(r, e) / den;
    const double s = cross(r, dir) / den;
    if (s < -1e-9 || s > 1.0 + 1e-9 || t <= t_min) continue;
    if (t < best.t) best = {t, static_cast<int>(k), s};
  }
  return best;
}

// Vertices of `face` reached by the flow along `dir` from the interior of
// edge k, with their edge parameter and distance.
struct Shadow {
  double s;
  int vertex;
  double distance;
};

std::vector<Shadow> shadows(const Polygon& face, int k, Vec2 dir) {
  const int n = static_cast<int>(face.size());
  const Vec2 a = face.vertex(static_cast<std::size_t>(k));
  const Vec2 e = face.edge_vector(static_cast<std::size_t>(k));
  const double den = cross(e, dir);
  const double diam_tol = 1e-9 * polygon_diameter(face.vertices);
  std::vector<Shadow> out;
  for (int i = 0; i < n; ++i) {
    if (i == k || i == (k + 1) % n) continue;
    const Vec2 v = face.vertices[static_cast<std::size_t>(i)];
    const double s = cross(v - a, dir) / den;
    const double t = cross(e, v - a) / den;
    if (s <= 1e-12 || s >= 1.0 - 1e-12 || t <= 0.0) continue;
    const Vec2 p = a + s * e;
    const Exit ex = first_exit(face, p, dir, 1e-12 * t);
    if (ex.t < t - diam_tol) continue;  // blocked by another part of the face
    out.push_back({s, i, t});
  }
  std::sort(out.begin(), out.end(), [](const Shadow& x, const Shadow& y) { return x.s < y.s; });
  return out;
}

}  // namespace

IntervalExchange induced_iet(const TranslationSurface& surface, double theta) {
  IntervalExchange iet{build_projection(surface, theta), {}, {}, {}, {}};
  const ProjectionMap& pm = iet.projection;
  const Vec2 u = pm.direction();
  for (int f = 0; f < surface.face_count(); ++f) {
    const Polygon& face = surface.face(f);
    const int n = static_cast<int>(face.size());
    for (int k = 0; k < n; ++k) {
      const EdgeRef edge{f, k};
      const Vec2 e = face.edge_vector(static_cast<std::size_t>(k));
      const bool entry = cross(u, e) < 0.0;
      const Vec2 dir = entry ? u : -u;
      const std::vector<Shadow> sh = shadows(face, k, dir);
      std::vector<SingularPoint>& sing = entry ? iet.forward : iet.backward;
      for (int end = 0; end < 2; ++end) {
        const int vtx = (k + end) % n;
        sing.push_back({pm(edge, static_cast<double>(end)), surface.singularity_of({f, vtx}), {f, vtx}, 0.0});
      }
      for (const Shadow& s : sh)
        sing.push_back({pm(edge, s.s), surface.singularity_of({f, s.vertex}), {f, s.vertex}, s.distance});
      if (!entry) continue;

      std::vector<double> cuts{0.0};
      for (const Shadow& s : sh)
        if (s.s > cuts.back()) cuts.push_back(s.s);
      cuts.push_back(1.0);
      const double base = pm.intercept(edge);
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
        const Vec2 p = face.vertex(static_cast<std::size_t>(k)) + mid * e;
        const Exit ex = first_exit(face, p, u, 0.0);
        if (ex.edge < 0) throw Error(ErrorCode::InvalidArgument, "flow does not leave face " + std::to_string(f));
        const EdgeRef out{f, ex.edge};
        const double x0 = pm(edge, cuts[c]), x1 = pm(edge, cuts[c + 1]);
        iet.branches.push_back({std::min(x0, x1), std::abs(x1 - x0), pm.intercept(out) - base, edge, out});
      }
    }
  }
  std::sort(iet.branches.begin(), iet.branches.end(),
            [](const IetBranch& a, const IetBranch& b) { return a.start < b.start; });
  // Neighbouring pieces with the same edges and offset are one branch.
  std::vector<IetBranch> merged;
  for (const IetBranch& b : iet.branches) {
    if (!merged.empty()) {
      IetBranch& last = merged.back();
      if (last.entry == b.entry && last.exit == b.exit && last.offset == b.offset) {
        last.length = b.start + b.length - last.start;
        continue;
      }
    }
    merged.push_back(b);
  }
  iet.branches = std::move(merged);
  iet.image_order.resize(iet.branches.size());
  for (std::size_t i = 0; i < iet.branches.size(); ++i) iet.image_order[i] = i;
  std::sort(iet.image_order.begin(), iet.image_order.end(), [&](std::size_t a, std::size_t b) {
    return iet.branches[a].start + iet.branches[a].offset < iet.branches[b].start + iet.branches[b].offset;
  });
  auto by_x = [](const SingularPoint& a, const SingularPoint& b) {
    return a.x < b.x || (a.x == b.x && a.distance < b.distance);
  };
  std::sort(iet.forward.begin(), iet.forward.end(), by_x);
  std::sort(iet.backward.begin(), iet.backward.end(), by_x);
  return iet;
}

std::size_t IntervalExchange::branch_index(double x) const {
  auto it = std::upper_bound(branches.begin(), branches.end(), x,
                             [](double v, const IetBranch& b) { return v < b.start; });
  return it == branches.begin() ? 0 : static_cast<std::size_t>(it - branches.begin()) - 1;
}

double IntervalExchange::apply(double x) const { return x + branches[branch_index(x)].offset; }

double IntervalExchange::apply_inverse(double y) const {
  auto it = std::upper_bound(image_order.begin(), image_order.end(), y, [&](double v, std::size_t i) {
    return v < branches[i].start + branches[i].offset;
  });
  const std::size_t i = it == image_order.begin() ? image_order.front() : *(it - 1);
  return y - branches[i].offset;
}

std::string iet_to_json(const IntervalExchange& iet) {
  nlohmann::json j;
  j["theta"] = iet.projection.theta();
  j["c1"] = iet.projection.c1();
  nlohmann::json br = nlohmann::json::array();
  for (const IetBranch& b : iet.branches) br.push_back({b.start, b.length, b.offset});
  j["branches"] = std::move(br);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Hitting sets

HittingSet hitting_set(const TranslationSurface& surface, const DirectedPoint& start, std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "hitting set needs at least one point");
  const ProjectionMap pm = build_projection(surface, start.theta);
  HittingSet out;
  out.source = trace(surface, start, {std::numeric_limits<double>::infinity(), m});
  out.points.reserve(out.source.hits.size());
  for (const HitRecord& h : out.source.hits) out.points.push_back(pm(h.edge, h.s));
  return out;
}

std::string hitting_set_to_text(const HittingSet& set) {
  std::string out;
  for (double x : set.points) out += format_number(x) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Transport

namespace {

constexpr double kSplitTolerance = 1e-12;

// Singular point inside [lo, hi] reached first by the flow, or null.
const SingularPoint* splitting(const std::vector<SingularPoint>& pts, double lo, double hi) {
  auto it = std::lower_bound(pts.begin(), pts.end(), lo - kSplitTolerance,
                             [](const SingularPoint& p, double v) { return p.x < v; });
  const SingularPoint* best = nullptr;
  for (; it != pts.end() && it->x < hi + kSplitTolerance; ++it)
    if (!best || it->distance < best->distance) best = &*it;
  return best;
}

const IetBranch& image_branch(const IntervalExchange& iet, double y) {
  const double x = iet.apply_inverse(y);
  return iet.branches[iet.branch_index(x)];
}

}  // namespace

TransportResult transport_interval(const IntervalExchange& iet, const TransportSeed& seed, std::size_t cap) {
  const ProjectionMap& pm = iet.projection;
  const TranslationSurface& surface = pm.surface();
  if (seed.edge.face < 0 || seed.edge.face >= surface.face_count() || seed.edge.edge < 0 ||
      seed.edge.edge >= static_cast<int>(surface.face(seed.edge.face).size()))
    throw Error(ErrorCode::InvalidArgument, "seed edge out of range");
  if (!(seed.s0 >= 0.0 && seed.s1 <= 1.0 && seed.s0 < seed.s1))
    throw Error(ErrorCode::InvalidArgument, "seed must satisfy 0 <= s0 < s1 <= 1");

  TransportResult res;
  const EdgeRef canon = surface.canonical_point(seed.edge, 0.0).first;
  const double xa = pm(seed.edge, seed.s0), xb = pm(seed.edge, seed.s1);
  const double lo0 = std::min(xa, xb), hi0 = std::max(xa, xb);
  res.h_length = (hi0 - lo0) * pm.c1();
  // Developed plane = chart of the canonical edge's face.
  auto chart_offset = [&](EdgeRef side) { return side == canon ? Vec2{} : -surface.translation(canon); };

  std::vector<TransportedInterval> fwd{{0, canon, lo0, hi0}}, bwd;
  {
    double lo = lo0, hi = hi0;
    const IetBranch& b0 = iet.branches[iet.branch_index(0.5 * (lo + hi))];
    Vec2 off = chart_offset(b0.entry);
    for (;;) {
      if (const SingularPoint* sp = splitting(iet.forward, lo, hi)) {
        res.end_singularity = sp->singularity;
        res.end_vertex = surface.face(sp->corner.face).vertex(static_cast<std::size_t>(sp->corner.vertex)) + off;
        break;
      }
      if (res.u + res.w >= cap) {
        res.budget_exhausted = true;
        break;
      }
      const IetBranch& b = iet.branches[iet.branch_index(0.5 * (lo + hi))];
      lo += b.offset;
      hi += b.offset;
      off = off - surface.translation(b.exit);
      ++res.w;
      fwd.push_back({static_cast<int>(res.w), pm.entry(b.exit).edge, lo, hi});
    }
  }
  if (!res.budget_exhausted) {
    double lo = lo0, hi = hi0;
    const IetBranch& b0 = image_branch(iet, 0.5 * (lo + hi));
    Vec2 off = chart_offset(b0.exit);
    for (;;) {
      if (const SingularPoint* sp = splitting(iet.backward, lo, hi)) {
        res.start_singularity = sp->singularity;
        res.start_vertex = surface.face(sp->corner.face).vertex(static_cast<std::size_t>(sp->corner.vertex)) + off;
        break;
      }
      if (res.u + res.w >= cap) {
        res.budget_exhausted = true;
        break;
      }
      const IetBranch& b = image_branch(iet, 0.5 * (lo + hi));
      lo -= b.offset;
      hi -= b.offset;
      off = off - surface.translation(b.entry);
      ++res.u;
      bwd.push_back({-static_cast<int>(res.u), pm.entry(b.entry).edge, lo, hi});
    }
  }
  res.intervals.assign(bwd.rbegin(), bwd.rend());
  res.intervals.insert(res.intervals.end(), fwd.begin(), fwd.end());
  if (!res.budget_exhausted) res.saddle_length = norm(res.end_vertex - res.start_vertex);
  res.disjoint_window = measured_disjoint_window(res.intervals);
  return res;
}

TransportResult transport_interval(const TranslationSurface& surface, double theta, const TransportSeed& seed,
                                   std::size_t cap) {
  return transport_interval(induced_iet(surface, theta), seed, cap);
}

std::size_t measured_disjoint_window(const std::vector<TransportedInterval>& intervals) {
  std::vector<const TransportedInterval*> order;
  order.reserve(intervals.size());
  for (const auto& iv : intervals) order.push_back(&iv);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->lo < b->lo; });
  std::size_t best = intervals.size();
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t k = i + 1; k < order.size() && order[k]->lo < order[i]->hi; ++k) {
      const auto gap = static_cast<std::size_t>(std::abs(order[k]->j - order[i]->j));
      best = std::min(best, gap);
    }
  }
  return best;
}

int transport_scale(double h_length, double c0) {
  if (!(h_length > 0.0) || !(c0 > 0.0)) throw Error(ErrorCode::NonpositiveInput, "transport scale needs positive inputs");
  return static_cast<int>(std::ceil(-std::log2(h_length * c0 * c0))) - 1;
}

}  // namespace flatflow
