#include "flatflow/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flatflow/error.hpp"
#include "flatflow/flow.hpp"
#include "flatflow/parallel.hpp"
#include "flatflow/text.hpp"

namespace flatflow {

namespace {

struct Found {
  SaddleConnection sc;
  int triangle;  // starting sector on the triangulated surface
  int corner;
};

double direction_of(Vec2 v) {
  double phi = wrap_angle(angle_of(v));
  if (phi > kTwoPi - kDirectionTolerance) phi = 0.0;
  return phi;
}

// Distance from the origin to the part of segment [p, q] between the rays r
// (right) and l (left).
double clipped_distance(Vec2 p, Vec2 q, Vec2 r, Vec2 l) {
  double lo = 0.0, hi = 1.0;
  const Vec2 d = q - p;
  auto restrict = [&](double f0, double slope) {
    // Keep lambda with f0 + slope * lambda >= 0.
    if (slope == 0.0) {
      if (f0 < 0.0) hi = -1.0;
      return;
    }
    const double root = -f0 / slope;
    if (slope > 0.0)
      lo = std::max(lo, root);
    else
      hi = std::min(hi, root);
  };
  restrict(cross(r, p), cross(r, d));
  restrict(cross(p, l), cross(d, l));
  if (lo > hi) return std::numeric_limits<double>::infinity();
  return point_segment_distance({0.0, 0.0}, p + lo * d, p + hi * d);
}

bool strictly_left(Vec2 a, Vec2 b) { return cross(a, b) > 1e-12 * norm(a) * norm(b); }

struct Node {
  int tri;
  int entry;
  Vec2 off;  // developed = chart + off
  Vec2 right, left;
};

std::vector<Found> search_from(const TranslationSurface& original, const Triangulation& tr, int t0, int k0, double T,
                               std::size_t budget) {
  const TranslationSurface& s = tr.surface;
  auto orig_sing = [&](int tri, int corner) {
    return original.singularity_of(tr.source_corner[static_cast<std::size_t>(tri)][static_cast<std::size_t>(corner)]);
  };
  auto vtx = [&](int tri, int i) { return s.face(tri).vertex(static_cast<std::size_t>(i % 3)); };
  std::vector<Found> out;
  const Vec2 apex = vtx(t0, k0);
  const int start = orig_sing(t0, k0);
  auto record = [&](Vec2 h, int tri, int corner) {
    out.push_back({{h, norm(h), direction_of(h), start, orig_sing(tri, corner)}, t0, k0});
  };

  const Vec2 first = vtx(t0, k0 + 1) - apex;
  if (norm(first) <= T) record(first, t0, (k0 + 1) % 3);
  const Vec2 far = vtx(t0, k0 + 2) - apex;
  std::vector<Node> stack;
  auto push = [&](int tri, int edge, Vec2 off, Vec2 r, Vec2 l, Vec2 p, Vec2 q) {
    if (clipped_distance(p, q, r, l) > T) return;
    const EdgeRef across = s.partner({tri, edge});
    stack.push_back({across.face, across.edge, off - s.translation({tri, edge}), r, l});
  };
  push(t0, (k0 + 1) % 3, {}, first, far, first, far);

  std::size_t visited = 0;
  while (!stack.empty()) {
    const Node nd = stack.back();
    stack.pop_back();
    if (++visited > budget)
      throw Error(ErrorCode::BudgetExhausted, "saddle search exceeded " + std::to_string(budget) + " face copies");
    const int j = nd.entry;
    const Vec2 base = nd.off - apex;
    const Vec2 pr = vtx(nd.tri, j + 1) + base, pl = vtx(nd.tri, j) + base, c = vtx(nd.tri, j + 2) + base;
    const bool in_right = strictly_left(nd.right, c);
    const bool in_left = strictly_left(c, nd.left);
    if (in_right && in_left && norm(c) <= T) record(c, nd.tri, (j + 2) % 3);
    if (in_left) push(nd.tri, (j + 2) % 3, nd.off, in_right ? c : nd.right, nd.left, c, pl);
    if (in_right) push(nd.tri, (j + 1) % 3, nd.off, nd.right, in_left ? c : nd.left, pr, c);
  }
  return out;
}

std::vector<Found> search_all(const TranslationSurface& surface, const Triangulation& tr, double T,
                              const SaddleOptions& options) {
  if (!(T > 0.0)) throw Error(ErrorCode::NonpositiveInput, "length bound T must be positive");
  const std::size_t roots = static_cast<std::size_t>(tr.surface.face_count()) * 3;
  std::vector<std::vector<Found>> per_root(roots);
  parallel_for(roots, [&](std::size_t r) {
    per_root[r] = search_from(surface, tr, static_cast<int>(r / 3), static_cast<int>(r % 3), T, options.node_budget);
  });
  std::vector<Found> all;
  for (auto& v : per_root) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end(), [](const Found& a, const Found& b) {
    if (a.sc.phi != b.sc.phi) return a.sc.phi < b.sc.phi;
    if (a.sc.length != b.sc.length) return a.sc.length < b.sc.length;
    if (a.sc.start_singularity != b.sc.start_singularity) return a.sc.start_singularity < b.sc.start_singularity;
    if (a.sc.end_singularity != b.sc.end_singularity) return a.sc.end_singularity < b.sc.end_singularity;
    return std::pair{a.triangle, a.corner} < std::pair{b.triangle, b.corner};
  });
  return all;
}

// Triangle and chart point of apex + w, starting from the sector of corner
// (t, k) and rotating around the vertex until w falls inside a sector.
std::pair<int, Vec2> locate_near_vertex(const TranslationSurface& s, int t, int k, Vec2 w) {
  for (int guard = 0; guard < 4 * s.face_count() + 8; ++guard) {
    const Polygon& f = s.face(t);
    const Vec2 apex = f.vertex(static_cast<std::size_t>(k));
    const Vec2 a = f.vertex(static_cast<std::size_t>(k + 1)) - apex;
    const Vec2 b = f.vertex(static_cast<std::size_t>(k + 2)) - apex;
    if (cross(a, w) < 0.0) {
      const EdgeRef p = s.partner({t, k});
      t = p.face;
      k = (p.edge + 1) % 3;
    } else if (cross(w, b) <= 0.0) {
      const EdgeRef p = s.partner({t, (k + 2) % 3});
      t = p.face;
      k = p.edge;
    } else {
      return {t, apex + w};
    }
  }
  throw Error(ErrorCode::InvalidArgument, "could not place a point beside a vertex");
}

// Circumference of the cylinder beside the saddle connection on the given
// side (+1 left, -1 right), or a negative value if there is none up to T.
double cylinder_beside(const Triangulation& tr, const Found& f, int side, double T) {
  const TranslationSurface& s = tr.surface;
  const double diam = s.max_face_diameter();
  const Vec2 u = unit_vector(f.sc.phi);
  const Vec2 n{-u.y, u.x};
  const double along = 1e-6 * diam, aside = 1e-9 * diam;
  const auto [tri, p] = locate_near_vertex(s, f.triangle, f.corner, along * u + (side * aside) * n);
  const double tol = 1e-8 * diam;
  try {
    FlowCursor cur(s, {tri, p, f.sc.phi});
    const double limit = T + along + tol;
    while (cur.time() < limit) {
      const bool crossed = cur.advance(limit);
      const FaceSegment& seg = cur.segment();
      if (seg.face == tri) {
        const double t_star = seg.t0 + dot(p - seg.a, u);
        if (t_star > 0.5 * along && t_star >= seg.t0 - tol && t_star <= seg.t1 + tol &&
            std::abs(cross(u, p - seg.a)) < tol)
          return t_star;
      }
      if (!crossed) break;
    }
  } catch (const VertexHitError&) {
  }
  return -1.0;
}

DirectionSet classify(const TranslationSurface& surface, const Triangulation& tr, const std::vector<Found>& found,
                      double T) {
  DirectionSet set;
  set.T = T;
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < found.size();) {
    std::size_t j = i + 1;
    while (j < found.size() && found[j].sc.phi - found[j - 1].sc.phi <= kDirectionTolerance) ++j;
    groups.emplace_back(i, j);
    i = j;
  }
  set.entries.resize(groups.size());
  const double same = 1e-9 * surface.max_face_diameter();
  parallel_for(groups.size(), [&](std::size_t g) {
    const auto [b, e] = groups[g];
    DirectionEntry& entry = set.entries[g];
    entry.phi = found[b].sc.phi;
    entry.multiplicity = e - b;
    for (std::size_t i = b; i < e; ++i) {
      entry.saddle_lengths.push_back(found[i].sc.length);
      for (int side : {1, -1}) {
        const double c = cylinder_beside(tr, found[i], side, T);
        if (c > 0.0 && c <= T + same) entry.cylinder_lengths.push_back(c);
      }
    }
    std::sort(entry.saddle_lengths.begin(), entry.saddle_lengths.end());
    std::sort(entry.cylinder_lengths.begin(), entry.cylinder_lengths.end());
    std::vector<double> uniq;
    for (double c : entry.cylinder_lengths)
      if (uniq.empty() || c - uniq.back() > same) uniq.push_back(c);
    entry.cylinder_lengths = std::move(uniq);
  });
  std::sort(set.entries.begin(), set.entries.end(),
            [](const DirectionEntry& a, const DirectionEntry& b) { return a.phi < b.phi; });
  return set;
}

}  // namespace

std::vector<SaddleConnection> enumerate_saddle_connections(const TranslationSurface& surface, double T,
                                                           const SaddleOptions& options) {
  const Triangulation tr = triangulate(surface);
  const std::vector<Found> found = search_all(surface, tr, T, options);
  std::vector<SaddleConnection> out;
  out.reserve(found.size());
  for (const Found& f : found) out.push_back(f.sc);
  return out;
}

std::vector<double> DirectionSet::saddle_directions(double lo, double hi) const {
  std::vector<double> out;
  for (const DirectionEntry& e : entries)
    if (std::any_of(e.saddle_lengths.begin(), e.saddle_lengths.end(), [&](double l) { return l > lo && l <= hi; }))
      out.push_back(e.phi);
  return out;
}

std::vector<double> DirectionSet::periodic_directions(double lo, double hi) const {
  std::vector<double> out;
  for (const DirectionEntry& e : entries)
    if (std::any_of(e.cylinder_lengths.begin(), e.cylinder_lengths.end(), [&](double l) { return l > lo && l <= hi; }))
      out.push_back(e.phi);
  return out;
}

DirectionSet direction_set(const TranslationSurface& surface, double T, const SaddleOptions& options) {
  const Triangulation tr = triangulate(surface);
  return classify(surface, tr, search_all(surface, tr, T, options), T);
}

std::vector<double> periodic_directions(const TranslationSurface& surface, double T, const SaddleOptions& options) {
  return direction_set(surface, T, options).periodic_directions(0.0, T);
}

AnnulusSets annulus_sets(const DirectionSet& set, double T) {
  if (!(T > 0.0)) throw Error(ErrorCode::NonpositiveInput, "length bound T must be positive");
  if (T > set.T * (1.0 + 1e-12)) throw Error(ErrorCode::InvalidArgument, "direction set does not reach length T");
  return {set.periodic_directions(0.5 * T, T), set.saddle_directions(0.5 * T, T)};
}

AnnulusSets annulus_sets(const TranslationSurface& surface, double T, const SaddleOptions& options) {
  return annulus_sets(direction_set(surface, T, options), T);
}

IntervalUnion omega_set(const DirectionSet& set, double n, double c0) {
  if (!(c0 >= 4.0)) throw Error(ErrorCode::InvalidArgument, "c0 must be at least 4");
  if (!(n >= 0.0)) throw Error(ErrorCode::InvalidArgument, "n must be nonnegative");
  const int top = static_cast<int>(std::floor(n));
  std::vector<std::pair<double, double>> arcs;
  for (int m = 1; m <= top; ++m) {
    const double T = std::ldexp(1.0, m);
    const AnnulusSets ann = annulus_sets(set, T);
    const double half = 1.0 / (c0 * std::exp2(n + m));
    for (const auto* dirs : {&ann.periodic, &ann.saddle})
      for (double phi : *dirs) arcs.emplace_back(phi - half, phi + half);
  }
  return IntervalUnion::from_arcs(arcs);
}

IntervalUnion omega_set(const TranslationSurface& surface, double n, double c0, const SaddleOptions& options) {
  if (!(n >= 0.0)) throw Error(ErrorCode::InvalidArgument, "n must be nonnegative");
  const int top = static_cast<int>(std::floor(n));
  if (top < 1) return IntervalUnion{};
  return omega_set(direction_set(surface, std::ldexp(1.0, top), options), n, c0);
}

CountingFit fit_counting_constant(const DirectionSet& set, int octaves, int steps_per_octave) {
  if (octaves < 1 || steps_per_octave < 1) throw Error(ErrorCode::InvalidArgument, "ladder needs at least one step");
  CountingFit fit;
  double num = 0.0, den = 0.0;
  for (int k = octaves * steps_per_octave; k >= 0; --k) {
    const double T = set.T * std::exp2(-static_cast<double>(k) / steps_per_octave);
    const std::size_t count = set.saddle_count(T);
    fit.T.push_back(T);
    fit.count.push_back(count);
    num += static_cast<double>(count) * T * T;
    den += T * T * T * T;
  }
  fit.c_star = num / den;
  return fit;
}

std::string saddles_to_csv(const std::vector<SaddleConnection>& connections) {
  std::string out = "dx,dy,length,phi,start_sing,end_sing\n";
  for (const SaddleConnection& c : connections)
    out += format_number(c.holonomy.x) + "," + format_number(c.holonomy.y) + "," + format_number(c.length) + "," +
           format_number(c.phi) + "," + std::to_string(c.start_singularity) + "," + std::to_string(c.end_singularity) +
           "\n";
  return out;
}

}  // namespace flatflow
