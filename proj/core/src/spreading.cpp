#include "flatflow/spreading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "flatflow/error.hpp"
#include "flatflow/parallel.hpp"
#include "flatflow/projection.hpp"
#include "flatflow/text.hpp"

namespace flatflow {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double unit_uniform(std::mt19937_64& rng) {
  // 53 random bits, so the value is the same on every platform.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool degenerate_direction(const TranslationSurface& surface, double theta) {
  const Vec2 u = unit_vector(theta);
  for (const EdgeRef& e : surface.edges()) {
    const Vec2 v = surface.edge_vector(e);
    if (std::abs(cross(u, v)) < kDirectionMargin * norm(v)) return true;
  }
  return false;
}

const char* status_name(SpreadStatus s) {
  switch (s) {
    case SpreadStatus::Ok: return "ok";
    case SpreadStatus::VertexHit: return "vertex_hit";
    case SpreadStatus::Degenerate: return "degenerate";
  }
  return "ok";
}

}  // namespace

CellGrid::CellGrid(const TranslationSurface& surface, int N) : N_(N) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be at least 1");
  const double side = 1.0 / N;
  const double min_area = 1e-12 * side * side;
  for (int f = 0; f < surface.face_count(); ++f) {
    const Polygon& poly = surface.face(f);
    Vec2 lo = poly.vertices.front(), hi = lo;
    for (Vec2 v : poly.vertices) {
      lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
      hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
    FaceIndex fi;
    fi.ix0 = static_cast<int>(std::floor(lo.x * N));
    fi.iy0 = static_cast<int>(std::floor(lo.y * N));
    fi.nx = static_cast<int>(std::ceil(hi.x * N)) - fi.ix0;
    fi.ny = static_cast<int>(std::ceil(hi.y * N)) - fi.iy0;
    fi.nx = std::max(fi.nx, 1);
    fi.ny = std::max(fi.ny, 1);
    fi.cell.assign(static_cast<std::size_t>(fi.nx) * static_cast<std::size_t>(fi.ny), -1);
    for (int a = 0; a < fi.nx; ++a) {
      for (int b = 0; b < fi.ny; ++b) {
        const int ix = fi.ix0 + a, iy = fi.iy0 + b;
        const Vec2 blo{ix * side, iy * side};
        const Vec2 bhi{(ix + 1) * side, (iy + 1) * side};
        std::vector<Vec2> clipped = clip_to_box(poly.vertices, blo, bhi);
        if (clipped.size() < 3) continue;
        const double area = signed_area(clipped);
        if (area <= min_area) continue;
        fi.cell[static_cast<std::size_t>(a) * static_cast<std::size_t>(fi.ny) + static_cast<std::size_t>(b)] =
            static_cast<int>(cells_.size());
        cells_.push_back({f, ix, iy, std::move(clipped), area});
      }
    }
    index_.push_back(std::move(fi));
  }
}

void CellGrid::accumulate(const FaceSegment& seg, std::vector<double>& out) const {
  const FaceIndex& fi = index_[static_cast<std::size_t>(seg.face)];
  const double N = N_;
  const double margin = 1e-9;
  const Vec2 a = seg.a, b = seg.b;
  const int cx0 = std::max(static_cast<int>(std::floor(std::min(a.x, b.x) * N - margin)), fi.ix0);
  const int cx1 = std::min(static_cast<int>(std::floor(std::max(a.x, b.x) * N + margin)), fi.ix0 + fi.nx - 1);
  for (int ix = cx0; ix <= cx1; ++ix) {
    // y range of the segment restricted to this column.
    double ylo, yhi;
    if (b.x == a.x) {
      ylo = std::min(a.y, b.y);
      yhi = std::max(a.y, b.y);
    } else {
      const double xl = std::max(ix / N, std::min(a.x, b.x));
      const double xr = std::min((ix + 1) / N, std::max(a.x, b.x));
      const double yl = a.y + (xl - a.x) * (b.y - a.y) / (b.x - a.x);
      const double yr = a.y + (xr - a.x) * (b.y - a.y) / (b.x - a.x);
      ylo = std::min(yl, yr);
      yhi = std::max(yl, yr);
    }
    const int cy0 = std::max(static_cast<int>(std::floor(ylo * N - margin)), fi.iy0);
    const int cy1 = std::min(static_cast<int>(std::floor(yhi * N + margin)), fi.iy0 + fi.ny - 1);
    for (int iy = cy0; iy <= cy1; ++iy) {
      const int c = fi.cell[static_cast<std::size_t>(ix - fi.ix0) * static_cast<std::size_t>(fi.ny) +
                            static_cast<std::size_t>(iy - fi.iy0)];
      if (c < 0) continue;
      out[static_cast<std::size_t>(c)] += segment_length_inside(cells_[static_cast<std::size_t>(c)].polygon, a, b);
    }
  }
}

std::vector<double> cell_occupancy(const TranslationSurface& surface, const CellGrid& grid, const DirectedPoint& start,
                                   double T) {
  std::vector<double> occ(grid.size(), 0.0);
  for_each_segment(surface, start, T, [&](const FaceSegment& seg) { grid.accumulate(seg, occ); });
  return occ;
}

std::vector<double> sample_directions(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed, 0);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = kTwoPi * (static_cast<double>(i) + unit_uniform(rng)) / static_cast<double>(n);
  return out;
}

Vec2 sample_point(const TranslationSurface& surface, std::uint64_t seed, std::uint64_t index, int& face) {
  std::mt19937_64 rng = make_rng(seed, index + 1);
  double pick = unit_uniform(rng) * surface.area();
  face = surface.face_count() - 1;
  for (int f = 0; f < surface.face_count(); ++f) {
    pick -= surface.face(f).area();
    if (pick < 0.0) {
      face = f;
      break;
    }
  }
  const Polygon& poly = surface.face(face);
  Vec2 lo = poly.vertices.front(), hi = lo;
  for (Vec2 v : poly.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  for (;;) {
    const Vec2 p{lo.x + unit_uniform(rng) * (hi.x - lo.x), lo.y + unit_uniform(rng) * (hi.y - lo.y)};
    if (point_in_polygon(poly.vertices, p)) return p;
  }
}

SpreadReport spread_experiment(const TranslationSurface& surface, const SpreadOptions& options,
                               const IntervalUnion* good_set) {
  if (!(options.T > 0.0)) throw Error(ErrorCode::InvalidArgument, "T must be positive");
  if (!(options.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (options.directions == 0 || options.starts == 0)
    throw Error(ErrorCode::InvalidArgument, "need at least one direction and one start");
  const CellGrid grid(surface, options.N);
  SpreadReport report;
  report.options = options;
  report.cells = grid.cells();
  for (const GridCell& c : grid.cells()) report.expected.push_back(options.T * c.area / surface.area());

  const std::vector<double> thetas = sample_directions(options.directions, options.seed);
  report.directions.resize(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t i) {
    DirectionOutcome& d = report.directions[i];
    d.theta = thetas[i];
    if (good_set) d.in_good_set = good_set->contains(d.theta) ? 1 : 0;
    if (degenerate_direction(surface, d.theta)) {
      d.skipped = true;
      d.runs.push_back({{0, {}, d.theta}, SpreadStatus::Degenerate, {}, {}, false});
      return;
    }
    d.pass = true;
    for (std::size_t j = 0; j < options.starts; ++j) {
      SpreadRun run;
      int face = 0;
      const Vec2 p = sample_point(surface, options.seed, i * options.starts + j, face);
      run.start = {face, p, d.theta};
      try {
        run.occupancy = cell_occupancy(surface, grid, run.start, options.T);
      } catch (const VertexHitError&) {
        run.status = SpreadStatus::VertexHit;
        d.skipped = true;
        d.pass = false;
        d.runs.push_back(std::move(run));
        continue;
      }
      run.pass = true;
      for (std::size_t c = 0; c < run.occupancy.size(); ++c) {
        const double e = report.expected[c];
        const bool ok = (1.0 - options.epsilon) * e < run.occupancy[c] && run.occupancy[c] < (1.0 + options.epsilon) * e;
        run.cell_pass.push_back(ok);
        if (!ok) run.pass = false;
      }
      if (!run.pass) d.pass = false;
      d.runs.push_back(std::move(run));
    }
    if (d.skipped) d.pass = false;
  });

  for (const DirectionOutcome& d : report.directions) {
    if (d.skipped) {
      const bool vertex = std::any_of(d.runs.begin(), d.runs.end(),
                                      [](const SpreadRun& r) { return r.status == SpreadStatus::VertexHit; });
      ++(vertex ? report.skipped_vertex : report.skipped_degenerate);
      continue;
    }
    ++report.evaluated;
    if (d.pass) ++report.passed;
    if (d.in_good_set >= 0 && (d.in_good_set == 1) == d.pass) ++report.good_set_agreement;
  }
  report.pass_fraction =
      report.evaluated ? static_cast<double>(report.passed) / static_cast<double>(report.evaluated) : 0.0;
  return report;
}

std::string spread_report_to_json(const SpreadReport& r) {
  nlohmann::json j;
  j["N"] = r.options.N;
  j["epsilon"] = r.options.epsilon;
  j["T"] = r.options.T;
  j["directions"] = r.options.directions;
  j["starts"] = r.options.starts;
  j["seed"] = r.options.seed;
  j["evaluated"] = r.evaluated;
  j["passed"] = r.passed;
  j["pass_fraction"] = r.pass_fraction;
  j["skipped_vertex"] = r.skipped_vertex;
  j["skipped_degenerate"] = r.skipped_degenerate;
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t c = 0; c < r.cells.size(); ++c)
    cells.push_back({{"face", r.cells[c].face},
                     {"ix", r.cells[c].ix},
                     {"iy", r.cells[c].iy},
                     {"area", r.cells[c].area},
                     {"expected", r.expected[c]}});
  j["cells"] = std::move(cells);
  nlohmann::json dirs = nlohmann::json::array();
  for (const DirectionOutcome& d : r.directions) {
    nlohmann::json dj{{"theta", d.theta}, {"pass", d.pass}, {"skipped", d.skipped}};
    if (d.in_good_set >= 0) dj["in_good_set"] = d.in_good_set == 1;
    nlohmann::json runs = nlohmann::json::array();
    for (const SpreadRun& run : d.runs) {
      nlohmann::json rj{{"face", run.start.face},
                        {"x", run.start.position.x},
                        {"y", run.start.position.y},
                        {"status", status_name(run.status)},
                        {"pass", run.pass}};
      if (run.status == SpreadStatus::Ok) rj["occupancy"] = run.occupancy;
      runs.push_back(std::move(rj));
    }
    dj["runs"] = std::move(runs);
    dirs.push_back(std::move(dj));
  }
  j["results"] = std::move(dirs);
  if (std::any_of(r.directions.begin(), r.directions.end(), [](const DirectionOutcome& d) { return d.in_good_set >= 0; }))
    j["good_set_agreement"] = r.good_set_agreement;
  return j.dump(2) + "\n";
}

std::string spread_report_to_csv(const SpreadReport& r) {
  std::string out = "direction,theta,run,cell,occupancy,expected,pass\n";
  for (std::size_t i = 0; i < r.directions.size(); ++i) {
    const DirectionOutcome& d = r.directions[i];
    for (std::size_t k = 0; k < d.runs.size(); ++k) {
      const SpreadRun& run = d.runs[k];
      if (run.status != SpreadStatus::Ok) continue;
      for (std::size_t c = 0; c < run.occupancy.size(); ++c) {
        out += std::to_string(i) + "," + format_number(d.theta) + "," + std::to_string(k) + "," + std::to_string(c) +
               "," + format_number(run.occupancy[c]) + "," + format_number(r.expected[c]) + "," +
               (run.cell_pass[c] ? "1" : "0") + "\n";
      }
    }
  }
  return out;
}

double star_discrepancy(std::span<const double> points) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "star discrepancy of an empty set");
  std::vector<double> x(points.begin(), points.end());
  std::sort(x.begin(), x.end());
  const double M = static_cast<double>(x.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    worst = std::max(worst, std::abs(x[i] - (2.0 * static_cast<double>(i) + 1.0) / (2.0 * M)));
  return 0.5 / M + worst;
}

SuperdensityResult superdensity_probe(const TranslationSurface& torus, double alpha, int N, double C1, Vec2 start) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be at least 1");
  if (!(C1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "C1 must be positive");
  const bool unit_square = torus.face_count() == 1 && torus.face(0).size() == 4 && std::abs(torus.area() - 1.0) < 1e-12 &&
                           norm(torus.face(0).vertices[0]) == 0.0;
  if (!unit_square) throw Error(ErrorCode::InvalidArgument, "superdensity probe needs the unit square torus");
  const double radius = 1.0 / N;
  const double length = C1 * N;
  std::vector<FaceSegment> segments;
  for_each_segment(torus, {0, start, std::atan2(alpha, 1.0)}, length,
                   [&](const FaceSegment& s) { segments.push_back(s); });

  const int m = 2 * N;
  std::vector<double> first(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  std::vector<double> nearest(first.size());
  parallel_for(first.size(), [&](std::size_t idx) {
    const Vec2 p{(static_cast<double>(idx / static_cast<std::size_t>(m)) + 0.5) / m,
                 (static_cast<double>(idx % static_cast<std::size_t>(m)) + 0.5) / m};
    double t_first = std::numeric_limits<double>::infinity();
    double d_min = std::numeric_limits<double>::infinity();
    for (const FaceSegment& s : segments) {
      const Vec2 d = s.b - s.a;
      const double len = norm(d);
      for (int sx = -1; sx <= 1; ++sx) {
        for (int sy = -1; sy <= 1; ++sy) {
          const Vec2 q{p.x + sx, p.y + sy};
          d_min = std::min(d_min, point_segment_distance(q, s.a, s.b));
          if (s.t0 >= t_first || len == 0.0) continue;
          // Earliest parameter along the piece within the radius of q.
          const Vec2 u = (1.0 / len) * d;
          const Vec2 r = q - s.a;
          const double along = dot(r, u);
          const double off2 = dot(r, r) - along * along;
          const double disc = radius * radius - off2;
          if (disc < 0.0 || along + std::sqrt(disc) < 0.0) continue;
          const double enter = std::max(along - std::sqrt(disc), 0.0);
          if (enter > len) continue;
          t_first = std::min(t_first, s.t0 + enter);
        }
      }
    }
    first[idx] = t_first;
    nearest[idx] = d_min;
  });
  SuperdensityResult out;
  const double latest = *std::max_element(first.begin(), first.end());
  out.minimal_c1 = latest / N;
  out.worst_distance = *std::max_element(nearest.begin(), nearest.end());
  out.passes = out.worst_distance <= radius;
  return out;
}

}  // namespace flatflow
