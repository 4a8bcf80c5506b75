#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flatflow/flow.hpp"
#include "flatflow/interval_union.hpp"
#include "flatflow/surface.hpp"

namespace flatflow {

struct GridCell {
  int face = 0;
  int ix = 0;  // cell covers [ix/N, (ix+1)/N] x [iy/N, (iy+1)/N] in face coordinates
  int iy = 0;
  std::vector<Vec2> polygon;  // the square clipped to the face
  double area = 0.0;
};

/// Axis-aligned squares of side 1/N clipped to each face. Squares never
/// straddle an edge identification.
class CellGrid {
 public:
  CellGrid(const TranslationSurface& surface, int N);

  int N() const { return N_; }
  const std::vector<GridCell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }

  /// Length of the flow segment spent in each cell, accumulated into `out`
  /// (indexed like cells()).
  void accumulate(const FaceSegment& segment, std::vector<double>& out) const;

 private:
  struct FaceIndex {
    int ix0 = 0, iy0 = 0, nx = 0, ny = 0;
    std::vector<int> cell;  // nx * ny, -1 where the square misses the face
  };
  int N_;
  std::vector<GridCell> cells_;
  std::vector<FaceIndex> index_;
};

/// Time spent in every cell by the flow of length T from start.
std::vector<double> cell_occupancy(const TranslationSurface& surface, const CellGrid& grid, const DirectedPoint& start,
                                   double T);

struct SpreadOptions {
  int N = 8;
  double epsilon = 0.25;
  double T = 1000.0;
  std::size_t directions = 256;
  std::size_t starts = 1;  // start points per direction
  std::uint64_t seed = 7;
};

enum class SpreadStatus { Ok, VertexHit, Degenerate };

struct SpreadRun {
  DirectedPoint start;
  SpreadStatus status = SpreadStatus::Ok;
  std::vector<double> occupancy;  // per cell; empty unless status is Ok
  std::vector<bool> cell_pass;
  bool pass = false;
};

struct DirectionOutcome {
  double theta = 0.0;
  std::vector<SpreadRun> runs;
  bool skipped = false;  // a run hit a vertex or the direction is too close to an edge
  bool pass = false;     // every run passed
  int in_good_set = -1;  // 1 or 0 when a good-direction set was supplied
};

struct SpreadReport {
  SpreadOptions options;
  std::vector<GridCell> cells;
  std::vector<double> expected;  // T area(Q) / area(P)
  std::vector<DirectionOutcome> directions;
  std::size_t evaluated = 0;
  std::size_t passed = 0;
  std::size_t skipped_vertex = 0;
  std::size_t skipped_degenerate = 0;
  double pass_fraction = 0.0;      // passed / evaluated
  std::size_t good_set_agreement = 0;  // directions where pass equals good-set membership
};

/// Stratified directions: theta_i = 2pi (i + U_i) / n with U_i uniform from
/// a generator seeded by `seed`.
std::vector<double> sample_directions(std::size_t n, std::uint64_t seed);

/// Uniform point of the surface (face chosen by area) from a generator seeded
/// by (seed, index).
Vec2 sample_point(const TranslationSurface& surface, std::uint64_t seed, std::uint64_t index, int& face);

/// Runs the experiment over sampled directions and starts in parallel. A
/// direction passes when every cell Q of every run has occupancy strictly
/// within (1 +- eps) T area(Q) / area(P).
SpreadReport spread_experiment(const TranslationSurface& surface, const SpreadOptions& options,
                               const IntervalUnion* good_set = nullptr);

std::string spread_report_to_json(const SpreadReport& report);
/// Columns direction,theta,run,cell,occupancy,expected,pass.
std::string spread_report_to_csv(const SpreadReport& report);

/// Exact one-dimensional star discrepancy of points in [0, 1).
double star_discrepancy(std::span<const double> points);

struct SuperdensityResult {
  bool passes = false;         // every probe point within 1/N of the segment of length C1 N
  double minimal_c1 = 0.0;     // smallest C1 that passes given the traced length (inf if none)
  double worst_distance = 0.0; // max over probes of the distance to the segment of length C1 N
};

/// Line of slope alpha on the unit square torus from `start`, checked against
/// the (2N) x (2N) grid of probe points.
SuperdensityResult superdensity_probe(const TranslationSurface& torus, double alpha, int N, double C1,
                                      Vec2 start = {0.318309886183791, 0.367879441171442});

}  // namespace flatflow
