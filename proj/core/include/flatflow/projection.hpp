#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "flatflow/flow.hpp"
#include "flatflow/surface.hpp"

namespace flatflow {

/// Smallest admissible |sin(edge direction - theta)|.
inline constexpr double kDirectionMargin = 1e-6;

/// Perpendicular projection of the edges E_1 ... E_b onto a line transverse
/// to the flow, rescaled so the images tile [0, 1).
class ProjectionMap {
 public:
  struct Entry {
    EdgeRef edge;        // canonical edge
    double h_length;     // |E| |sin(dir(E) - theta)|
    double lo;           // start of the image subinterval in [0, 1)
    double length;       // h_length / c1
    bool increasing;     // image grows with the edge parameter
  };

  const TranslationSurface& surface() const { return *surface_; }
  double theta() const { return theta_; }
  Vec2 direction() const { return u_; }
  /// Sum of the H-lengths.
  double c1() const { return c1_; }
  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& entry(EdgeRef canonical) const;
  std::size_t entry_index(EdgeRef canonical) const;

  /// psi of the point at parameter s along edge e (either side of a pair).
  double operator()(EdgeRef e, double s) const;

  /// Inverse of psi restricted to one canonical edge: the edge parameter of x.
  double edge_parameter(std::size_t entry_index, double x) const;
  /// Entry whose image contains x.
  std::size_t locate(double x) const;

  /// x expressed as an affine function of a chart point P lying on face edge
  /// e: psi = intercept(e) + (n . P) / c1, n the unit normal left of the flow.
  double intercept(EdgeRef e) const;
  double normal_coordinate(Vec2 p) const { return cross(u_, p); }

 private:
  friend ProjectionMap build_projection(const TranslationSurface& surface, double theta);
  const TranslationSurface* surface_ = nullptr;
  double theta_ = 0.0;
  Vec2 u_;
  double c1_ = 0.0;
  std::vector<Entry> entries_;
  std::vector<std::size_t> entry_of_edge_;  // flat index over all face edges
  std::vector<std::size_t> face_offset_;
};

/// Throws DegenerateDirection if theta is within the margin of an edge
/// direction. The surface must outlive the returned map.
ProjectionMap build_projection(const TranslationSurface& surface, double theta);

struct IetBranch {
  double start = 0.0;
  double length = 0.0;
  double offset = 0.0;  // T(x) = x + offset on [start, start + length)
  EdgeRef entry;        // face edge the flow enters through
  EdgeRef exit;         // edge of the same face it leaves through
};

/// Projection of a vertex that the flow reaches from an edge, forward or
/// backward.
struct SingularPoint {
  double x = 0.0;
  int singularity = 0;
  Corner corner;         // vertex, in the face the flow crosses
  double distance = 0.0; // flow time from the edge to the vertex
};

struct IntervalExchange {
  ProjectionMap projection;
  std::vector<IetBranch> branches;        // sorted by start
  std::vector<SingularPoint> forward;     // sorted by x
  std::vector<SingularPoint> backward;    // sorted by x

  std::size_t branch_index(double x) const;
  double apply(double x) const;
  double apply_inverse(double x) const;

  std::vector<std::size_t> image_order;   // branches sorted by image start
};

IntervalExchange induced_iet(const TranslationSurface& surface, double theta);

/// JSON: {"theta":..,"c1":..,"branches":[[start,length,offset],...]}.
std::string iet_to_json(const IntervalExchange& iet);

struct HittingSet {
  std::vector<double> points;
  HitSequence source;
};

HittingSet hitting_set(const TranslationSurface& surface, const DirectedPoint& start, std::size_t m);

/// One value per line.
std::string hitting_set_to_text(const HittingSet& set);

struct TransportSeed {
  EdgeRef edge;
  double s0 = 0.0;
  double s1 = 0.0;
};

struct TransportedInterval {
  int j = 0;
  EdgeRef edge;    // canonical edge
  double lo = 0.0; // projected coordinates in [0, 1)
  double hi = 0.0;
};

struct TransportResult {
  std::size_t u = 0;
  std::size_t w = 0;
  std::vector<TransportedInterval> intervals;  // j = -u ... w
  int start_singularity = -1;                  // V0
  int end_singularity = -1;                    // V1
  Vec2 start_vertex;                           // V0' in the developed plane
  Vec2 end_vertex;                             // V1'
  double saddle_length = 0.0;                  // |V0'V1'|
  double h_length = 0.0;                       // |H(Q0R0)|
  bool budget_exhausted = false;
  /// Longest run length L such that any L consecutive intervals are pairwise
  /// disjoint.
  std::size_t disjoint_window = 0;
};

/// Moves the seed interval forward and backward by the flow until the image
/// strip runs into a vertex. Stops at `cap` total extensions with
/// budget_exhausted set.
TransportResult transport_interval(const IntervalExchange& iet, const TransportSeed& seed, std::size_t cap = 1000000);
TransportResult transport_interval(const TranslationSurface& surface, double theta, const TransportSeed& seed,
                                   std::size_t cap = 1000000);

/// Minimal index gap among overlapping pairs, or the interval count when all
/// are disjoint.
std::size_t measured_disjoint_window(const std::vector<TransportedInterval>& intervals);

/// The scale n0 with 1/(c0^2 2^(n0+1)) <= h < 1/(c0^2 2^n0).
int transport_scale(double h_length, double c0);

}  // namespace flatflow
