#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "flatflow/interval_union.hpp"
#include "flatflow/surface.hpp"

namespace flatflow {

struct SaddleConnection {
  Vec2 holonomy;
  double length = 0.0;
  double phi = 0.0;  // angle of the holonomy in [0, 2pi)
  int start_singularity = 0;
  int end_singularity = 0;
};

struct SaddleOptions {
  std::size_t node_budget = 50000000;
};

/// Every oriented saddle connection of length at most T, sorted by
/// (phi, length). Throws BudgetExhausted when the development search visits
/// more than node_budget face copies.
std::vector<SaddleConnection> enumerate_saddle_connections(const TranslationSurface& surface, double T,
                                                           const SaddleOptions& options = {});

/// Directions within this tolerance (radians) are treated as equal.
inline constexpr double kDirectionTolerance = 1e-12;

struct DirectionEntry {
  double phi = 0.0;
  std::size_t multiplicity = 0;             // saddle connections in this direction
  std::vector<double> saddle_lengths;       // sorted
  std::vector<double> cylinder_lengths;     // circumferences of cylinders, sorted, deduplicated
  bool periodic() const { return !cylinder_lengths.empty(); }
};

/// Saddle-connection directions up to length T, each annotated with the
/// closed geodesics (cylinder circumferences up to T) in that direction.
struct DirectionSet {
  double T = 0.0;
  std::vector<DirectionEntry> entries;  // sorted by phi

  /// Directions of saddle connections with length in (lo, hi].
  std::vector<double> saddle_directions(double lo, double hi) const;
  /// Directions carrying a closed geodesic with length in (lo, hi].
  std::vector<double> periodic_directions(double lo, double hi) const;
  std::size_t saddle_count(double up_to) const { return saddle_directions(0.0, up_to).size(); }
  std::size_t periodic_count(double up_to) const { return periodic_directions(0.0, up_to).size(); }
};

/// Groups the saddle connections up to T by direction and detects cylinders
/// by following the flow just beside each saddle connection.
DirectionSet direction_set(const TranslationSurface& surface, double T, const SaddleOptions& options = {});

/// Directions carrying a closed geodesic of length at most T.
std::vector<double> periodic_directions(const TranslationSurface& surface, double T, const SaddleOptions& options = {});

struct AnnulusSets {
  std::vector<double> periodic;  // lengths in (T/2, T]
  std::vector<double> saddle;
};
AnnulusSets annulus_sets(const DirectionSet& set, double T);
AnnulusSets annulus_sets(const TranslationSurface& surface, double T, const SaddleOptions& options = {});

/// Union over 1 <= m <= floor(n) and phi in the annulus sets at 2^m of
/// [phi - 1/(c0 2^(n+m)), phi + 1/(c0 2^(n+m))]. The direction set must
/// reach T >= 2^floor(n).
IntervalUnion omega_set(const DirectionSet& set, double n, double c0);
IntervalUnion omega_set(const TranslationSurface& surface, double n, double c0, const SaddleOptions& options = {});

struct CountingFit {
  double c_star = 0.0;              // least-squares slope of count against T^2
  std::vector<double> T;
  std::vector<std::size_t> count;   // |N2(T)|
};

/// Fits |N2(T)| ~ C T^2 over T = T_max / 2^(k/steps_per_octave), k over the given
/// number of octaves.
CountingFit fit_counting_constant(const DirectionSet& set, int octaves = 3, int steps_per_octave = 4);

/// Columns dx,dy,length,phi,start_sing,end_sing.
std::string saddles_to_csv(const std::vector<SaddleConnection>& connections);

}  // namespace flatflow
