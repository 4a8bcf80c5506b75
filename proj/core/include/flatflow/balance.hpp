#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flatflow/interval_union.hpp"
#include "flatflow/saddle.hpp"
#include "flatflow/surface.hpp"

namespace flatflow {

/// z-adic partition of [0, 1): z = 2^z1 children per cell, depth p.
struct PartitionParams {
  int z1 = 2;
  int p = 1;
  std::uint64_t z() const { return std::uint64_t{1} << z1; }
  /// Number of cells at depth h, z^h.
  std::uint64_t cells(int h) const { return std::uint64_t{1} << (z1 * h); }
};

/// Throws InvalidArgument unless z1 >= 1, p >= 1 and z^p <= 2^26.
void validate(const PartitionParams& params);

/// Throws InvalidArgument if a point lies outside [0, 1).
void validate_points(std::span<const double> points);

/// Index of the depth-h cell holding x. Cells are half-open, so a point on a
/// boundary belongs to the right-hand cell.
std::uint64_t cell_index(double x, const PartitionParams& params, int h);

/// Counts over the z^h cells at depth h, in left-to-right order.
std::vector<std::uint64_t> cell_counts(std::span<const double> points, const PartitionParams& params, int h);

/// Sum over depth-p cells of (count - parent count at depth h / z^(p-h))^2.
double s_h_statistic(std::span<const double> points, const PartitionParams& params, int h);

struct TelescopingReport {
  std::vector<double> s;             // S_0 ... S_p
  std::vector<double> differences;   // S_h - S_{h+1}
  std::vector<double> closed_forms;  // z^-(p-h-1) sum over depth h+1 cells of (count - parent/z)^2
  double identity_error = 0.0;       // |S_0 - sum of differences| / max(S_0, 1)
  double closed_form_error = 0.0;    // max |difference - closed form| / max(|closed form|, 1)
  bool last_is_zero = false;
  bool differences_nonnegative = false;
  bool passed(double tolerance = 1e-9) const {
    return last_is_zero && differences_nonnegative && identity_error <= tolerance && closed_form_error <= tolerance;
  }
};

TelescopingReport telescoping_check(std::span<const double> points, const PartitionParams& params);

struct CellBalance {
  int depth = 0;
  std::uint64_t index = 0;                 // cell index at this depth
  std::uint64_t count = 0;
  std::vector<std::uint64_t> child_counts;
  double worst_deviation = 0.0;            // max |child - count/z|
  double allowance = 0.0;                  // delta M / z^(depth+1)
  bool balanced = false;
};

/// Balance of the cell reached by the digit path (each digit in [0, z)). The
/// empty path is the root [0, 1). Requires 0 < delta < 1 and path length < p.
CellBalance is_balanced(std::span<const double> points, double delta, const PartitionParams& params,
                        std::span<const int> cell_path);

struct AntiCrowding {
  bool anti_crowded = true;
  double lo = 0.0;           // violating interval [lo, hi] when not anti-crowded
  double hi = 0.0;
  std::size_t count = 0;     // points inside the witness
  double allowed = 0.0;      // A M |I| for the witness
};

/// Decides whether every interval I in [0, 1) with |I| >= 1/M1 holds at most
/// A M |I| points. Requires A >= 2 and 1 < M1 <= M.
AntiCrowding anti_crowded(std::span<const double> points, double A, double M1);

/// Smallest A for which the points are anti-crowded at M1 (ignoring A >= 2).
double crowding_constant(std::span<const double> points, double M1);

/// S_h of the translate X + tau modulo 1.
double shifted_s_h(std::span<const double> points, double tau, const PartitionParams& params, int h);
inline double shifted_s0(std::span<const double> points, double tau, const PartitionParams& params) {
  return shifted_s_h(points, tau, params, 0);
}

/// Midpoint rule for the integral of the shifted S_0 over [0, upper] with n
/// nodes.
double integral_s0(std::span<const double> points, const PartitionParams& params, std::uint64_t n, double upper = 1.0);

/// Exact integral of the shifted S_0 over [0, 1), from its breakpoints.
double exact_integral_s0(std::span<const double> points, const PartitionParams& params);

/// Points covered by at least min_count of the sets (closed arcs).
IntervalUnion covered_at_least(const std::vector<IntervalUnion>& sets, std::size_t min_count);

/// Points lying in at least eta k of the k sets. Checks that the measure is at
/// least 2pi - d - 2pi eta, d the largest complement measure among the sets.
IntervalUnion majority_set(const std::vector<IntervalUnion>& sets, double eta);

/// Smallest integer count >= x, treating values within 1e-12 of an integer as
/// that integer.
std::size_t ceil_count(double x);

struct GoodDirectionOptions {
  int k = 2;                  // number of scales; replaces the astronomically large proof value
  int z1 = 2;
  double c_star = 0.0;        // counting constant; fitted from the enumeration when 0
  std::optional<double> c0;   // defaults to max(4, 16 C* / (pi eps))
  SaddleOptions saddle;
};

struct GoodDirections {
  IntervalUnion set;
  double epsilon = 0.0;
  double eta = 0.0;
  double c0 = 0.0;
  double c_star = 0.0;
  double n1 = 0.0;                     // log2 N
  int k = 0;
  int z1 = 0;
  double enumeration_T = 0.0;
  std::vector<double> omega_measures;  // measure of the bad set at n1 + i z1, i = 0..k
  double target = 0.0;                 // (1 - eps) 2pi
  bool meets_target = false;
};

/// Directions good at scale n1 + k z1 and at no fewer than eta k of the scales
/// n1 + i z1, i = 0..k-2, with eta = eps/2. Throws BudgetExhausted from the
/// enumeration at the largest scale.
GoodDirections good_directions(const TranslationSurface& surface, double N, double epsilon,
                               const GoodDirectionOptions& options = {});

struct BalanceReport {
  PartitionParams params;
  std::size_t M = 0;
  double delta = 0.0;
  std::vector<std::vector<std::uint64_t>> counts;  // depth 0..p
  TelescopingReport telescoping;
  std::vector<CellBalance> cells;                  // every cell of depth < p
  std::optional<AntiCrowding> anti_crowding;
  double A = 0.0;
  double M1 = 0.0;
};

/// Full report. Anti-crowdedness is evaluated when A > 0 and M1 > 0.
BalanceReport balance_report(std::span<const double> points, const PartitionParams& params, double delta,
                             double A = 0.0, double M1 = 0.0);

std::string balance_report_to_json(const BalanceReport& report);

}  // namespace flatflow
