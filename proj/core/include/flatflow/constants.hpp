#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flatflow/projection.hpp"
#include "flatflow/surface.hpp"

namespace flatflow {

/// Measured inputs and where they came from.
struct EmpiricalInputs {
  double c_star = 0.0;  // counting constant for saddle-connection directions
  double c5 = 0.0;      // transport length: u + w >= c5 2^n0
  double c6 = 0.0;      // disjoint window: c6 2^n0 consecutive images are disjoint
  std::string c_star_source = "supplied";
  std::string c5_source = "supplied";
  std::string c6_source = "supplied";
};

struct SurfaceConstants {
  EmpiricalInputs inputs;
  // Geometry of the surface.
  double c2 = 0.0;  // lower bound of the projection scale c1(theta)
  double c3 = 0.0;  // upper bound of c1(theta)
  double c4 = 0.0;
  double c7 = 0.0;
  // Derived for a target epsilon.
  double epsilon = 0.0;
  double c0 = 0.0;
  double c9 = 0.0;
  double c8 = 0.0;
  double c10 = 0.0;
  double c11 = 0.0;
  double c12 = 0.0;
};

/// Minimal admissible c0 = max(4, 16 C* / (pi eps)).
double minimal_c0(double c_star, double epsilon);

/// Throws NonpositiveInput unless C*, c5, c6 are positive, InvalidArgument
/// unless 0 < eps < 1.
SurfaceConstants derive_constants(const TranslationSurface& surface, const EmpiricalInputs& inputs, double epsilon);

/// Same geometry and inputs, rederived for another epsilon.
SurfaceConstants rederive(const SurfaceConstants& base, double epsilon);

struct InequalityCheck {
  std::string name;
  std::string statement;
  double lhs = 0.0;  // compared as lhs >= rhs (or > for strict checks)
  double rhs = 0.0;
  bool log2_scale = false;
  bool holds = false;
};

struct ParameterChoice {
  double epsilon = 0.0;
  double N = 0.0;
  double n1 = 0.0;       // log2 N
  double c0 = 0.0;
  double eta = 0.0;
  double delta = 0.0;
  int z1 = 0;
  double z = 0.0;        // 2^z1
  double A = 0.0;        // worst case 4 c0^2 c3 / c6
  double k = 0.0;        // exact when k_exact, otherwise rounded
  double log2_k = 0.0;
  bool k_exact = false;
  double C = 0.0;        // infinity on overflow
  double log2_C = 0.0;
  bool overflow = false;
  std::vector<InequalityCheck> checks;
  bool all_hold() const;
};

/// Parameter choice for the spreading statement at scale N, with every
/// inequality of the argument re-checked (in log2 where values overflow).
ParameterChoice choose_parameters(const SurfaceConstants& consts, double epsilon, double N);

/// Smallest empirical c5 and c6 over transport runs: (u + w) / 2^n0 and
/// disjoint_window / 2^n0 with n0 from the run's projected length.
struct TransportConstants {
  double c5 = 0.0;
  double c6 = 0.0;
  std::size_t runs = 0;
};
TransportConstants empirical_transport_constants(const std::vector<TransportResult>& runs, double c0);

/// Transport runs for random admissible directions and random seed intervals
/// of the given width on random edges. Run i draws from a generator seeded by
/// (seed, i), so the result does not depend on the thread count.
std::vector<TransportResult> sample_transports(const TranslationSurface& surface, std::size_t runs, std::uint64_t seed,
                                               double width = 1e-3, std::size_t cap = 1000000);

/// JSON ledger of constants with formulas, inputs and provenance.
std::string constants_to_json(const SurfaceConstants& consts, const ParameterChoice* choice = nullptr);

}  // namespace flatflow
