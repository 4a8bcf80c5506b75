#include "flatflow/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <json.hpp>

#include "flatflow/error.hpp"
#include "flatflow/parallel.hpp"

namespace flatflow {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::NonpositiveInput, std::string(what) + " must be positive");
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
}

void fill_derived(SurfaceConstants& c, double epsilon) {
  require_epsilon(epsilon);
  c.epsilon = epsilon;
  c.c0 = minimal_c0(c.inputs.c_star, epsilon);
  c.c9 = 4.0 * c.c0 * c.c0 * c.c3 / c.inputs.c6;
  c.c8 = 9.0 * (c.c9 + 2.0);
  c.c10 = 1.0 / (4.0 * c.c8);
  c.c11 = 4.0 * c.c9 / c.c10;
  c.c12 = std::max(256.0 * c.c0 * c.c0 * c.c3 * c.c9 * c.c9 * c.c9 * c.c11 / (c.inputs.c6 * c.c10 * c.c10 * c.c10), 1.0);
}

InequalityCheck check(std::string name, std::string statement, double lhs, double rhs, bool strict, bool log2_scale) {
  InequalityCheck c;
  c.name = std::move(name);
  c.statement = std::move(statement);
  c.lhs = lhs;
  c.rhs = rhs;
  c.log2_scale = log2_scale;
  c.holds = strict ? lhs > rhs : lhs >= rhs;
  return c;
}

}  // namespace

double minimal_c0(double c_star, double epsilon) {
  return std::max(4.0, 16.0 * c_star / (std::numbers::pi * epsilon));
}

SurfaceConstants derive_constants(const TranslationSurface& surface, const EmpiricalInputs& inputs, double epsilon) {
  require_positive(inputs.c_star, "C*");
  require_positive(inputs.c5, "c5");
  require_positive(inputs.c6, "c6");
  SurfaceConstants c;
  c.inputs = inputs;
  c.c2 = surface.inscribed_diameter();
  c.c3 = surface.total_edge_length();
  c.c4 = surface.transport_length_constant();
  c.c7 = surface.max_face_diameter();
  fill_derived(c, epsilon);
  return c;
}

SurfaceConstants rederive(const SurfaceConstants& base, double epsilon) {
  SurfaceConstants c = base;
  fill_derived(c, epsilon);
  return c;
}

bool ParameterChoice::all_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) { return c.holds; });
}

ParameterChoice choose_parameters(const SurfaceConstants& base, double epsilon, double N) {
  require_epsilon(epsilon);
  if (!(N >= 1.0)) throw Error(ErrorCode::InvalidArgument, "N must be at least 1");
  const SurfaceConstants c = rederive(base, epsilon);
  const double e2 = epsilon * epsilon;
  const double c6 = c.inputs.c6;
  const double c0sq = c.c0 * c.c0;

  ParameterChoice p;
  p.epsilon = epsilon;
  p.N = N;
  p.n1 = std::log2(N);
  p.c0 = c.c0;
  p.eta = epsilon / 2.0;
  p.delta = c.c10 * e2;
  const double z_floor = c.c11 / e2;
  p.z1 = static_cast<int>(std::ceil(std::log2(z_floor)));
  while (std::ldexp(1.0, p.z1) < z_floor) ++p.z1;
  while (p.z1 > 1 && std::ldexp(1.0, p.z1 - 1) >= z_floor) --p.z1;
  p.z = std::ldexp(1.0, p.z1);
  p.A = 4.0 * c0sq * c.c3 / c6;

  const double x = c.c12 / std::pow(epsilon, 9.0);  // k = [x] + 1
  const double log2_x = std::log2(c.c12) - 9.0 * std::log2(epsilon);
  if (x < std::ldexp(1.0, 52)) {
    p.k = std::floor(x) + 1.0;
    p.k_exact = true;
    p.log2_k = std::log2(p.k);
  } else {
    p.k = x;
    p.log2_k = log2_x;
  }

  const double log2_base = std::log2(2.0 * c.c11 / e2);
  const double lead = std::max({64.0 * c0sq * c.c3 * c.c9 / (c.c10 * e2), 2.0 * c0sq * c.c3, c6});
  p.log2_C = std::log2(lead) + 2.0 * c.c12 * std::pow(epsilon, -9.0) * log2_base;
  if (p.log2_C < 1000.0) {
    p.C = std::ceil(std::exp2(p.log2_C));
    p.overflow = !std::isfinite(p.C);
  } else {
    p.C = std::numeric_limits<double>::infinity();
    p.overflow = true;
  }
  if (p.overflow) p.C = std::numeric_limits<double>::infinity();

  const double log2_z = static_cast<double>(p.z1);
  const double log2_delta = std::log2(p.delta);
  const double log2_M = p.log2_C + p.n1;  // M = C N
  // Largest depth used is h + 1 = n1/z1 + c* + k - 1 with z^(n1/z1 + c*) = N c0^2 c1, c1 <= c3.
  const double log2_zh1 = p.n1 + std::log2(c0sq * c.c3) + (p.k - 1.0) * log2_z;
  const double log2_zk = p.k * log2_z;
  auto& ch = p.checks;
  ch.push_back(check("c0", "c0 >= max(4, 16 C*/(pi eps))", c.c0, std::max(4.0, 16.0 * c.inputs.c_star / (std::numbers::pi * epsilon)),
                     false, false));
  ch.push_back(check("eta", "eta = eps/2", p.eta == epsilon / 2.0 ? 1.0 : 0.0, 1.0, false, false));
  ch.push_back(check("imbalance_transport", "delta M >= 64 z^(h+1)", log2_delta + log2_M, 6.0 + log2_zh1, false, true));
  ch.push_back(check("shift_window", "delta M1 >= 8 A z^(h+1)", p.delta * p.z, 4.0 * p.A, false, false));
  ch.push_back(check("crowding_overlap", "2(z - 4) delta - 4(A + delta) >= delta z / 2",
                     2.0 * (p.z - 4.0) * p.delta - 4.0 * (p.A + p.delta), p.delta * p.z / 2.0, false, false));
  ch.push_back(check("k_lower", "k > 64 c0^2 c1 A^3 z / (c6 eta delta^3)", p.log2_k,
                     std::log2(64.0 * c0sq * c.c3 / c6) + 3.0 * std::log2(p.A) + log2_z - std::log2(p.eta) - 3.0 * log2_delta,
                     true, true));
  ch.push_back(check("q_bound", "delta M >= 16 z^(h+1) (1 + log q)", log2_delta + log2_M,
                     std::log2(16.0 * (1.0 + std::log(c.c9))) + log2_zh1, false, true));
  ch.push_back(check("z_lower", "z >= c11/eps^2", p.z, z_floor, false, false));
  ch.push_back(check("z_upper", "2 c11/eps^2 > z", 2.0 * z_floor, p.z, true, false));
  ch.push_back(check("z_chain", "c11/eps^2 >= 3 c9/delta + 8", z_floor, 3.0 * c.c9 / p.delta + 8.0, false, false));
  ch.push_back(check("c11", "c11 >= 4 c9/c10", c.c11, 4.0 * c.c9 / c.c10, false, false));
  ch.push_back(check("c12", "c12 >= 1", c.c12, 1.0, false, false));
  if (p.k_exact) {
    ch.push_back(check("k_floor", "k > c12/eps^9", p.k, x, true, false));
    ch.push_back(check("k_ceiling", "2 c12/eps^9 > k", 2.0 * x, p.k, true, false));
  } else {
    ch.push_back(check("k_floor", "k >= c12/eps^9", p.log2_k, log2_x, false, true));
    ch.push_back(check("k_ceiling", "2 c12/eps^9 > k", log2_x + 1.0, p.log2_k, true, true));
  }
  ch.push_back(check("zk_bound", "z^k < (2 c11/eps^2)^(2 c12/eps^9)", 2.0 * c.c12 * std::pow(epsilon, -9.0) * log2_base,
                     log2_zk, true, true));
  ch.push_back(check("C", "C >= max(64 c0^2 c3 c9/(c10 eps^2), 2 c0^2 c3, c6) (2 c11/eps^2)^(2 c12/eps^9)", p.log2_C,
                     std::log2(lead) + 2.0 * c.c12 * std::pow(epsilon, -9.0) * log2_base, false, true));
  ch.push_back(check("anti_crowding_size", "M > max(2 c0^2 c3, c6) N z^k", log2_M,
                     std::log2(std::max(2.0 * c0sq * c.c3, c6)) + p.n1 + log2_zk, true, true));
  return p;
}

TransportConstants empirical_transport_constants(const std::vector<TransportResult>& runs, double c0) {
  TransportConstants out;
  out.c5 = std::numeric_limits<double>::infinity();
  out.c6 = std::numeric_limits<double>::infinity();
  for (const TransportResult& r : runs) {
    if (r.budget_exhausted || !(r.h_length > 0.0)) continue;
    const double scale = std::ldexp(1.0, transport_scale(r.h_length, c0));
    out.c5 = std::min(out.c5, static_cast<double>(r.u + r.w) / scale);
    out.c6 = std::min(out.c6, static_cast<double>(r.disjoint_window) / scale);
    ++out.runs;
  }
  if (out.runs == 0) out.c5 = out.c6 = 0.0;
  return out;
}

std::vector<TransportResult> sample_transports(const TranslationSurface& surface, std::size_t runs, std::uint64_t seed,
                                               double width, std::size_t cap) {
  if (!(width > 0.0 && width < 1.0)) throw Error(ErrorCode::InvalidArgument, "seed width must lie in (0, 1)");
  const auto& edges = surface.edges();
  std::vector<TransportResult> out(runs);
  parallel_for(runs, [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (;;) {
      const double theta = kTwoPi * uniform();
      const EdgeRef e = edges[static_cast<std::size_t>(rng() % edges.size())];
      const double s0 = uniform() * (1.0 - width);
      try {
        out[i] = transport_interval(surface, theta, {e, s0, s0 + width}, cap);
        return;
      } catch (const Error& err) {
        if (err.code() != ErrorCode::DegenerateDirection) throw;
      }
    }
  });
  return out;
}

std::string constants_to_json(const SurfaceConstants& c, const ParameterChoice* choice) {
  auto entry = [](double value, const char* formula, const std::string& source) {
    return nlohmann::json{{"value", value}, {"formula", formula}, {"source", source}};
  };
  nlohmann::json j;
  j["epsilon"] = c.epsilon;
  nlohmann::json k;
  k["C_star"] = entry(c.inputs.c_star, "least-squares slope of saddle direction count against T^2", c.inputs.c_star_source);
  k["c5"] = entry(c.inputs.c5, "min (u + w) / 2^n0 over transport runs", c.inputs.c5_source);
  k["c6"] = entry(c.inputs.c6, "min disjoint window / 2^n0 over transport runs", c.inputs.c6_source);
  k["c2"] = entry(c.c2, "largest inscribed diameter over faces", "surface");
  k["c3"] = entry(c.c3, "sum of edge lengths", "surface");
  k["c4"] = entry(c.c4, "2 * max face diameter", "surface");
  k["c7"] = entry(c.c7, "max face diameter", "surface");
  k["c0"] = entry(c.c0, "max(4, 16 C*/(pi eps))", "derived");
  k["c9"] = entry(c.c9, "4 c0^2 c3 / c6", "derived");
  k["c8"] = entry(c.c8, "9 (c9 + 2)", "derived");
  k["c10"] = entry(c.c10, "1 / (4 c8)", "derived");
  k["c11"] = entry(c.c11, "4 c9 / c10", "derived");
  k["c12"] = entry(c.c12, "max(256 c0^2 c3 c9^3 c11 / (c6 c10^3), 1)", "derived");
  j["constants"] = std::move(k);
  if (choice) {
    const ParameterChoice& p = *choice;
    nlohmann::json pj{{"N", p.N},         {"n1", p.n1},         {"eta", p.eta},     {"delta", p.delta},
                      {"z", p.z},         {"z1", p.z1},         {"A", p.A},         {"k", p.k},
                      {"log2_k", p.log2_k}, {"k_exact", p.k_exact}, {"log2_C", p.log2_C}, {"overflow", p.overflow}};
    if (!p.overflow) pj["C"] = p.C;
    nlohmann::json checks = nlohmann::json::array();
    for (const InequalityCheck& ic : p.checks)
      checks.push_back({{"name", ic.name},
                        {"statement", ic.statement},
                        {"lhs", ic.lhs},
                        {"rhs", ic.rhs},
                        {"log2", ic.log2_scale},
                        {"holds", ic.holds}});
    pj["checks"] = std::move(checks);
    pj["all_hold"] = p.all_hold();
    j["parameters"] = std::move(pj);
  }
  return j.dump(2) + "\n";
}

}  // namespace flatflow
