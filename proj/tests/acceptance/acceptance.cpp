// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "flatflow/balance.hpp"
#include "flatflow/constants.hpp"
#include "flatflow/flow.hpp"
#include "flatflow/projection.hpp"
#include "flatflow/saddle.hpp"
#include "flatflow/spreading.hpp"
#include "flatflow/surface.hpp"
#include "flatflow/surface_io.hpp"
#include "oracles.hpp"

using namespace flatflow;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Tolerances.
constexpr double kHolonomyTol = 1e-12;
constexpr double kGrowthTol = 0.10;
constexpr double kOctaveSpread = 0.25;
constexpr double kTelescopeTol = 1e-9;
constexpr double kPeriodicityTol = 1e-6;
constexpr double kMajorityGridTol = 1e-4;
constexpr double kIetPointTol = 1e-9;
constexpr double kIetLengthTol = 1e-12;
constexpr double kGapTol = 1e-9;
constexpr double kMonotoneSlack = 0.02;

Outcome torus_saddles() {
  const TranslationSurface torus = make_torus();
  std::size_t mismatches = 0, total = 0;
  for (double T : {1.0, 2.5, 5.0, 10.0, 20.0}) {
    const auto got = enumerate_saddle_connections(torus, T);
    const auto want = oracle::primitive_vectors(T);
    total += want.size();
    if (got.size() != want.size()) {
      mismatches += std::max(got.size(), want.size());
      continue;
    }
    for (std::size_t i = 0; i < got.size(); ++i)
      if (std::abs(got[i].holonomy.x - static_cast<double>(want[i].a)) > kHolonomyTol ||
          std::abs(got[i].holonomy.y - static_cast<double>(want[i].b)) > kHolonomyTol)
        ++mismatches;
  }
  return {mismatches == 0, std::to_string(total) + " lattice vectors, " + std::to_string(mismatches) + " mismatches"};
}

TranslationSurface eighth_triangle() {
  const double t = std::tan(std::numbers::pi / 8.0);
  return normalize_area(unfold_rational_polygon(make_rational_polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, t}})));
}

Outcome quadratic_growth() {
  const double T = 50.0;
  const double got = static_cast<double>(enumerate_saddle_connections(make_torus(), T).size()) / (T * T);
  const double want = static_cast<double>(oracle::primitive_vectors(T).size()) / (T * T);
  const double torus_err = std::abs(got - want) / want;

  const TranslationSurface tri = eighth_triangle();
  const double top = 12.0;
  const auto conns = enumerate_saddle_connections(tri, top);
  double lo = INFINITY, hi = 0.0;
  for (int j = 0; j <= 4; ++j) {
    const double Tj = top / std::exp2(j / 4.0);
    const auto n = std::count_if(conns.begin(), conns.end(), [&](const SaddleConnection& c) { return c.length <= Tj; });
    const double r = static_cast<double>(n) / (Tj * Tj);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double spread = (hi - lo) / lo;
  return {torus_err <= kGrowthTol && spread < kOctaveSpread,
          "torus relative error " + fmt("%.3g", torus_err) + ", triangle octave spread " + fmt("%.3g", spread)};
}

Outcome omega_bound() {
  const TranslationSurface torus = make_torus();
  const DirectionSet set = direction_set(torus, 32.0);
  const double c_star = fit_counting_constant(set).c_star;
  bool ok = true;
  double worst = 0.0;
  for (double n : {2.0, 3.0, 4.0})
    for (double c0 : {16.0, 64.0}) {
      const double m = omega_set(set, n, c0).measure();
      const double bound = 8.0 * c_star / c0;
      ok = ok && m < bound;
      worst = std::max(worst, m / bound);
    }
  return {ok, "C*=" + fmt("%.4f", c_star) + ", worst measure/bound " + fmt("%.3g", worst)};
}

Outcome transport() {
  const TranslationSurface torus = make_torus();
  const auto runs = sample_transports(torus, 50, 2024);
  const double c4 = torus.transport_length_constant();
  std::size_t bad_disjoint = 0, bad_length = 0, exhausted = 0;
  for (const TransportResult& r : runs) {
    if (r.budget_exhausted) ++exhausted;
    if (!(c4 * static_cast<double>(r.u + r.w) > r.saddle_length)) ++bad_length;
    const std::size_t L = r.disjoint_window;
    if (L < 1) ++bad_disjoint;
    std::vector<TransportedInterval> iv = r.intervals;
    std::sort(iv.begin(), iv.end(), [](const auto& p, const auto& q) { return p.j < q.j; });
    for (std::size_t a = 0; a < iv.size(); ++a)
      for (std::size_t b = a + 1; b < iv.size() && static_cast<std::size_t>(iv[b].j - iv[a].j) < L; ++b)
        if (std::max(iv[a].lo, iv[b].lo) < std::min(iv[a].hi, iv[b].hi)) ++bad_disjoint;
  }
  return {bad_disjoint == 0 && bad_length == 0 && exhausted == 0,
          std::to_string(runs.size()) + " runs, " + std::to_string(bad_disjoint) + " overlaps, " +
              std::to_string(bad_length) + " length violations, " + std::to_string(exhausted) + " capped"};
}

Outcome balance_identities() {
  std::mt19937_64 rng(5);
  std::size_t failures = 0, bound_checks = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t M = 10 + rng() % 991;
    const int z1 = 1 + static_cast<int>(rng() % 2);
    const int p = 1 + static_cast<int>(rng() % 5);
    const PartitionParams params{z1, p};
    const auto x = oracle::random_points(rng, M, trial % 3 == 0);
    const TelescopingReport t = telescoping_check(x, params);
    if (!(t.s.back() == 0.0) || !t.passed(kTelescopeTol)) ++failures;
    worst = std::max({worst, t.identity_error, t.closed_form_error});
    for (int h = 0; h <= p; ++h) {
      const double d = oracle::direct_s_h(x, 1 << z1, p, h);
      if (std::abs(d - t.s[static_cast<std::size_t>(h)]) > kTelescopeTol * std::max(1.0, d)) ++failures;
    }
    const double M1 = static_cast<double>(params.cells(p));
    if (M1 > 1.0 && M1 <= static_cast<double>(M)) {
      const double A = std::max(2.0, crowding_constant(x, M1));
      if (anti_crowded(x, A, M1).anti_crowded) {
        ++bound_checks;
        if (!(t.s.front() <= A * A * M * M / M1)) ++failures;
      }
    }
  }
  return {failures == 0, std::to_string(failures) + " failures, worst relative error " + fmt("%.2g", worst) + ", " +
                             std::to_string(bound_checks) + " anti-crowded bound checks"};
}

Outcome shifted_integrals() {
  std::mt19937_64 rng(6);
  std::size_t failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t M = 50 + rng() % 200;
    const int z1 = 1 + trial % 2;
    const int p = 2 + trial % 2;
    const PartitionParams params{z1, p};
    const auto x = oracle::random_points(rng, M, trial % 2 == 1);
    const std::uint64_t n = std::uint64_t{1} << 14;
    const double full = integral_s0(x, params, n);
    for (int h = 1; h <= p; ++h) {
      const double zh = static_cast<double>(params.cells(h));
      const double part = zh * integral_s0(x, params, n / params.cells(h), 1.0 / zh);
      const double rel = std::abs(full - part) / std::max(full, 1e-300);
      worst = std::max(worst, rel);
      if (rel > kPeriodicityTol) ++failures;
    }
    const double M1 = static_cast<double>(params.cells(p));
    if (M1 <= static_cast<double>(M)) {
      const double A = std::max(2.0, crowding_constant(x, M1));
      if (anti_crowded(x, A, M1).anti_crowded) {
        const double bound = A * A * static_cast<double>(M * M) / M1;
        if (!(exact_integral_s0(x, params) <= bound) || !(full <= bound)) ++failures;
      }
    }
  }
  return {failures == 0, "worst periodicity error " + fmt("%.2g", worst) + ", " + std::to_string(failures) + " failures"};
}

Outcome anti_crowding_oracle() {
  std::mt19937_64 rng(7);
  std::size_t disagreements = 0, violated = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t M = 3 + rng() % 298;
    const auto x = oracle::random_points(rng, M, trial % 2 == 0);
    const double M1 = 1.5 + std::uniform_real_distribution<double>(0.0, static_cast<double>(M) - 1.5)(rng);
    const double A = 2.0 + std::uniform_real_distribution<double>(0.0, 4.0)(rng);
    const AntiCrowding got = anti_crowded(x, A, M1);
    const bool want = oracle::naive_anti_crowded(x, A, M1);
    if (got.anti_crowded != want) ++disagreements;
    if (!got.anti_crowded) {
      ++violated;
      std::vector<double> s(x);
      std::sort(s.begin(), s.end());
      const double len = got.hi - got.lo;
      const std::size_t k = oracle::count_in(s, got.lo, got.hi);
      if (!(len >= 1.0 / M1 - 1e-15 && got.lo >= 0.0 && got.hi <= 1.0 &&
            static_cast<double>(k) > A * static_cast<double>(M) * len))
        ++disagreements;
    }
  }
  return {disagreements == 0,
          "200 instances, " + std::to_string(violated) + " crowded, " + std::to_string(disagreements) + " disagreements"};
}

Outcome majority_bound() {
  std::mt19937_64 rng(8);
  std::size_t failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 10);
    std::vector<IntervalUnion> sets;
    double gap = 0.0;
    for (int i = 0; i < k; ++i) {
      sets.push_back(oracle::random_union(rng, 1 + static_cast<int>(rng() % 6), 0.15).complement());
      gap = std::max(gap, kTwoPi - sets.back().measure());
    }
    const double eta = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const IntervalUnion got = majority_set(sets, eta);
    if (!(got.measure() >= kTwoPi - gap - kTwoPi * eta)) ++failures;
    const double grid = oracle::grid_majority_measure(sets, ceil_count(eta * k), 1000000);
    worst = std::max(worst, std::abs(grid - got.measure()));
    if (std::abs(grid - got.measure()) > kMajorityGridTol) ++failures;
  }
  return {failures == 0, "worst grid deviation " + fmt("%.2g", worst) + ", " + std::to_string(failures) + " failures"};
}

std::vector<double> admissible_torus_directions(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, std::numbers::pi / 2 - 0.05);
  std::vector<double> out(n);
  for (double& t : out) t = u(rng);
  return out;
}

Outcome iet_orbits() {
  const TranslationSurface torus = make_torus();
  double worst_point = 0.0, worst_length = 0.0;
  for (double theta : admissible_torus_directions(20, 9)) {
    const IntervalExchange iet = induced_iet(torus, theta);
    double total = 0.0;
    for (const IetBranch& b : iet.branches) total += b.length;
    worst_length = std::max(worst_length, std::abs(total - 1.0));
    const HittingSet hs = hitting_set(torus, {0, {0.318309886183791, 0.367879441171442}, theta}, 1000);
    double x = hs.points.front();
    for (std::size_t i = 1; i < hs.points.size(); ++i) {
      x = iet.apply(x);
      double d = std::abs(x - hs.points[i]);
      d = std::min(d, 1.0 - d);
      worst_point = std::max(worst_point, d);
    }
  }
  return {worst_point <= kIetPointTol && worst_length <= kIetLengthTol,
          "worst point error " + fmt("%.2g", worst_point) + ", worst length error " + fmt("%.2g", worst_length)};
}

Outcome three_distance() {
  const TranslationSurface torus = make_torus();
  std::size_t worst = 0;
  for (double theta : admissible_torus_directions(20, 10)) {
    const HittingSet hs = hitting_set(torus, {0, {0.5, 0.25}, theta}, 1000);
    std::vector<double> x = hs.points;
    std::sort(x.begin(), x.end());
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) gaps.push_back(x[i + 1] - x[i]);
    gaps.push_back(1.0 - x.back() + x.front());
    std::sort(gaps.begin(), gaps.end());
    std::size_t distinct = 1;
    double rep = gaps.front();
    for (double g : gaps)
      if (g - rep > kGapTol) {
        ++distinct;
        rep = g;
      }
    worst = std::max(worst, distinct);
  }
  return {worst <= 3, "at most " + std::to_string(worst) + " distinct gaps"};
}

Outcome spreading() {
  const TranslationSurface torus = make_torus();
  SpreadOptions o;
  o.N = 8;
  o.T = 1000.0;
  o.directions = 256;
  const SpreadReport r = spread_experiment(torus, o);
  std::size_t disagreements = 0, compared = 0;
  for (const DirectionOutcome& d : r.directions)
    for (const SpreadRun& run : d.runs) {
      if (run.status != SpreadStatus::Ok) continue;
      const auto occ = oracle::torus_line_occupancy(run.start.position, d.theta, o.T, o.N);
      for (std::size_t c = 0; c < r.cells.size(); ++c) {
        const GridCell& g = r.cells[c];
        const double v = occ[static_cast<std::size_t>(g.ix * o.N + g.iy)];
        const double e = r.expected[c];
        const bool want = (1.0 - o.epsilon) * e < v && v < (1.0 + o.epsilon) * e;
        if (want != static_cast<bool>(run.cell_pass[c])) ++disagreements;
        ++compared;
      }
    }
  std::vector<double> fractions;
  for (double T : {1e2, 1e3, 1e4}) {
    SpreadOptions q = o;
    q.T = T;
    fractions.push_back(T == 1e3 ? r.pass_fraction : spread_experiment(torus, q).pass_fraction);
  }
  int inversions = 0;
  bool small = true;
  for (std::size_t i = 0; i + 1 < fractions.size(); ++i)
    if (fractions[i + 1] < fractions[i]) {
      ++inversions;
      small = small && fractions[i] - fractions[i + 1] <= kMonotoneSlack;
    }
  return {disagreements == 0 && compared > 0 && inversions <= 1 && small,
          std::to_string(compared) + " cell verdicts, " + std::to_string(disagreements) + " disagreements, pass fractions " +
              fmt("%.3f", fractions[0]) + " " + fmt("%.3f", fractions[1]) + " " + fmt("%.3f", fractions[2])};
}

Outcome constants_ledger() {
  const TranslationSurface torus = make_torus();
  EmpiricalInputs in;
  in.c_star = fit_counting_constant(direction_set(torus, 32.0)).c_star;
  const auto tc = empirical_transport_constants(sample_transports(torus, 50, 11), minimal_c0(in.c_star, 0.1));
  in.c5 = tc.c5;
  in.c6 = tc.c6;
  std::string failed;
  for (double eps : {0.5, 0.25, 0.1}) {
    const SurfaceConstants k = derive_constants(torus, in, eps);
    const ParameterChoice p = choose_parameters(k, eps, 16.0);
    if (p.eta != eps / 2.0) failed += " eta@" + fmt("%g", eps);
    for (const InequalityCheck& c : p.checks)
      if (!c.holds) failed += " " + c.name + "@" + fmt("%g", eps);
  }
  return {failed.empty(), failed.empty() ? "every inequality holds, eta = eps/2" : "failed:" + failed};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "flatflow_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string surf = (dir / "torus.json").string();
  write_surface(surf, make_torus());
  auto run_all = [&](const std::string& tag, const std::string& threads) {
    const std::string d = (dir / tag).string();
    fs::create_directories(d);
    const std::vector<std::vector<std::string>> cmds = {
        {"--threads", threads, "spread", "--surface", surf, "--dirs", "32", "--T", "200", "--seed", "3", "--out",
         d + "/spread.json", "--csv", d + "/spread.csv"},
        {"--threads", threads, "saddle", "--surface", surf, "--T", "8", "--out", d + "/saddle.csv"},
        {"--threads", threads, "constants", "--surface", surf, "--eps", "0.25", "--T", "16", "--runs", "10", "--seed", "3",
         "--out", d + "/constants.json"},
        {"--threads", threads, "balance", "--surface", surf, "--M", "500", "--p", "3", "--out", d + "/balance.json"}};
    std::ostringstream out, err;
    for (const auto& c : cmds)
      if (cli::run(c, out, err) != 0) return false;
    return true;
  };
  if (!run_all("a", "1") || !run_all("b", "1") || !run_all("c", "3")) return {false, "a command failed"};
  std::size_t files = 0, differing = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    const std::string name = e.path().filename().string();
    const std::string a = read_text_file(e.path());
    for (const char* other : {"b", "c"})
      if (read_text_file(dir / other / name) != a) ++differing;
    ++files;
  }
  fs::remove_all(dir);
  return {files == 5 && differing == 0,
          std::to_string(files) + " artifacts, " + std::to_string(differing) + " differ across reruns and thread counts"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "torus saddle connections equal primitive lattice vectors", 10, torus_saddles},
      {2, "quadratic growth of saddle connection counts", 60, quadratic_growth},
      {3, "bad direction measure below 8 C*/c0", 30, omega_bound},
      {4, "transported intervals disjoint and transport length bound", 60, transport},
      {5, "balance statistics identities", 30, balance_identities},
      {6, "shifted statistic periodicity and integral bound", 60, shifted_integrals},
      {7, "anti-crowding window scan equals naive check", 60, anti_crowding_oracle},
      {8, "majority set bound and grid oracle", 60, majority_bound},
      {9, "interval exchange orbit reproduces hitting set", 60, iet_orbits},
      {10, "three distance property of torus hitting sets", 60, three_distance},
      {11, "spreading harness equals closed-form torus occupancy", 300, spreading},
      {12, "constants ledger inequalities", 60, constants_ledger},
      {13, "byte-identical artifacts for identical seeds", 60, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.time_limit;
    if (!pass) ++failed;
    std::printf("[%s] %2d %s: %s (%.2f s, limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.time_limit);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
