#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flatflow/balance.hpp"
#include "flatflow/error.hpp"
#include "flatflow/surface.hpp"
#include "oracles.hpp"

using namespace flatflow;

namespace {

std::vector<double> grid_points(std::size_t m) {
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = static_cast<double>(i) / static_cast<double>(m);
  return x;
}

}  // namespace

TEST(Balance, UniformGridCountsAreEqual) {
  const PartitionParams params{2, 3};
  const auto counts = cell_counts(grid_points(128), params, 3);
  ASSERT_EQ(counts.size(), 64u);
  for (auto c : counts) EXPECT_EQ(c, 2u);
  EXPECT_EQ(s_h_statistic(grid_points(128), params, 0), 0.0);
}

TEST(Balance, CountsMatchPerPointFloorIndex) {
  std::mt19937_64 rng(2);
  const auto x = oracle::random_points(rng, 500, true);
  const PartitionParams params{2, 4};
  for (int h = 0; h <= 4; ++h) {
    const auto counts = cell_counts(x, params, h);
    std::vector<std::uint64_t> want(counts.size(), 0);
    for (double v : x) ++want[static_cast<std::size_t>(std::floor(v * static_cast<double>(params.cells(h))))];
    EXPECT_EQ(counts, want);
  }
}

TEST(Balance, ParentCountsSumChildren) {
  std::mt19937_64 rng(3);
  const auto x = oracle::random_points(rng, 300, false);
  const PartitionParams params{1, 5};
  for (int h = 0; h < 5; ++h) {
    const auto parent = cell_counts(x, params, h), child = cell_counts(x, params, h + 1);
    for (std::size_t i = 0; i < parent.size(); ++i) EXPECT_EQ(parent[i], child[2 * i] + child[2 * i + 1]);
  }
}

TEST(Balance, StatisticMatchesDirectSum) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = oracle::random_points(rng, 200 + 50 * trial, trial % 2 == 0);
    for (int h = 0; h <= 3; ++h) EXPECT_NEAR(s_h_statistic(x, {1, 3}, h), oracle::direct_s_h(x, 2, 3, h), 1e-9);
  }
}

TEST(Balance, TelescopingIsMonotoneAndExact) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracle::random_points(rng, 1000, trial % 2 == 0);
    const TelescopingReport r = telescoping_check(x, {2, 4});
    EXPECT_TRUE(r.passed());
    for (std::size_t h = 0; h + 1 < r.s.size(); ++h) EXPECT_GE(r.s[h], r.s[h + 1]);
    EXPECT_EQ(r.s.back(), 0.0);
  }
}

TEST(Balance, AllPointsInOneChildIsUnbalanced) {
  const std::vector<double> x(40, 0.1);
  const int root[] = {0};
  const CellBalance b = is_balanced(x, 0.5, {2, 2}, std::span<const int>(root, 0));
  EXPECT_FALSE(b.balanced);
  EXPECT_EQ(b.child_counts[0], 40u);
  const CellBalance g = is_balanced(grid_points(64), 0.1, {2, 2}, std::span<const int>(root, 1));
  EXPECT_TRUE(g.balanced);
  EXPECT_EQ(g.count, 16u);
}

TEST(Balance, BalanceVerdictMatchesDirectInequality) {
  std::mt19937_64 rng(6);
  const auto x = oracle::random_points(rng, 400, true);
  const PartitionParams params{1, 3};
  const double delta = 0.3;
  for (int a = 0; a < 2; ++a) {
    const int path[] = {a};
    const CellBalance b = is_balanced(x, delta, params, path);
    const double lo = a * 0.5, hi = lo + 0.5;
    std::size_t parent = 0, c0 = 0;
    for (double v : x)
      if (lo <= v && v < hi) {
        ++parent;
        if (v < lo + 0.25) ++c0;
      }
    const double allowance = delta * 400.0 / 4.0;
    const double e = parent / 2.0;
    const bool want = std::abs(c0 - e) < allowance && std::abs((parent - c0) - e) < allowance;
    EXPECT_EQ(b.balanced, want);
  }
}

TEST(Balance, AntiCrowdingAgreesWithNaiveCheck) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const auto x = oracle::random_points(rng, 20 + 4 * trial, trial % 2 == 0);
    const double M1 = 2.0 + trial % 17, A = 2.0 + (trial % 5) * 0.7;
    EXPECT_EQ(anti_crowded(x, A, M1).anti_crowded, oracle::naive_anti_crowded(x, A, M1));
  }
}

TEST(Balance, CoincidentPointsAreCrowded) {
  const std::vector<double> x(50, 0.3);
  const AntiCrowding r = anti_crowded(x, 2.0, 50.0);
  EXPECT_FALSE(r.anti_crowded);
  EXPECT_NEAR(r.hi - r.lo, 1.0 / 50.0, 1e-15);
  EXPECT_TRUE(anti_crowded(grid_points(50), 2.0, 50.0).anti_crowded);
}

TEST(Balance, CrowdingConstantIsTheThreshold) {
  std::mt19937_64 rng(8);
  const auto x = oracle::random_points(rng, 200, true);
  const double A = std::max(2.0, crowding_constant(x, 20.0));
  EXPECT_TRUE(anti_crowded(x, A, 20.0).anti_crowded);
  if (A > 2.0) EXPECT_FALSE(anti_crowded(x, A * (1.0 - 1e-9), 20.0).anti_crowded);
}

TEST(Balance, ShiftByZeroIsUnshifted) {
  std::mt19937_64 rng(9);
  const auto x = oracle::random_points(rng, 300, false);
  EXPECT_DOUBLE_EQ(shifted_s0(x, 0.0, {2, 3}), s_h_statistic(x, {2, 3}, 0));
}

TEST(Balance, QuadratureConvergesToExactIntegral) {
  std::mt19937_64 rng(10);
  const auto x = oracle::random_points(rng, 100, true);
  const PartitionParams params{1, 3};
  const double exact = exact_integral_s0(x, params);
  EXPECT_NEAR(integral_s0(x, params, 1 << 16), exact, 1e-3 * exact);
}

TEST(Balance, MajorityOfIdenticalFullSetsIsFull) {
  const std::vector<IntervalUnion> sets(4, IntervalUnion::full());
  EXPECT_DOUBLE_EQ(majority_set(sets, 0.5).measure(), kTwoPi);
}

TEST(Balance, SingleSetMajorityIsItself) {
  const IntervalUnion u = IntervalUnion::from_arcs({{0.5, 2.0}, {3.0, 5.5}});
  EXPECT_EQ(majority_set({u}, 0.7).intervals(), u.intervals());
}

TEST(Balance, MajorityMeasureIsMonotoneInEta) {
  std::mt19937_64 rng(11);
  std::vector<IntervalUnion> sets;
  for (int i = 0; i < 8; ++i) sets.push_back(oracle::random_union(rng, 4, 0.1).complement());
  double prev = kTwoPi + 1.0;
  for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double m = majority_set(sets, eta).measure();
    EXPECT_LE(m, prev + 1e-15);
    prev = m;
    EXPECT_NEAR(m, oracle::grid_majority_measure(sets, ceil_count(eta * 8), 200000), 1e-3);
  }
}

TEST(Balance, CeilCountAbsorbsRoundoff) {
  EXPECT_EQ(ceil_count(3.0000000000001), 3u);
  EXPECT_EQ(ceil_count(3.1), 4u);
  EXPECT_EQ(ceil_count(0.1 * 3 * 10), 3u);
}

TEST(Balance, GoodDirectionsOnTorus) {
  const GoodDirections g = good_directions(make_torus(), 4.0, 0.5);
  EXPECT_DOUBLE_EQ(g.eta, 0.25);
  EXPECT_TRUE(g.meets_target);
  EXPECT_GE(g.set.measure(), (1.0 - 0.5) * kTwoPi);
  EXPECT_NEAR(oracle::grid_majority_measure({g.set}, 1, 10000000), g.set.measure(), 1e-4);
}

TEST(Balance, ReportJsonHasTelescoping) {
  std::mt19937_64 rng(12);
  const auto x = oracle::random_points(rng, 256, false);
  const std::string j = balance_report_to_json(balance_report(x, {2, 2}, 0.5, 4.0, 16.0));
  EXPECT_NE(j.find("\"telescoping\""), std::string::npos);
  EXPECT_NE(j.find("\"anti_crowding\""), std::string::npos);
}

TEST(Balance, InvalidParametersThrow) {
  const std::vector<double> x{0.5};
  EXPECT_THROW(cell_counts(x, {0, 2}, 1), Error);
  EXPECT_THROW(validate_points(std::vector<double>{1.0}), Error);
  EXPECT_THROW(anti_crowded(x, 1.0, 1.0), Error);
}
