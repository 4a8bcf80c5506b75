#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flatflow/error.hpp"
#include "flatflow/saddle.hpp"
#include "flatflow/surface.hpp"
#include "oracles.hpp"

using namespace flatflow;

TEST(Saddle, TorusMatchesPrimitiveLattice) {
  for (double T : {1.0, 3.0, 7.5}) {
    const auto got = enumerate_saddle_connections(make_torus(), T);
    const auto want = oracle::primitive_vectors(T);
    ASSERT_EQ(got.size(), want.size()) << "T=" << T;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got[i].holonomy.x, static_cast<double>(want[i].a), 1e-12);
      EXPECT_NEAR(got[i].holonomy.y, static_cast<double>(want[i].b), 1e-12);
    }
  }
}

TEST(Saddle, RectangularTorusScalesLattice) {
  const auto got = enumerate_saddle_connections(make_torus(2.0, 1.0), 4.0);
  std::size_t want = 0;
  for (const auto& v : oracle::primitive_vectors(4.0))
    if (std::hypot(2.0 * v.a, static_cast<double>(v.b)) <= 4.0) ++want;
  EXPECT_EQ(got.size(), want);
}

TEST(Saddle, ConnectionsComeInOppositePairs) {
  const TranslationSurface s = unfold_rational_polygon(
      make_rational_polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, std::tan(std::numbers::pi / 8.0)}}));
  const auto conns = enumerate_saddle_connections(s, 3.0);
  ASSERT_FALSE(conns.empty());
  for (const auto& c : conns) {
    const auto it = std::find_if(conns.begin(), conns.end(), [&](const SaddleConnection& d) {
      return std::abs(d.holonomy.x + c.holonomy.x) < 1e-9 && std::abs(d.holonomy.y + c.holonomy.y) < 1e-9 &&
             d.start_singularity == c.end_singularity;
    });
    EXPECT_NE(it, conns.end());
  }
}

TEST(Saddle, BudgetExhaustionIsReported) {
  try {
    enumerate_saddle_connections(make_torus(), 50.0, {10});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExhausted);
  }
}

TEST(Saddle, TorusDirectionsArePeriodic) {
  const DirectionSet set = direction_set(make_torus(), 5.0);
  EXPECT_EQ(set.entries.size(), oracle::primitive_vectors(5.0).size());
  for (const auto& e : set.entries) {
    EXPECT_TRUE(e.periodic());
    EXPECT_EQ(e.multiplicity, 1u);
  }
  EXPECT_EQ(set.periodic_count(5.0), set.saddle_count(5.0));
}

TEST(Saddle, OmegaIsUnionOfArcsAroundAnnulusDirections) {
  const DirectionSet set = direction_set(make_torus(), 16.0);
  const IntervalUnion u = omega_set(set, 3.0, 16.0);
  for (int m = 1; m <= 3; ++m) {
    const double T = std::exp2(m);
    for (double phi : set.saddle_directions(T / 2.0, T)) EXPECT_TRUE(u.contains(phi));
  }
  EXPECT_LT(u.measure(), kTwoPi);
}

TEST(Saddle, CountingFitIsNearLatticeDensity) {
  const CountingFit fit = fit_counting_constant(direction_set(make_torus(), 32.0));
  EXPECT_NEAR(fit.c_star, 6.0 / std::numbers::pi, 0.1);
}

TEST(Saddle, CsvRowsMatchConnections) {
  const auto conns = enumerate_saddle_connections(make_torus(), 2.0);
  const std::string csv = saddles_to_csv(conns);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), conns.size() + 1);
}
