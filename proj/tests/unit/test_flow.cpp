#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flatflow/error.hpp"
#include "flatflow/flow.hpp"
#include "flatflow/surface.hpp"
#include "oracles.hpp"

using namespace flatflow;

TEST(Flow, TorusHitTimesMatchGridCrossings) {
  const TranslationSurface t = make_torus();
  const double theta = 0.4;
  const DirectedPoint start{0, {0.3, 0.2}, theta};
  const HitSequence seq = trace(t, start, {10.0});
  // Crossings of the lines x = k and y = k along the developed line.
  std::vector<double> want;
  for (int k = 1; k < 20; ++k) {
    const double tx = (k - 0.3) / std::cos(theta), ty = (k - 0.2) / std::sin(theta);
    if (tx < 10.0) want.push_back(tx);
    if (ty < 10.0) want.push_back(ty);
  }
  std::sort(want.begin(), want.end());
  ASSERT_EQ(seq.hits.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(seq.hits[i].t, want[i], 1e-12);
  EXPECT_NEAR(seq.end_time, 10.0, 1e-12);
}

TEST(Flow, DevelopedPointsLieOnTheLine) {
  const TranslationSurface t = make_torus();
  const DirectedPoint start{0, {0.5, 0.5}, 1.1};
  const Vec2 u = unit_vector(1.1);
  for (const HitRecord& h : trace(t, start, {1e9, 50}).hits) {
    const Vec2 expected = start.position + h.t * u;
    EXPECT_NEAR(h.dev_point.x, expected.x, 1e-11);
    EXPECT_NEAR(h.dev_point.y, expected.y, 1e-11);
  }
}

TEST(Flow, SegmentsTileTheTimeInterval) {
  const TranslationSurface s = unfold_rational_polygon(
      make_rational_polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, std::tan(std::numbers::pi / 8.0)}}));
  double t = 0.0, length = 0.0;
  for_each_segment(s, {0, {0.6, 0.1}, 0.77}, 25.0, [&](const FaceSegment& seg) {
    EXPECT_NEAR(seg.t0, t, 1e-9);
    t = seg.t1;
    length += norm(seg.b - seg.a);
  });
  EXPECT_NEAR(t, 25.0, 1e-9);
  EXPECT_NEAR(length, 25.0, 1e-8);
}

TEST(Flow, VertexHitIsReported) {
  const TranslationSurface t = make_torus();
  const double theta = std::atan2(0.5, 0.5);
  try {
    trace(t, {0, {0.5, 0.5}, theta}, {10.0});
    FAIL() << "expected a vertex hit";
  } catch (const VertexHitError& e) {
    EXPECT_NEAR(e.time(), std::sqrt(0.5), 1e-9);
    EXPECT_EQ(e.singularity(), 0);
  }
}

TEST(Flow, OccupancyOfWholeFaceIsTotalTime) {
  const TranslationSurface t = make_torus();
  const std::vector<Cell> all{{0, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}}};
  EXPECT_NEAR(occupancy(t, {0, {0.1, 0.2}, 0.3}, 17.0, all), 17.0, 1e-10);
}

TEST(Flow, OccupancyMatchesGridCrossingOracle) {
  const TranslationSurface t = make_torus();
  const Vec2 p{0.21, 0.63};
  const double theta = 2.2;
  const auto want = oracle::torus_line_occupancy(p, theta, 40.0, 4);
  for (int ix = 0; ix < 4; ++ix)
    for (int iy = 0; iy < 4; ++iy) {
      const double a = ix / 4.0, b = iy / 4.0, c = (ix + 1) / 4.0, d = (iy + 1) / 4.0;
      const std::vector<Cell> cell{{0, {{a, b}, {c, b}, {c, d}, {a, d}}}};
      EXPECT_NEAR(occupancy(t, {0, p, theta}, 40.0, cell), want[static_cast<std::size_t>(ix * 4 + iy)], 1e-9);
    }
}

TEST(Flow, DevelopmentChainsSharedEdges) {
  const TranslationSurface t = make_torus();
  const Development d = develop(t, {0, {0.3, 0.4}, 0.9}, 12);
  ASSERT_EQ(d.copies.size(), 13u);
  ASSERT_EQ(d.hits.size(), 12u);
  for (std::size_t i = 0; i < d.hits.size(); ++i) {
    const Vec2 off = d.copies[i + 1].offset - d.copies[i].offset;
    EXPECT_NEAR(std::abs(off.x) + std::abs(off.y), 1.0, 1e-12);
  }
}

TEST(Flow, CsvHasHeaderAndOneRowPerHit) {
  const HitSequence seq = trace(make_torus(), {0, {0.3, 0.2}, 0.4}, {1e9, 7});
  const std::string csv = hits_to_csv(seq);
  EXPECT_EQ(csv.rfind("t,face,edge,s,dev_x,dev_y\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
}
