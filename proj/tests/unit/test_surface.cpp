#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flatflow/error.hpp"
#include "flatflow/surface.hpp"
#include "flatflow/surface_io.hpp"

using namespace flatflow;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

RationalPolygon triangle(double angle) {
  return make_rational_polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, std::tan(angle)}});
}

}  // namespace

TEST(Surface, TorusInvariants) {
  const TranslationSurface t = make_torus(2.0, 3.0);
  EXPECT_EQ(t.face_count(), 1);
  EXPECT_EQ(t.genus(), 1);
  EXPECT_DOUBLE_EQ(t.area(), 6.0);
  ASSERT_EQ(t.singularities().size(), 1u);
  EXPECT_NEAR(t.singularities()[0].cone_angle, kTwoPi, 1e-12);
  EXPECT_EQ(t.edges().size(), 2u);
  EXPECT_DOUBLE_EQ(t.total_edge_length(), 5.0);
}

TEST(Surface, TranslationsCarryEdgesToPartners) {
  const TranslationSurface t = make_torus();
  for (const EdgePairing& p : t.pairings()) {
    const Vec2 a = t.edge_start(p.first) + t.translation(p.first);
    const Vec2 b = t.edge_start(p.second) + t.edge_vector(p.second);
    EXPECT_NEAR(a.x, b.x, 1e-15);
    EXPECT_NEAR(a.y, b.y, 1e-15);
  }
}

TEST(Surface, RejectsUnpairedAndMismatchedEdges) {
  std::vector<Polygon> faces{{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}};
  const std::vector<EdgePairing> one{{{0, 0}, {0, 2}}};
  EXPECT_EQ(code_of([&] { build_surface(faces, one); }), ErrorCode::UnpairedEdge);
  std::vector<Polygon> rect{{{{0, 0}, {2, 0}, {2, 1}, {0, 1}}}};
  const std::vector<EdgePairing> bad{{{0, 0}, {0, 1}}, {{0, 2}, {0, 3}}};
  EXPECT_EQ(code_of([&] { build_surface(rect, bad); }), ErrorCode::LengthMismatch);
}

TEST(Surface, RejectsParallelSameOrientation) {
  std::vector<Polygon> faces{{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}, {{{2, 0}, {3, 0}, {3, 1}, {2, 1}}}};
  const std::vector<EdgePairing> bad{{{0, 0}, {1, 0}}, {{0, 1}, {0, 3}}, {{0, 2}, {1, 2}}, {{1, 1}, {1, 3}}};
  EXPECT_EQ(code_of([&] { build_surface(faces, bad); }), ErrorCode::NotAntiparallel);
}

TEST(Surface, EquilateralTriangleUnfoldsToGenusOne) {
  const auto poly = make_rational_polygon({{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}});
  const TranslationSurface s = unfold_rational_polygon(poly);
  EXPECT_EQ(s.face_count(), 6);
  EXPECT_EQ(s.genus(), 1);
}

TEST(Surface, EighthTriangleUnfoldsToGenusTwo) {
  const TranslationSurface s = unfold_rational_polygon(triangle(std::numbers::pi / 8.0));
  EXPECT_EQ(s.face_count(), 16);
  EXPECT_EQ(s.genus(), 2);
  double excess = 0.0;
  for (const Singularity& g : s.singularities()) excess += g.cone_angle / kTwoPi - 1.0;
  EXPECT_NEAR(excess, 2.0 * s.genus() - 2.0, 1e-9);
}

TEST(Surface, IrrationalAngleIsRejected) {
  EXPECT_EQ(code_of([] { make_rational_polygon({{0, 0}, {1, 0}, {0.3, 0.7071}}, 20); }), ErrorCode::IrrationalAngle);
}

TEST(Surface, NormalizeAreaAndScale) {
  const TranslationSurface s = normalize_area(make_torus(2.0, 5.0));
  EXPECT_NEAR(s.area(), 1.0, 1e-14);
  EXPECT_NEAR(scale_surface(s, 3.0).area(), 9.0, 1e-12);
}

TEST(Surface, TriangulationPreservesAreaAndGenus) {
  const TranslationSurface s = make_torus();
  const Triangulation t = triangulate(s);
  EXPECT_EQ(t.surface.face_count(), 2);
  EXPECT_NEAR(t.surface.area(), s.area(), 1e-14);
  EXPECT_EQ(t.surface.genus(), s.genus());
}

TEST(SurfaceIo, JsonRoundTripKeepsFingerprint) {
  const TranslationSurface s = unfold_rational_polygon(triangle(std::numbers::pi / 8.0));
  const TranslationSurface r = surface_from_json(surface_to_json(s));
  EXPECT_EQ(r.fingerprint(), s.fingerprint());
  EXPECT_EQ(surface_to_json(r), surface_to_json(s));
}

TEST(SurfaceIo, MalformedJsonIsParseError) {
  EXPECT_EQ(code_of([] { surface_from_json("{\"faces\": 3}"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { surface_from_json("not json"); }), ErrorCode::Parse);
}

TEST(SurfaceIo, MissingFileIsIoError) {
  EXPECT_EQ(code_of([] { read_surface("/nonexistent/flatflow.json"); }), ErrorCode::Io);
}
