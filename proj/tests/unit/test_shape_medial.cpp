#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "collage/collage.hpp"
#include "oracles.hpp"

using namespace collage;

namespace {

const Ring kRect42{{0, 0}, {4, 0}, {4, 2}, {0, 2}};

const ShapeModel& rect42() {
  static const ShapeModel s = build_shape_model({kRect42}, 512);
  return s;
}

std::vector<std::pair<Point2, Point2>> graph_segments(const MedialAxisGraph& g) {
  std::vector<std::pair<Point2, Point2>> out;
  for (const auto& e : g.edges) out.push_back({g.nodes[e.a].p, g.nodes[e.b].p});
  return out;
}

}  // namespace

TEST(ShapeModel, RectangleMaskAndPerimeter) {
  const auto& s = rect42();
  EXPECT_EQ(s.mask.width(), 512);
  EXPECT_EQ(s.mask.height(), 256);
  ASSERT_EQ(s.rings.size(), 1u);
  EXPECT_NEAR(s.rings[0].length / s.scale, 12.0, 1e-9);
}

TEST(ShapeModel, SquareWithHole) {
  const Ring outer{{0, 0}, {4, 0}, {4, 4}, {0, 4}}, hole{{1, 1}, {1, 3}, {3, 3}, {3, 1}};
  const auto s = build_shape_model({outer, hole}, 256);
  EXPECT_EQ(s.rings.size(), 2u);
  EXPECT_EQ(s.mask(128, 128), 0);
  EXPECT_EQ(s.mask(20, 20), 1);
}

TEST(ShapeModel, SelfIntersectingThrows) {
  const Ring bow{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
  EXPECT_THROW(build_shape_model({bow}, 256), Error);
}

TEST(ShapeModel, MaskRoundTrip) {
  const auto src = build_shape_model(corpus_shape("heart").rings, 300);
  Raster<std::uint8_t> gray(src.mask.width() + 20, src.mask.height() + 20, 0);
  for (int y = 0; y < src.mask.height(); ++y)
    for (int x = 0; x < src.mask.width(); ++x) gray(x + 10, y + 10) = src.mask(x, y) ? 255 : 0;
  const auto path = (std::filesystem::temp_directory_path() / "collage_mask_roundtrip.png").string();
  write_png(path, gray);
  const auto back = read_gray(path);
  ASSERT_EQ(back.width(), gray.width());
  ASSERT_EQ(back.height(), gray.height());
  EXPECT_TRUE(std::equal(gray.data().begin(), gray.data().end(), back.data().begin()));
  std::filesystem::remove(path);
}

TEST(DistanceMap, SquareCenterAndBoundary) {
  const auto s = build_shape_model({{{0, 0}, {2, 0}, {2, 2}, {0, 2}}}, 256);
  const auto d = distance_map(s);
  // Pixel centers at 127.5 / 128.5 are half a cell off the true center.
  EXPECT_NEAR(d(128, 128) / s.scale, 1.0, 1.0 / s.scale);
  EXPECT_NEAR(d(0, 100), 0.0, 1.0);
}

TEST(DistanceMap, MatchesBruteForceScan) {
  const auto s = build_shape_model(corpus_shape("l_shape").rings, 256);
  const auto d = distance_map(s);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const int x = static_cast<int>(rng() % s.mask.width()), y = static_cast<int>(rng() % s.mask.height());
    const Point2 p{x + 0.5, y + 0.5};
    double best = 1e300;
    for (const auto& smp : s.samples) best = std::min(best, distance(p, smp.p));
    EXPECT_NEAR(d(x, y), best, 1.0);
  }
}

TEST(Projections, SquareCenterHasFour) {
  const auto s = build_shape_model({{{0, 0}, {2, 0}, {2, 2}, {0, 2}}}, 256);
  EXPECT_EQ(projections(s, {128, 128}).size(), 4u);
}

TEST(Projections, RectangleMedialPointHasTwo) {
  const auto& s = rect42();
  const auto pr = projections(s, s.to_canvas({2, 1}));
  ASSERT_EQ(pr.size(), 2u);
  // Brute-force scan: the two closest boundary points are (2,0) and (2,2).
  std::vector<Point2> got{s.to_shape(pr[0].p), s.to_shape(pr[1].p)};
  std::sort(got.begin(), got.end(), [](Point2 a, Point2 b) { return a.y < b.y; });
  EXPECT_NEAR(got[0].x, 2.0, 2.0 / s.scale);
  EXPECT_NEAR(got[0].y, 0.0, 2.0 / s.scale);
  EXPECT_NEAR(got[1].x, 2.0, 2.0 / s.scale);
  EXPECT_NEAR(got[1].y, 2.0, 2.0 / s.scale);
}

TEST(Projections, OffAxisPointHasOne) {
  const auto& s = rect42();
  EXPECT_EQ(projections(s, s.to_canvas({2, 0.4})).size(), 1u);
}

TEST(ChordResidual, AdjacentSamplesNearZero) {
  const auto& s = rect42();
  EXPECT_NEAR(chord_residual(s, 10u, 11u), 0.0, 1e-9);
}

TEST(ChordResidual, RectangleMidAndQuarter) {
  const auto& s = rect42();
  const double cr_mid = chord_residual(s, s.to_canvas({2, 0}), s.to_canvas({2, 2})) / s.scale;
  const double cr_q = chord_residual(s, s.to_canvas({1, 0}), s.to_canvas({1, 2})) / s.scale;
  EXPECT_NEAR(oracle::boundary_geodesic(kRect42, {2, 0}, {2, 2}) - 2.0, 4.0, 1e-12);
  EXPECT_NEAR(oracle::boundary_geodesic(kRect42, {1, 0}, {1, 2}) - 2.0, 2.0, 1e-12);
  EXPECT_NEAR(cr_mid, 4.0, 2.0 / s.scale);
  EXPECT_NEAR(cr_q, 2.0, 2.0 / s.scale);
}

TEST(ChordResidual, CrossRingIsInfinite) {
  const Ring outer{{0, 0}, {4, 0}, {4, 4}, {0, 4}}, hole{{1, 1}, {1, 3}, {3, 3}, {3, 1}};
  const auto s = build_shape_model({outer, hole}, 256);
  EXPECT_TRUE(std::isinf(chord_residual(s, s.to_canvas({0, 2}), s.to_canvas({1, 2}))));
}

TEST(MedialAxis, RectangleHausdorff) {
  const auto& s = rect42();
  const auto g = medial_axis(s, AxisKind::Interior);
  auto ref = oracle::rectangle_skeleton(4 * s.scale, 2 * s.scale);
  EXPECT_LE(oracle::hausdorff(graph_segments(g), ref, 0.5), 2.0);
}

TEST(MedialAxis, RadiiMatchDistanceMap) {
  const auto& s = rect42();
  const auto g = medial_axis(s, AxisKind::Interior);
  for (const auto& n : g.nodes) {
    const double d = s.nearest_sample(n.p).second;
    EXPECT_NEAR(n.radius, d, 1.5);
  }
}

TEST(MedialAxis, DiskCollapsesToCenter) {
  const auto s = build_shape_model({detail::circle_ring({0, 0}, 1.0, 256)}, 256);
  const auto g = medial_axis(s, AxisKind::Interior);
  ASSERT_FALSE(g.empty());
  const auto c = shape_center(s, g);
  EXPECT_NEAR(c.p.x, 128.0, 3.0);
  EXPECT_NEAR(c.p.y, 128.0, 3.0);
  double spread = 0.0;
  for (const auto& n : g.nodes) spread = std::max(spread, distance(n.p, {128, 128}));
  EXPECT_LE(spread, 0.05 * s.diagonal());
}

TEST(MedialAxis, LShapeExteriorEndVertexAtReflexCorner) {
  const auto& shape = corpus_shape("l_shape");
  const auto s = build_shape_model(shape.rings, 512);
  const auto g = medial_axis(s, AxisKind::Exterior);
  // Reflex corner found by an angle scan of the input ring.
  const Ring& r = shape.rings[0];
  const double orient_sign = oracle::shoelace(r) > 0 ? 1.0 : -1.0;
  std::vector<Point2> reflex;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Point2 a = r[(i + r.size() - 1) % r.size()], b = r[i], c = r[(i + 1) % r.size()];
    if (orient_sign * orient(a, b, c) < 0) reflex.push_back(s.to_canvas(b));
  }
  ASSERT_EQ(reflex.size(), 1u);
  double best = 1e300;
  for (auto v : g.end_vertices) best = std::min(best, distance(g.nodes[v].p, reflex[0]));
  EXPECT_LE(best, 0.05 * s.diagonal());
}

TEST(MedialAxis, NearestOnAxisAndDrop) {
  const auto& s = rect42();
  const auto g = medial_axis(s, AxisKind::Interior);
  const auto m = g.nearest(s.to_canvas({2, 0.5}));
  EXPECT_NEAR(m.p.x, 256.0, 2.0);
  EXPECT_NEAR(m.p.y, 128.0, 2.0);
  const auto on = g.nearest(m.p);
  EXPECT_NEAR(on.distance, 0.0, 1e-9);
}

TEST(MedialAxis, NearestMatchesExhaustiveScan) {
  const auto s = build_shape_model(corpus_shape("plus").rings, 256);
  const auto g = medial_axis(s, AxisKind::Interior);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0, 256);
  for (int k = 0; k < 200; ++k) {
    const Point2 z{U(rng), U(rng)};
    double best = 1e300;
    for (const auto& e : g.edges) best = std::min(best, oracle::point_segment(z, g.nodes[e.a].p, g.nodes[e.b].p));
    EXPECT_NEAR(g.nearest(z).distance, best, 1e-9);
  }
}

TEST(MedialAxis, DirectionOnRectangle) {
  const auto& s = rect42();
  const auto g = medial_axis(s, AxisKind::Interior);
  const Frame f = g.direction_at(s.to_canvas({2, 0.5}));
  EXPECT_NEAR(std::abs(f.axial.x), 1.0, 1e-6);
  EXPECT_NEAR(std::abs(f.crosswise.y), 1.0, 1e-6);
}

TEST(MedialAxis, DirectionOnAnnulusIsTangent) {
  const auto s = build_shape_model(corpus_shape("annulus").rings, 512);
  const auto g = medial_axis(s, AxisKind::Interior);
  const Point2 c{256, 256};
  for (double ang : {0.3, 1.2, 2.5, 4.0}) {
    const double rmid = 1.5 * s.scale;
    const Point2 z{c.x + rmid * std::cos(ang), c.y + rmid * std::sin(ang)};
    const Frame f = g.direction_at(z);
    const Vec2 radial = normalized(g.nearest(z).p - c);
    EXPECT_LE(std::abs(dot(f.axial, radial)), std::sin(5.0 * std::numbers::pi / 180.0));
  }
}

TEST(MedialAxis, DiskFallbackIsOrthonormal) {
  const auto s = build_shape_model({detail::circle_ring({0, 0}, 1.0, 256)}, 256);
  const auto g = medial_axis(s, AxisKind::Interior);
  const Frame f = g.direction_at({128, 128});
  EXPECT_NEAR(norm(f.axial), 1.0, 1e-9);
  EXPECT_NEAR(norm(f.crosswise), 1.0, 1e-9);
  EXPECT_NEAR(dot(f.axial, f.crosswise), 0.0, 1e-9);
}

TEST(MedialGeodesic, SelfAndStraightAndY) {
  const auto g = MedialAxisGraph::from_edges({{0, 0}, {4, 0}, {6, 2}, {6, -3}}, {{0, 1}, {1, 2}, {1, 3}});
  const auto a = g.nearest({1, 0}), b = g.nearest({3, 0});
  EXPECT_NEAR(g.geodesic(a, a), 0.0, 1e-12);
  EXPECT_NEAR(g.geodesic(a, b), 2.0, 1e-12);
  const auto p = g.nearest({6, 2}), q = g.nearest({6, -3});
  // Shortest path through the junction (4,0): sqrt(8) + sqrt(13).
  EXPECT_NEAR(g.geodesic(p, q), std::sqrt(8.0) + std::sqrt(13.0), 1e-9);
}

TEST(MedialGeodesic, DisconnectedIsInfinite) {
  const auto g = MedialAxisGraph::from_edges({{0, 0}, {1, 0}, {5, 5}, {6, 5}}, {{0, 1}, {2, 3}});
  EXPECT_TRUE(std::isinf(g.geodesic(g.nearest({0.5, 0}), g.nearest({5.5, 5}))));
}

TEST(ShapeCenter, RectangleCenter) {
  const auto& s = rect42();
  const auto g = medial_axis(s, AxisKind::Interior);
  const auto c = shape_center(s, g);
  EXPECT_NEAR(c.p.x, 256.0, 2.0);
  EXPECT_NEAR(c.p.y, 128.0, 2.0);
  EXPECT_NEAR(c.chord_residual / s.scale, 4.0, 2.0 / s.scale);
}

TEST(ShapeCenter, PlusCenterAtArmCrossing) {
  const auto& shape = corpus_shape("plus");
  const auto s = build_shape_model(shape.rings, 512);
  const auto g = medial_axis(s, AxisKind::Interior);
  const auto c = shape_center(s, g);
  const Point2 mid = s.to_canvas(ring_centroid(shape.rings[0]));
  EXPECT_LE(distance(c.p, mid), 2.0);
}

TEST(ShapeCenter, ScaleInvariant) {
  const auto& shape = corpus_shape("heart");
  const auto s1 = build_shape_model(shape.rings, 512);
  std::vector<Ring> big = shape.rings;
  for (auto& r : big)
    for (auto& p : r) p = p * 3.0;
  const auto s2 = build_shape_model(big, 512);
  const auto c1 = s1.to_shape(shape_center(s1, medial_axis(s1, AxisKind::Interior)).p);
  const auto c2 = s2.to_shape(shape_center(s2, medial_axis(s2, AxisKind::Interior)).p);
  EXPECT_LE(distance(c1 * 3.0, c2), 2.0 / s2.scale);
}
