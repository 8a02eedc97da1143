#include <gtest/gtest.h>

#include <random>

#include "collage/collage.hpp"
#include "oracles.hpp"

using namespace collage;

namespace {

ConvexPolygon unit_square() { return ConvexPolygon::from_rect({0, 0}, {1, 1}); }

ConvexPolygon tri(Point2 a, Point2 b, Point2 c) {
  const std::array<Point2, 3> v{a, b, c};
  return ConvexPolygon::make(v);
}

}  // namespace

TEST(Centroid, Square) {
  const Point2 c = centroid(unit_square());
  EXPECT_NEAR(c.x, 0.5, 1e-12);
  EXPECT_NEAR(c.y, 0.5, 1e-12);
}

TEST(Centroid, Triangle) {
  const Point2 c = centroid(tri({0, 0}, {3, 0}, {0, 3}));
  EXPECT_NEAR(c.x, 1.0, 1e-12);
  EXPECT_NEAR(c.y, 1.0, 1e-12);
}

TEST(Centroid, Hexagon) {
  Ring h;
  for (int k = 0; k < 6; ++k) h.push_back({2 + std::cos(k * std::numbers::pi / 3), 2 + std::sin(k * std::numbers::pi / 3)});
  const Point2 c = centroid(ConvexPolygon::make(h));
  EXPECT_NEAR(c.x, 2.0, 1e-12);
  EXPECT_NEAR(c.y, 2.0, 1e-12);
}

TEST(Centroid, DegenerateThrows) {
  const std::array<Point2, 3> v{Point2{0, 0}, Point2{1, 1}, Point2{2, 2}};
  EXPECT_THROW(ConvexPolygon::make(v), Error);
}

TEST(SplitByLine, SquareVertical) {
  auto [a, b] = split_by_line(unit_square(), {0.5, 0.5}, {0, 1});
  EXPECT_NEAR(a.area(), 0.5, 1e-12);
  EXPECT_NEAR(b.area(), 0.5, 1e-12);
  EXPECT_NEAR(a.bbox().max.x - a.bbox().min.x, 0.5, 1e-12);
  EXPECT_NEAR(a.bbox().max.y - a.bbox().min.y, 1.0, 1e-12);
}

TEST(SplitByLine, SquareDiagonal) {
  const double r = 1.0 / std::sqrt(2.0);
  auto [a, b] = split_by_line(unit_square(), {0.5, 0.5}, {r, r});
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(b.size(), 3u);
  EXPECT_NEAR(a.area(), 0.5, 1e-12);
  EXPECT_NEAR(b.area(), 0.5, 1e-12);
}

TEST(SplitByLine, TriangleHorizontalShoelace) {
  const auto t = tri({0, 0}, {4, 0}, {0, 4});
  auto [a, b] = split_by_line(t, t.centroid(), {1, 0});
  const double sa = std::abs(oracle::shoelace(a.vertices())), sb = std::abs(oracle::shoelace(b.vertices()));
  EXPECT_NEAR(sa + sb, 8.0, 1e-12);
  EXPECT_NEAR(a.area(), sa, 1e-12);
  EXPECT_NEAR(b.area(), sb, 1e-12);
  // One part is the apex triangle, the other the trapezoid.
  EXPECT_EQ(std::min(a.size(), b.size()), 3u);
  EXPECT_EQ(std::max(a.size(), b.size()), 4u);
}

TEST(SplitByLine, BoundaryPointThrows) {
  try {
    split_by_line(unit_square(), {0.0, 0.5}, {0, 1});
    FAIL() << "expected InvalidSplit";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSplit);
  }
}

TEST(HalfPlanes, Square) {
  const auto hp = to_half_planes(unit_square());
  ASSERT_EQ(hp.size(), 4u);
  for (const auto& h : hp)
    for (auto p : {Point2{0.5, 0.5}, Point2{0.1, 0.9}}) EXPECT_TRUE(h.contains(p));
  EXPECT_FALSE(std::all_of(hp.begin(), hp.end(), [](const HalfPlane& h) { return h.contains({1.5, 0.5}); }));
}

TEST(HalfPlanes, TriangleVerticesTightOnTwo) {
  const auto t = tri({0, 0}, {3, 0}, {1, 2});
  const auto hp = to_half_planes(t);
  ASSERT_EQ(hp.size(), 3u);
  for (auto v : t.vertices()) {
    int tight = 0;
    for (const auto& h : hp) tight += std::abs(h.violation(v)) < 1e-12;
    EXPECT_EQ(tight, 2);
  }
}

TEST(InscribedRect, SquareAspect1) {
  const auto r = max_inscribed_rect(unit_square(), 1.0);
  EXPECT_NEAR(r.area(), 1.0, 1e-9);
}

TEST(InscribedRect, SquareAspect2) {
  const auto r = max_inscribed_rect(unit_square(), 2.0);
  EXPECT_NEAR(r.width, 1.0, 1e-9);
  EXPECT_NEAR(r.height, 0.5, 1e-9);
}

TEST(InscribedRect, RightTriangleAgainstGrid) {
  const auto t = tri({0, 0}, {1, 0}, {0, 1});
  const auto r = max_inscribed_rect(t, 1.0);
  const auto g = oracle::grid_inscribed_rect(t.vertices(), 1.0, 1.0 / 512);
  EXPECT_NEAR(g.height, 0.5, 2.0 / 512);
  EXPECT_GE(r.height, g.height - 1e-12);
  EXPECT_NEAR(r.area(), 0.25, 1e-9);
  for (auto c : r.corners()) EXPECT_TRUE(t.contains(c, 1e-9));
}

TEST(InscribedRect, RandomPolygonsInside) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 30; ++k) {
    const auto poly = ConvexPolygon::make(oracle::random_convex(rng));
    for (double a : {0.5, 1.0, 2.0}) {
      const auto r = max_inscribed_rect(poly, a);
      EXPECT_NEAR(r.width / r.height, a, 1e-9);
      for (auto c : r.corners()) EXPECT_TRUE(poly.contains(c, 1e-7));
    }
  }
}

TEST(Delaunay, SquareCorners) {
  const std::vector<Point2> p{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto t = delaunay(p);
  ASSERT_EQ(t.size(), 2u);
  double a = 0;
  for (const auto& tr : t) a += triangle_area(p, tr);
  EXPECT_NEAR(a, 1.0, 1e-12);
}

TEST(Delaunay, NestedBoxesAnnulus) {
  const std::vector<Point2> p{{0, 0}, {10, 0}, {10, 8}, {0, 8}, {3, 2}, {7, 2}, {7, 6}, {3, 6}};
  const auto t = delaunay(p);
  // The inner box is a Delaunay face (two triangles); the rest tiles the annulus.
  std::size_t inner = 0;
  double annulus = 0;
  for (const auto& tr : t) {
    if (tr[0] >= 4 && tr[1] >= 4 && tr[2] >= 4) {
      ++inner;
      continue;
    }
    annulus += triangle_area(p, tr);
  }
  EXPECT_EQ(inner, 2u);
  EXPECT_EQ(t.size() - inner, 8u);
  EXPECT_NEAR(annulus, 80.0 - 16.0, 1e-9);
}

TEST(Delaunay, RandomCloudCoversHull) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0, 100);
  std::vector<Point2> p;
  for (int i = 0; i < 50; ++i) p.push_back({U(rng), U(rng)});
  double a = 0;
  for (const auto& tr : delaunay(p)) a += triangle_area(p, tr);
  EXPECT_NEAR(a, std::abs(oracle::shoelace(convex_hull(p))), 1e-6);
}

TEST(Delaunay, CollinearThrows) {
  const std::vector<Point2> p{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  EXPECT_THROW(delaunay(p), Error);
}

TEST(IsTriangle, Cases) {
  EXPECT_TRUE(is_triangle(tri({0, 0}, {1, 0}, {0, 1})));
  EXPECT_FALSE(is_triangle(unit_square()));
  const double eps = kGeomEpsScale * std::sqrt(2.0);
  const std::vector<Point2> v{{0, 0}, {0.5, eps / 10}, {1, 0}, {0, 1}};
  EXPECT_TRUE(is_triangle(v));
}

TEST(PointInRing, MatchesWindingOracle) {
  const Ring l{{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 4}, {0, 4}};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1, 5);
  for (int i = 0; i < 2000; ++i) {
    const Point2 p{U(rng), U(rng)};
    EXPECT_EQ(point_in_ring(l, p), oracle::inside(l, p));
  }
}

TEST(SplitPolygon, NonConvexPartsTileArea) {
  const Polygon l{{{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 4}, {0, 4}}};
  auto [a, b] = split_polygon(l, l.centroid(), {0, 1});
  EXPECT_NEAR(a.area() + b.area(), 7.0, 1e-12);
}
