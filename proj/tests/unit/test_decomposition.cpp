#include <gtest/gtest.h>

#include "collage/collage.hpp"
#include "oracles.hpp"

using namespace collage;

namespace {

// Reflex vertices of a ring by an orientation scan.
std::size_t reflex_count(const Ring& r) {
  const double sgn = oracle::shoelace(r) > 0 ? 1.0 : -1.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.size(); ++i)
    n += sgn * orient(r[(i + r.size() - 1) % r.size()], r[i], r[(i + 1) % r.size()]) < 0;
  return n;
}

Decomposition run(const std::string& name, double tau_p = kDefaultTauP, int res = 512) {
  const auto s = build_shape_model(corpus_shape(name).rings, res);
  return decompose(s, tau_p);
}

double patch_area(const Decomposition& d) {
  double a = 0;
  for (const auto& p : d.patches) a += p.polygon.area();
  return a;
}

Patch make_patch(Ring r, std::uint32_t id) {
  Patch p;
  p.polygon.vertices = std::move(r);
  p.id = id;
  return p;
}

}  // namespace

TEST(ConcaveCorners, ConvexShapesHaveNone) {
  for (const char* n : {"square", "hexagon", "rectangle"}) {
    const auto d = run(n);
    EXPECT_TRUE(d.corners.empty()) << n;
    EXPECT_TRUE(d.raw_cuts.empty()) << n;
    EXPECT_TRUE(d.selected_cuts.empty()) << n;
    ASSERT_EQ(d.patches.size(), 1u) << n;
    EXPECT_NEAR(d.patches[0].area_share, 1.0, 1e-12);
  }
}

TEST(ConcaveCorners, MatchReflexScan) {
  for (const char* n : {"l_shape", "plus", "u_shape", "t_shape"}) {
    const auto d = run(n);
    EXPECT_EQ(d.corners.size(), reflex_count(corpus_shape(n).rings[0])) << n;
  }
  EXPECT_EQ(run("l_shape").corners.size(), 1u);
  EXPECT_EQ(run("plus").corners.size(), 4u);
}

TEST(RawCuts, LShapeIncludesAxisAlignedCompletions) {
  const auto s = build_shape_model(corpus_shape("l_shape").rings, 512);
  const auto d = decompose(s);
  const Point2 c = s.to_canvas({2, 2});
  bool horizontal = false, vertical = false;
  for (const auto& cut : d.raw_cuts) {
    EXPECT_NEAR(distance(cut.start, c), 0.0, 2.0);
    const Point2 e = s.to_shape(cut.end);
    if (std::abs(e.x - 0.0) < 2.0 / s.scale && std::abs(e.y - 2.0) < 2.0 / s.scale) horizontal = true;
    if (std::abs(e.x - 2.0) < 2.0 / s.scale && std::abs(e.y - 0.0) < 2.0 / s.scale) vertical = true;
  }
  EXPECT_TRUE(horizontal);
  EXPECT_TRUE(vertical);
}

TEST(RawCuts, UShapeCutsFromBothCorners) {
  const auto d = run("u_shape");
  ASSERT_EQ(d.corners.size(), 2u);
  std::set<std::uint32_t> from;
  for (const auto& c : d.raw_cuts) from.insert(c.corner);
  EXPECT_EQ(from.size(), 2u);
}

TEST(Protrusion, FilterArithmetic) {
  CandidateCut a, b;
  a.length = 1.0, a.arc_length = 4.0, a.protrusion = 0.25;
  b.length = 0.8, b.arc_length = 1.0, b.protrusion = 0.8;
  const auto kept = filter_by_protrusion({a, b}, 0.75);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_DOUBLE_EQ(kept[0].protrusion, 0.25);
  EXPECT_EQ(filter_by_protrusion({a, b}, 1.0).size(), 2u);
}

TEST(Protrusion, RawCutsAtMostOne) {
  for (const char* n : {"l_shape", "plus", "u_shape", "heart", "panda"})
    for (const auto& c : run(n).raw_cuts) {
      EXPECT_GT(c.protrusion, 0.0);
      EXPECT_LE(c.protrusion, 1.0 + 1e-12);
      EXPECT_NEAR(c.protrusion, c.length / c.arc_length, 1e-9);
    }
}

TEST(Decompose, LShapeTwoRectangles) {
  const auto d = run("l_shape");
  EXPECT_EQ(d.selected_cuts.size(), 1u);
  ASSERT_EQ(d.patches.size(), 2u);
  for (const auto& p : d.patches) {
    EXPECT_TRUE(p.polygon.is_convex());
    EXPECT_EQ(remove_collinear(p.polygon.vertices).size(), 4u);
  }
}

TEST(Decompose, PlusAtMostFivePatches) {
  const auto d = run("plus");
  EXPECT_LE(d.selected_cuts.size(), 4u);
  EXPECT_LE(d.patches.size(), 5u);
  for (const auto& p : d.patches) EXPECT_TRUE(p.polygon.is_convex());
}

TEST(Decompose, PandaEarsAndLegsSeparate) {
  const auto d = run("panda");
  EXPECT_GT(d.patches.size(), 1u);
  for (const auto& p : d.patches) EXPECT_TRUE(p.polygon.is_convex());
}

TEST(Decompose, TilingConvexityAndCuts) {
  for (const auto& ns : corpus_shapes()) {
    const auto s = build_shape_model(ns.rings, 512);
    const auto d = decompose(s);
    EXPECT_NEAR(patch_area(d) / s.polygon.area(), 1.0, 0.005) << ns.name;
    double shares = 0;
    for (const auto& p : d.patches) {
      EXPECT_TRUE(p.polygon.is_convex()) << ns.name;
      shares += p.area_share;
    }
    EXPECT_NEAR(shares, 1.0, 1e-9) << ns.name;
    for (std::size_t i = 0; i < d.selected_cuts.size(); ++i)
      for (std::size_t j = i + 1; j < d.selected_cuts.size(); ++j)
        EXPECT_FALSE(segments_cross(d.selected_cuts[i].start, d.selected_cuts[i].end, d.selected_cuts[j].start,
                                    d.selected_cuts[j].end, 1e-12))
            << ns.name;
  }
}

TEST(Decompose, TauMonotone) {
  for (const char* n : {"plus", "panda", "heart", "u_shape"}) {
    const auto lo = run(n, 0.6), hi = run(n, 0.9);
    for (const auto& c : lo.selected_cuts) {
      bool found = false;
      for (const auto& h : hi.filtered_cuts)
        found = found || (distance(c.start, h.start) < 1e-9 && distance(c.end, h.end) < 1e-9);
      EXPECT_TRUE(found) << n;
    }
  }
}

TEST(Decompose, Deterministic) {
  const auto a = run("panda"), b = run("panda");
  ASSERT_EQ(a.patches.size(), b.patches.size());
  for (std::size_t i = 0; i < a.patches.size(); ++i) {
    ASSERT_EQ(a.patches[i].polygon.vertices.size(), b.patches[i].polygon.vertices.size());
    for (std::size_t k = 0; k < a.patches[i].polygon.vertices.size(); ++k) {
      EXPECT_EQ(a.patches[i].polygon.vertices[k].x, b.patches[i].polygon.vertices[k].x);
      EXPECT_EQ(a.patches[i].polygon.vertices[k].y, b.patches[i].polygon.vertices[k].y);
    }
  }
}

TEST(MergeSmallPatches, TwoIntoOne) {
  std::vector<Patch> ps{make_patch({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 0), make_patch({{1, 0}, {3, 0}, {3, 1}, {1, 1}}, 1)};
  const auto m = merge_small_patches(ps, 1);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_NEAR(m[0].polygon.area(), 3.0, 1e-12);
}

TEST(MergeSmallPatches, NoOpWhenEnoughImages) {
  std::vector<Patch> ps;
  for (int i = 0; i < 5; ++i) ps.push_back(make_patch({{double(i), 0}, {i + 1.0, 0}, {i + 1.0, 1}, {double(i), 1}}, i));
  EXPECT_EQ(merge_small_patches(ps, 5).size(), 5u);
}

TEST(MergeSmallPatches, SmallestJoinsCutNeighbour) {
  // Areas 10, 1, 9 side by side; the area-1 patch shares a cut with both and
  // merges into one of them.
  std::vector<Patch> ps{make_patch({{0, 0}, {10, 0}, {10, 1}, {0, 1}}, 0), make_patch({{10, 0}, {11, 0}, {11, 1}, {10, 1}}, 1),
                        make_patch({{11, 0}, {20, 0}, {20, 1}, {11, 1}}, 2)};
  const auto m = merge_small_patches(ps, 2);
  ASSERT_EQ(m.size(), 2u);
  std::vector<double> areas{m[0].polygon.area(), m[1].polygon.area()};
  std::sort(areas.begin(), areas.end());
  EXPECT_TRUE((std::abs(areas[0] - 9) < 1e-9 && std::abs(areas[1] - 11) < 1e-9) ||
              (std::abs(areas[0] - 10) < 1e-9 && std::abs(areas[1] - 10) < 1e-9));
}
