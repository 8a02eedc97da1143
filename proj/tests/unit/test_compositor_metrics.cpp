#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "collage/collage.hpp"
#include "oracles.hpp"

using namespace collage;

namespace {

Polygon rect(double x0, double y0, double x1, double y1) { return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}; }

RectSpec box(double x0, double y0, double x1, double y1) { return RectSpec::from_corners({x0, y0}, {x1, y1}); }

Mask mask_of(int w, int h, std::initializer_list<int> on) {
  Mask m(w, h, 0);
  for (int i : on) m.data()[static_cast<std::size_t>(i)] = 1;
  return m;
}

Mask range_mask(int n, int from, int to) {
  Mask m(n, 1, 0);
  for (int i = from; i < to; ++i) m.data()[static_cast<std::size_t>(i)] = 1;
  return m;
}

RgbImage checkerboard(int w, int h, int sq) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::uint8_t v = ((x / sq) + (y / sq)) % 2 ? 255 : 0;
      img(x, y) = {v, v, v};
    }
  return img;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fill mode and warp plans

TEST(ChooseMode, HugeImageSmallCellCrops) {
  EXPECT_EQ(choose_mode(1000, 1000, box(450, 450, 550, 550), rect(0, 0, 10, 10), box(0, 0, 10, 10)), FillMode::Crop);
}

TEST(ChooseMode, FullFrameSalientWarps) {
  EXPECT_EQ(choose_mode(100, 100, box(0, 0, 100, 100), rect(0, 0, 30, 30), box(10, 10, 20, 20)), FillMode::Warp);
}

TEST(ChooseMode, FrameExactlyCellCrops) {
  EXPECT_EQ(choose_mode(100, 50, box(25, 0, 75, 50), rect(0, 0, 40, 20), box(10, 0, 30, 20)), FillMode::Crop);
}

TEST(WarpPlan, FullFrameOnCoverIsUniformScale) {
  const auto plan = build_warp_plan(100, 50, box(0, 0, 100, 50), rect(10, 10, 50, 30), box(10, 10, 50, 30));
  EXPECT_EQ(plan.mode, FillMode::Crop);
  EXPECT_DOUBLE_EQ(plan.box_forward.a, plan.box_forward.e);
  EXPECT_EQ(plan.box_forward.b, 0.0);
  EXPECT_EQ(plan.box_forward.d, 0.0);
}

TEST(WarpPlan, CenteredBoxesGiveEightTriangles) {
  const auto plan = build_warp_plan(100, 100, box(25, 25, 75, 75), rect(0, 0, 300, 300), box(100, 100, 200, 200));
  ASSERT_EQ(plan.mode, FillMode::Warp);
  ASSERT_EQ(plan.triangles.size(), 8u);
  double src = 0, dst = 0;
  for (const auto& t : plan.triangles) {
    src += std::abs(orient(t.source[0], t.source[1], t.source[2])) / 2;
    dst += std::abs(orient(t.target[0], t.target[1], t.target[2])) / 2;
  }
  EXPECT_NEAR(src, 100.0 * 100 - 50 * 50, 1e-9);
  EXPECT_NEAR(dst, 300.0 * 300 - 100 * 100, 1e-9);
}

TEST(WarpPlan, SalientCornersHitTargetCorners) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0, 1);
  for (int k = 0; k < 50; ++k) {
    const double x0 = 5 + 30 * U(rng), y0 = 5 + 30 * U(rng);
    const auto sb = box(x0, y0, x0 + 20 + 30 * U(rng), y0 + 20 + 30 * U(rng));
    const double s = 0.5 + 2 * U(rng);
    const auto t = RectSpec{{150, 120}, sb.width * s, sb.height * s};
    const auto plan = build_warp_plan(100, 100, sb, rect(0, 0, 300, 240), t);
    const auto sc = sb.corners(), tc = t.corners();
    for (int i = 0; i < 4; ++i) {
      EXPECT_LE(distance(plan.to_target(sc[i]), tc[i]), 1e-6);
      for (const auto& tr : plan.triangles)
        for (int v = 0; v < 3; ++v)
          if (distance(tr.source[v], sc[i]) == 0.0 && tr.forward) EXPECT_LE(distance((*tr.forward)(sc[i]), tc[i]), 1e-6);
    }
  }
}

TEST(WarpPlan, AffinesAgreeOnSharedEdges) {
  const auto plan = build_warp_plan(100, 80, box(30, 20, 80, 60), rect(0, 0, 400, 300), box(150, 100, 250, 180));
  ASSERT_EQ(plan.mode, FillMode::Warp);
  const auto& T = plan.triangles;
  int shared = 0;
  for (std::size_t i = 0; i < T.size(); ++i)
    for (std::size_t j = i + 1; j < T.size(); ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const Point2 p = T[i].source[a], q = T[i].source[(a + 1) % 3];
          if (!(T[j].source[b] == q && T[j].source[(b + 1) % 3] == p) && !(T[j].source[b] == p && T[j].source[(b + 1) % 3] == q))
            continue;
          ++shared;
          for (int k = 0; k <= 9; ++k) {
            const Point2 x = p + (q - p) * (k / 9.0);
            EXPECT_LE(distance((*T[i].forward)(x), (*T[j].forward)(x)), 1e-6);
          }
        }
  EXPECT_GE(shared, 8);
}

TEST(WarpPlan, CropIsScaleAndTranslate) {
  const auto plan = build_warp_plan(1000, 1000, box(400, 400, 600, 500), rect(0, 0, 20, 10), box(0, 0, 20, 10));
  ASSERT_EQ(plan.mode, FillMode::Crop);
  EXPECT_EQ(plan.box_inverse.b, 0.0);
  EXPECT_EQ(plan.box_inverse.d, 0.0);
  EXPECT_NEAR(plan.box_inverse.a, plan.box_inverse.e, 1e-12);
}

TEST(ApplyWarp, IdentityRoundTrip) {
  const auto img = synthetic_image(64, 48, 7);
  const auto cell = rect(0, 0, 64, 48);
  const auto plan = build_warp_plan(64, 48, box(0, 0, 64, 48), cell, box(0, 0, 64, 48));
  RgbImage canvas(64, 48, {255, 255, 255});
  EXPECT_EQ(apply_warp(img, plan, cell, canvas), 64u * 48u);
  int worst = 0;
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 64; ++x) {
      worst = std::max({worst, std::abs(img(x, y).r - canvas(x, y).r), std::abs(img(x, y).g - canvas(x, y).g),
                        std::abs(img(x, y).b - canvas(x, y).b)});
    }
  EXPECT_LE(worst, 1);
}

TEST(ApplyWarp, CheckerboardScale) {
  const auto img = checkerboard(32, 32, 4);
  const auto cell = rect(0, 0, 64, 64);
  const auto plan = build_warp_plan(32, 32, box(0, 0, 32, 32), cell, box(0, 0, 64, 64));
  RgbImage canvas(64, 64);
  apply_warp(img, plan, cell, canvas);
  const auto direct = checkerboard(64, 64, 8);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      if (canvas(x, y).r == direct(x, y).r) continue;
      // Only bilinear seams are allowed to differ: within 1 px of a square edge.
      const int mx = x % 8, my = y % 8;
      EXPECT_TRUE(mx == 0 || mx == 7 || my == 0 || my == 7) << x << "," << y;
    }
}

TEST(ApplyWarp, NothingOutsideCell) {
  const auto img = synthetic_image(50, 50, 1);
  const Polygon cell{{{5, 5}, {60, 10}, {20, 55}}};
  const auto plan = build_warp_plan(50, 50, box(10, 10, 40, 40), cell, max_inscribed_rect(cell, 1.0));
  RgbImage canvas(64, 64, {1, 2, 3});
  const auto n = apply_warp(img, plan, cell, canvas);
  const auto m = oracle::polygon_mask(cell.vertices, 64, 64);
  std::size_t inside = 0, painted = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const Point2 c{x + 0.5, y + 0.5};
      double edge = 1e300;
      for (std::size_t i = 0; i < 3; ++i) edge = std::min(edge, oracle::point_segment(c, cell.vertices[i], cell.vertices[(i + 1) % 3]));
      const bool touched = !(canvas(x, y) == Rgb{1, 2, 3});
      // Centers exactly on an edge belong to one side only; anything else
      // painted must be inside.
      if (touched && edge > 1e-6) EXPECT_TRUE(m(x, y)) << x << "," << y;
      if (!touched && edge > 1e-6) EXPECT_FALSE(m(x, y)) << x << "," << y;
      inside += m(x, y);
      painted += touched;
    }
  EXPECT_EQ(n, painted);
  EXPECT_NEAR(double(painted), double(inside), 64.0);
}

// ---------------------------------------------------------------------------
// Render

TEST(Render, SingleCellCrop) {
  const auto s = build_shape_model({{{0, 0}, {4, 0}, {4, 3}, {0, 3}}}, 128);
  const auto img = synthetic_image(400, 300, 3);
  LayoutCell c;
  c.polygon.vertices = s.polygon.outer;
  c.fitted = max_inscribed_rect(c.polygon, 4.0 / 3.0);
  const auto plan = build_warp_plan(400, 300, box(0, 0, 400, 300), c.polygon, c.fitted);
  EXPECT_EQ(plan.mode, FillMode::Crop);
  RenderInput in{&img, {box(0, 0, 400, 300), nullptr}};
  const auto r = render({c}, {plan}, {in}, s.mask);
  EXPECT_EQ(r.painted[0], count_set(s.mask));
}

TEST(Render, DisjointCellsTileMask) {
  const auto s = build_shape_model(corpus_shape("heart").rings, 256);
  std::vector<LoadedImage> loaded;
  auto images = synthetic_collection(9, 5, &loaded);
  RunConfig cfg;
  cfg.resolution = 256;
  const auto L = compute_layout(s, images, cfg);
  const auto r1 = render_layout(L, loaded, s.mask), r2 = render_layout(L, loaded, s.mask);
  std::size_t painted = 0;
  for (std::size_t i = 0; i < r1.claims.size(); ++i) {
    EXPECT_LE(r1.claims.data()[i], 1);
    painted += r1.owner.data()[i] >= 0;
  }
  const double px = double(count_set(s.mask));
  EXPECT_NEAR(painted / px, 1.0, 0.005);
  EXPECT_TRUE(r1.canvas.data() == r2.canvas.data());
}

// ---------------------------------------------------------------------------
// Metrics arithmetic

TEST(Metrics, SaliencyArea) {
  const Mask shape(10, 10, 1);
  EXPECT_DOUBLE_EQ(saliency_area(shape, shape), 1.0);
  EXPECT_DOUBLE_EQ(saliency_area(Mask(10, 10, 0), shape), 0.0);
  Mask a(10, 10, 0), b(10, 10, 0);
  for (int i = 0; i < 10; ++i) a.data()[i] = 1, b.data()[50 + i] = 1;
  EXPECT_DOUBLE_EQ(saliency_area(std::vector<Mask>{a, b}, shape), 0.2);
}

TEST(Metrics, Compactness) {
  const Mask shape(10, 10, 1);
  EXPECT_DOUBLE_EQ(compactness(shape, shape), 0.0);
  Mask half(10, 10, 0);
  for (int i = 0; i < 50; ++i) half.data()[i] = 1;
  EXPECT_DOUBLE_EQ(compactness(half, shape), 0.5);
}

TEST(Metrics, Overlap) {
  const Mask shape(10, 10, 1);
  EXPECT_DOUBLE_EQ(overlap(std::vector<Mask>{mask_of(10, 10, {1, 2}), mask_of(10, 10, {3, 4})}, shape), 0.0);
  Mask a(10, 10, 0);
  for (int i = 0; i < 10; ++i) a.data()[i] = 1;
  EXPECT_DOUBLE_EQ(overlap(std::vector<Mask>{a, a}, shape), 0.1);
}

TEST(Metrics, Correlation) {
  using C = std::optional<std::string>;
  EXPECT_DOUBLE_EQ(*correlation({C("a"), C("a")}, {{0.3, 0.3}, {0.3, 0.3}}), 0.0);
  EXPECT_DOUBLE_EQ(*correlation({C("a"), C("a")}, {{0, 0}, {1, 0}}), 0.5);
  EXPECT_DOUBLE_EQ(*correlation({C("a"), C("b")}, {{0, 0}, {1, 0}}), 0.0);
  EXPECT_FALSE(correlation({C(), C()}, {{0, 0}, {1, 0}}).has_value());
}

TEST(Metrics, SaliencyLoss) {
  EXPECT_DOUBLE_EQ(saliency_loss(std::vector<Mask>{range_mask(40, 0, 10), range_mask(40, 10, 20)}), 0.0);
  EXPECT_DOUBLE_EQ(saliency_loss(std::vector<Mask>{range_mask(40, 0, 10), range_mask(40, 5, 15)}), 0.25);
}

TEST(Metrics, SaliencyAreaMonotone) {
  const Mask shape(20, 20, 1);
  Mask a(20, 20, 0), b(20, 20, 0);
  for (int i = 0; i < 30; ++i) a.data()[i] = 1;
  for (int i = 100; i < 130; ++i) b.data()[i] = 1;
  const double before = saliency_area(std::vector<Mask>{a, b}, shape);
  b.data()[130] = 1;
  EXPECT_GT(saliency_area(std::vector<Mask>{a, b}, shape), before);
}

TEST(Metrics, PipelineSelfProperties) {
  for (const char* name : {"l_shape", "star", "frame"}) {
    const auto s = build_shape_model(corpus_shape(name).rings, 384);
    std::vector<LoadedImage> loaded;
    auto images = synthetic_collection(10, 8, &loaded);
    RunConfig cfg;
    cfg.resolution = 384;
    const auto L = compute_layout(s, images, cfg);
    const auto r = render_layout(L, loaded, s.mask);
    const auto m = layout_metrics(L, r, s.mask, false);
    EXPECT_EQ(m.m_o, 0.0) << name;
    EXPECT_LE(m.m_c, 0.005) << name;
    EXPECT_EQ(m.m_s, 0.0) << name;
  }
}

TEST(Metrics, InvariantUnderCanvasRescale) {
  std::vector<MetricReport> reps;
  for (int res : {512, 1024}) {
    const auto s = build_shape_model(corpus_shape("u_shape").rings, res);
    std::vector<LoadedImage> loaded;
    auto images = synthetic_collection(8, 21, &loaded);
    RunConfig cfg;
    cfg.resolution = res;
    const auto L = compute_layout(s, images, cfg);
    reps.push_back(layout_metrics(L, render_layout(L, loaded, s.mask), s.mask, false));
  }
  EXPECT_LE(std::abs(reps[0].m_a - reps[1].m_a), 0.01);
  EXPECT_LE(std::abs(reps[0].m_c - reps[1].m_c), 0.01);
  EXPECT_LE(std::abs(reps[0].m_o - reps[1].m_o), 0.01);
  EXPECT_LE(std::abs(reps[0].m_s - reps[1].m_s), 0.01);
  ASSERT_TRUE(reps[0].m_n && reps[1].m_n);
  EXPECT_LE(std::abs(*reps[0].m_n - *reps[1].m_n), 0.01);
}
