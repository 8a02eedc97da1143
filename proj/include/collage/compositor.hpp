#pragma once

// Cell filling: crop when the scaled image covers the cell, otherwise a
// piecewise-affine warp over the annulus between the salient box and the
// image frame. Rendering paints cells into the shape mask.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "collage/delaunay.hpp"
#include "collage/errors.hpp"
#include "collage/geometry.hpp"
#include "collage/raster.hpp"

namespace collage {

enum class FillMode { Crop, Warp };

// x' = a x + b y + c, y' = d x + e y + f
struct Affine {
  double a = 1, b = 0, c = 0, d = 0, e = 1, f = 0;

  Point2 operator()(Point2 p) const { return {a * p.x + b * p.y + c, d * p.x + e * p.y + f}; }
  double det() const { return a * e - b * d; }

  // Maps the source triangle onto the destination one; nullopt when the
  // source is degenerate.
  static std::optional<Affine> from_triangles(const std::array<Point2, 3>& s, const std::array<Point2, 3>& t) {
    const Vec2 u = s[1] - s[0], v = s[2] - s[0];
    const double den = cross(u, v);
    const double scale = std::max({dot(u, u), dot(v, v), 1e-300});
    if (std::abs(den) <= 1e-12 * scale) return std::nullopt;
    const Vec2 tu = t[1] - t[0], tv = t[2] - t[0];
    // M [u v] = [tu tv]  =>  M = [tu tv] [u v]^-1
    const double i00 = v.y / den, i01 = -v.x / den, i10 = -u.y / den, i11 = u.x / den;
    Affine m;
    m.a = tu.x * i00 + tv.x * i10;
    m.b = tu.x * i01 + tv.x * i11;
    m.d = tu.y * i00 + tv.y * i10;
    m.e = tu.y * i01 + tv.y * i11;
    m.c = t[0].x - (m.a * s[0].x + m.b * s[0].y);
    m.f = t[0].y - (m.d * s[0].x + m.e * s[0].y);
    return m;
  }

  // Maps box `from` onto box `to` (axis-aligned scale + translate).
  static Affine box_to_box(const RectSpec& from, const RectSpec& to) {
    Affine m;
    m.a = to.width / from.width;
    m.b = 0.0;
    m.d = 0.0;
    m.e = to.height / from.height;
    m.c = to.min().x - m.a * from.min().x;
    m.f = to.min().y - m.e * from.min().y;
    return m;
  }
};

struct WarpTriangle {
  std::array<Point2, 3> source;
  std::array<Point2, 3> target;
  std::optional<Affine> forward;  // source -> target
  std::optional<Affine> inverse;  // target -> source
};

struct WarpPlan {
  FillMode mode = FillMode::Crop;
  RectSpec frame;    // D, image pixels
  RectSpec salient;  // Sb, image pixels
  RectSpec target;   // T, canvas
  RectSpec cover;    // H, canvas
  std::vector<WarpTriangle> triangles;  // annulus; empty in Crop mode
  Affine box_forward;                   // Sb -> T (whole image in Crop mode)
  Affine box_inverse;

  // Canvas point -> image pixel coordinates.
  Point2 to_source(Point2 p) const {
    if (mode == FillMode::Crop || target.contains(p)) return box_inverse(p);
    const WarpTriangle* best = nullptr;
    double best_violation = std::numeric_limits<double>::infinity();
    for (const auto& t : triangles) {
      if (!t.inverse) continue;
      const double v = violation(t.target, p);
      if (v <= 0.0) return (*t.inverse)(p);
      if (v < best_violation) best_violation = v, best = &t;
    }
    return best ? (*best->inverse)(p) : box_inverse(p);
  }

  // Image point -> canvas.
  Point2 to_target(Point2 p) const {
    if (mode == FillMode::Crop || salient.contains(p)) return box_forward(p);
    const WarpTriangle* best = nullptr;
    double best_violation = std::numeric_limits<double>::infinity();
    for (const auto& t : triangles) {
      if (!t.forward) continue;
      const double v = violation(t.source, p);
      if (v <= 0.0) return (*t.forward)(p);
      if (v < best_violation) best_violation = v, best = &t;
    }
    return best ? (*best->forward)(p) : box_forward(p);
  }

  // Largest distance outside any edge (<= 0 inside), orientation-agnostic.
  static double violation(const std::array<Point2, 3>& tri, Point2 p) {
    const double s = orient(tri[0], tri[1], tri[2]) >= 0.0 ? 1.0 : -1.0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
      const Point2 a = tri[k], b = tri[(k + 1) % 3];
      const double len = distance(a, b);
      if (len <= 0.0) continue;
      worst = std::max(worst, -s * orient(a, b, p) / len);
    }
    return worst;
  }
};

struct LayoutCell {
  Polygon polygon;
  std::uint32_t image = 0;  // index into the image list
  RectSpec fitted;          // T
  RectSpec cover;           // H
  FillMode mode = FillMode::Crop;
  std::uint32_t patch = 0;
};

inline RectSpec covering_rect(const Polygon& cell) {
  const BBox b = cell.bbox();
  return RectSpec::from_corners(b.min, b.max);
}

// Crop iff the image, scaled so that Sb lands on T, covers every vertex of
// the cell (boundary contact counts as covered).
inline FillMode choose_mode(int image_w, int image_h, const RectSpec& sb, const Polygon& cell, const RectSpec& t) {
  const RectSpec frame = RectSpec::from_corners({0.0, 0.0}, {double(image_w), double(image_h)});
  const Affine m = Affine::box_to_box(sb, t);
  const Point2 lo = m(frame.min()), hi = m(frame.max());
  const RectSpec placed = RectSpec::from_corners(lo, hi);
  const double eps = kGeomEpsScale * std::max(1.0, cell.bbox().diagonal());
  for (auto v : cell.vertices)
    if (!placed.contains(v, eps)) return FillMode::Warp;
  return FillMode::Crop;
}

namespace detail {

// Fixed connectivity for nested boxes: two triangles per side.
inline std::vector<std::array<std::size_t, 3>> annulus_by_sides() {
  std::vector<std::array<std::size_t, 3>> tris;
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t o0 = k, o1 = (k + 1) % 4, i0 = 4 + k, i1 = 4 + (k + 1) % 4;
    tris.push_back({o0, o1, i1});
    tris.push_back({o0, i1, i0});
  }
  return tris;
}

}  // namespace detail

inline WarpPlan build_warp_plan(int image_w, int image_h, const RectSpec& sb, const Polygon& cell, const RectSpec& t) {
  if (image_w <= 0 || image_h <= 0) throw Error(ErrorCode::PreconditionViolated, "empty image");
  WarpPlan plan;
  plan.frame = RectSpec::from_corners({0.0, 0.0}, {double(image_w), double(image_h)});
  plan.salient = sb;
  plan.target = t;
  plan.cover = covering_rect(cell);
  plan.box_forward = Affine::box_to_box(sb, t);
  plan.box_inverse = Affine::box_to_box(t, sb);
  plan.mode = choose_mode(image_w, image_h, sb, cell, t);
  if (plan.mode == FillMode::Crop) return plan;

  const auto dc = plan.frame.corners(), sc = sb.corners(), hc = plan.cover.corners(), tc = t.corners();
  std::array<Point2, 8> src{dc[0], dc[1], dc[2], dc[3], sc[0], sc[1], sc[2], sc[3]};
  std::array<Point2, 8> dst{hc[0], hc[1], hc[2], hc[3], tc[0], tc[1], tc[2], tc[3]};

  // Delaunay of the source points minus the triangles inside Sb; the target
  // reuses the same index triples. Falls back to the per-side split when the
  // source triangulation does not carry over cleanly.
  std::vector<std::array<std::size_t, 3>> tris;
  const bool strictly_inside = sb.min().x > 0.0 && sb.min().y > 0.0 && sb.max().x < image_w && sb.max().y < image_h;
  if (strictly_inside)
    for (const auto& tr : delaunay(src))
      if (!(tr[0] >= 4 && tr[1] >= 4 && tr[2] >= 4)) tris.push_back({tr[0], tr[1], tr[2]});
  auto carries_over = [&] {
    if (tris.size() != 8) return false;
    for (const auto& tr : tris) {
      const double os = orient(src[tr[0]], src[tr[1]], src[tr[2]]);
      const double ot = orient(dst[tr[0]], dst[tr[1]], dst[tr[2]]);
      if (os <= 0.0 || ot < 0.0) return false;
    }
    return true;
  };
  if (!carries_over()) tris = detail::annulus_by_sides();
  for (const auto& tr : tris) {
    WarpTriangle w;
    w.source = {src[tr[0]], src[tr[1]], src[tr[2]]};
    w.target = {dst[tr[0]], dst[tr[1]], dst[tr[2]]};
    w.forward = Affine::from_triangles(w.source, w.target);
    w.inverse = Affine::from_triangles(w.target, w.source);
    plan.triangles.push_back(w);
  }
  return plan;
}

// Bilinear sample at continuous pixel coordinates (pixel centers at +0.5),
// clamped to the image.
inline Rgb sample_bilinear(const RgbImage& img, Point2 p) {
  const double fx = std::clamp(p.x - 0.5, 0.0, double(img.width() - 1));
  const double fy = std::clamp(p.y - 0.5, 0.0, double(img.height() - 1));
  const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  const int x1 = std::min(x0 + 1, img.width() - 1), y1 = std::min(y0 + 1, img.height() - 1);
  const double tx = fx - x0, ty = fy - y0;
  auto lerp = [&](std::uint8_t Rgb::*ch) {
    const double top = img(x0, y0).*ch * (1 - tx) + img(x1, y0).*ch * tx;
    const double bot = img(x0, y1).*ch * (1 - tx) + img(x1, y1).*ch * tx;
    return static_cast<std::uint8_t>(std::lround(std::clamp(top * (1 - ty) + bot * ty, 0.0, 255.0)));
  };
  return {lerp(&Rgb::r), lerp(&Rgb::g), lerp(&Rgb::b)};
}

// Source-side saliency: the salient box (half-open) or a mask when given.
struct SaliencySource {
  RectSpec box;
  const Mask* mask = nullptr;  // image-sized; nonzero = salient

  bool at(Point2 p) const {
    if (mask) {
      const int x = static_cast<int>(std::floor(p.x)), y = static_cast<int>(std::floor(p.y));
      return mask->in_bounds(x, y) && (*mask)(x, y) != 0;
    }
    const Point2 lo = box.min(), hi = box.max();
    return p.x >= lo.x && p.x < hi.x && p.y >= lo.y && p.y < hi.y;
  }
};

// Point used to decide which cell claims pixel (x, y): the pixel center
// nudged by a tiny fixed offset with an irrational slope, so centers that sit
// exactly on a shared cell edge are claimed by one side only.
inline Point2 claim_point(int x, int y) {
  return {x + 0.5 + 3.1e-7, y + 0.5 + 2.4041630560342617e-7};
}

// Paints the canvas pixels whose centers lie in the cell and in `region`;
// returns the number of pixels written.
inline std::size_t apply_warp(const RgbImage& img, const WarpPlan& plan, const Polygon& cell, RgbImage& canvas,
                              const Mask* region = nullptr) {
  std::size_t n = 0;
  const BBox b = cell.bbox();
  const int x0 = std::max(0, static_cast<int>(std::floor(b.min.x))), x1 = std::min(canvas.width() - 1, static_cast<int>(std::ceil(b.max.x)));
  const int y0 = std::max(0, static_cast<int>(std::floor(b.min.y))), y1 = std::min(canvas.height() - 1, static_cast<int>(std::ceil(b.max.y)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      if (region && !(*region)(x, y)) continue;
      const Point2 p{x + 0.5, y + 0.5};
      if (!cell.contains(claim_point(x, y))) continue;
      canvas(x, y) = sample_bilinear(img, plan.to_source(p));
      ++n;
    }
  return n;
}

struct RenderResult {
  RgbImage canvas;
  Raster<std::int32_t> owner;            // painting cell per pixel, -1 = none
  Raster<std::uint8_t> claims;           // cells whose polygon claims the pixel
  Mask visible_salient;                  // owner's saliency at painted pixels
  Raster<std::uint16_t> placed_salient;  // images whose placed saliency covers the pixel
  std::vector<std::size_t> painted;      // per cell
  std::vector<Point2> painted_centroid;  // per cell, canvas units
  std::vector<std::size_t> placed_salient_pixels;  // per cell
};

struct RenderInput {
  const RgbImage* image = nullptr;
  SaliencySource saliency;
};

// Every mask pixel is painted by the cell whose polygon contains its center;
// pixels no cell claims (raster slack along the outline) go to the nearest
// cell. Outside the shape stays `background`.
inline RenderResult render(const std::vector<LayoutCell>& cells, const std::vector<WarpPlan>& plans,
                           const std::vector<RenderInput>& inputs, const Mask& shape_mask, Rgb background = {255, 255, 255}) {
  if (cells.size() != plans.size() || cells.size() != inputs.size())
    throw Error(ErrorCode::PreconditionViolated, "cells, plans and inputs must align");
  const int W = shape_mask.width(), H = shape_mask.height();
  RenderResult r;
  r.canvas = RgbImage(W, H, background);
  r.owner = Raster<std::int32_t>(W, H, -1);
  r.claims = Raster<std::uint8_t>(W, H, 0);
  r.visible_salient = Mask(W, H, 0);
  r.placed_salient = Raster<std::uint16_t>(W, H, 0);
  r.painted.assign(cells.size(), 0);
  r.painted_centroid.assign(cells.size(), Point2{});
  r.placed_salient_pixels.assign(cells.size(), 0);
  std::vector<Point2> sum(cells.size(), Point2{});

  auto paint = [&](std::size_t c, int x, int y) {
    const Point2 p{x + 0.5, y + 0.5};
    const Point2 s = plans[c].to_source(p);
    r.canvas(x, y) = sample_bilinear(*inputs[c].image, s);
    r.owner(x, y) = static_cast<std::int32_t>(c);
    if (inputs[c].saliency.at(s)) r.visible_salient(x, y) = 1;
    ++r.painted[c];
    sum[c] = sum[c] + Vec2{p.x, p.y};
  };

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c].polygon;
    const BBox b = cell.bbox();
    const int x0 = std::max(0, static_cast<int>(std::floor(b.min.x)));
    const int x1 = std::min(W - 1, static_cast<int>(std::ceil(b.max.x)));
    const int y0 = std::max(0, static_cast<int>(std::floor(b.min.y)));
    const int y1 = std::min(H - 1, static_cast<int>(std::ceil(b.max.y)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        if (!shape_mask(x, y)) continue;
        const Point2 p{x + 0.5, y + 0.5};
        // Placed saliency is counted over the cover rectangle, whoever owns
        // the pixel.
        if (plans[c].cover.contains(p) && inputs[c].saliency.at(plans[c].to_source(p))) {
          ++r.placed_salient(x, y);
          ++r.placed_salient_pixels[c];
        }
        if (!cell.contains(claim_point(x, y))) continue;
        if (r.claims(x, y) < 255) ++r.claims(x, y);
        if (r.owner(x, y) < 0) paint(c, x, y);
      }
  }
  // Unclaimed shape pixels.
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      if (!shape_mask(x, y) || r.owner(x, y) >= 0) continue;
      const Point2 p{x + 0.5, y + 0.5};
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const BBox b = cells[c].polygon.bbox();
        const double dx = std::max({b.min.x - p.x, 0.0, p.x - b.max.x}), dy = std::max({b.min.y - p.y, 0.0, p.y - b.max.y});
        if (std::hypot(dx, dy) >= bd) continue;
        const double d = distance_to_ring(cells[c].polygon.vertices, p);
        if (d < bd) bd = d, best = c;
      }
      if (!cells.empty()) {
        paint(best, x, y);
        if (r.claims(x, y) < 255) ++r.claims(x, y);
      }
    }
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (r.painted[c]) r.painted_centroid[c] = sum[c] / double(r.painted[c]);
  return r;
}

}  // namespace collage
