#pragma once

// Largest axis-aligned rectangle of a fixed aspect ratio inside a convex
// polygon. With rectangle corners (cx +- s*aspect/2, cy +- s/2), every
// half-plane a*x + b*y <= c holds at all four corners iff
//   a*cx + b*cy + s*(|a|*aspect + |b|)/2 <= c,
// so the problem is a 3-variable LP maximizing s.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "collage/errors.hpp"
#include "collage/geometry.hpp"

namespace collage {

namespace detail {

// Dense tableau simplex for: max c^T x subject to A x <= b, x >= 0, b >= 0.
// Bland's rule keeps it cycle-free on the degenerate vertices that symmetric
// polygons produce. Returns x (size n); throws if unbounded.
inline std::vector<double> simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                                       const std::vector<double>& c) {
  const std::size_t m = A.size(), n = c.size();
  // Row layout: [x (n) | slack (m) | rhs]
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = 1.0;
    t[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  constexpr double tol = 1e-12;
  for (std::size_t iter = 0; iter < 10000; ++iter) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j)
      if (t[m][j] < -tol) { enter = j; break; }
    if (enter == cols) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > tol) {
        const double r = t[i][cols - 1] / t[i][enter];
        if (r < best - tol || (r <= best + tol && leave < m && basis[i] < basis[leave])) {
          best = r;
          leave = i;
        }
      }
    }
    if (leave == m) throw Error(ErrorCode::DegenerateGeometry, "inscribed-rectangle LP is unbounded");
    const double piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = t[i][cols - 1];
  return x;
}

inline RectSpec inscribed_rect_lp(const std::vector<HalfPlane>& hps, Point2 origin, double aspect) {
  // Variables: u+, u-, v+, v-, s with cx = origin.x + u+ - u-, cy = origin.y + v+ - v-.
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  A.reserve(hps.size());
  for (const auto& h : hps) {
    const double k = 0.5 * (std::abs(h.a) * aspect + std::abs(h.b));
    const double rhs = h.c - h.a * origin.x - h.b * origin.y;
    if (!(rhs > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "polygon has no interior around its centroid");
    A.push_back({h.a, -h.a, h.b, -h.b, k});
    b.push_back(rhs);
  }
  const auto x = simplex_max(A, b, {0.0, 0.0, 0.0, 0.0, 1.0});
  const double s = x[4];
  if (!(s > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "inscribed rectangle has zero size");
  return RectSpec{{origin.x + x[0] - x[1], origin.y + x[2] - x[3]}, s * aspect, s};
}

// Rectangle fully inside a simple (possibly non-convex) ring.
inline bool rect_inside_ring(const RectSpec& r, std::span<const Point2> ring) {
  const auto cs = r.corners();
  for (auto c : cs)
    if (!point_in_ring(ring, c) && distance_to_ring(ring, c) > 1e-9 * (r.width + r.height)) return false;
  const double shrink = 1e-9 * (r.width + r.height);
  const Point2 lo = r.min(), hi = r.max();
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const Point2 p = ring[i];
    if (p.x > lo.x + shrink && p.x < hi.x - shrink && p.y > lo.y + shrink && p.y < hi.y - shrink) return false;
    for (std::size_t k = 0; k < 4; ++k)
      if (segments_cross(cs[k], cs[(k + 1) % 4], p, ring[(i + 1) % n], 1e-12)) return false;
  }
  return true;
}

}  // namespace detail

// Maximal rectangle with width/height = aspect inside a convex polygon.
inline RectSpec max_inscribed_rect(const ConvexPolygon& poly, double aspect) {
  if (!(aspect > 0.0) || !std::isfinite(aspect))
    throw Error(ErrorCode::PreconditionViolated, "aspect ratio must be positive");
  return detail::inscribed_rect_lp(to_half_planes(poly), poly.centroid(), aspect);
}

// Non-convex cells (merged patches and their slices): the hull LP box shrunk
// about its center, and a grid of candidate centers each grown by bisection
// on the scale. The largest box that clears the ring wins.
inline RectSpec max_inscribed_rect(const Polygon& poly, double aspect) {
  if (poly.is_convex()) return max_inscribed_rect(ConvexPolygon::make(poly.vertices), aspect);
  if (!(aspect > 0.0) || !std::isfinite(aspect))
    throw Error(ErrorCode::PreconditionViolated, "aspect ratio must be positive");
  const auto& ring = poly.vertices;
  RectSpec best{poly.centroid(), 0.0, 0.0};
  const auto hull = ConvexPolygon::make(convex_hull(ring));
  RectSpec r = max_inscribed_rect(hull, aspect);
  for (int i = 0; i < 60; ++i, r.width *= 0.9, r.height *= 0.9)
    if (detail::rect_inside_ring(r, ring)) {
      best = r;
      break;
    }
  const BBox b = poly.bbox();
  const double hmax = std::min(b.height(), b.width() / aspect);
  constexpr int kGrid = 12;
  for (int gy = 0; gy < kGrid; ++gy)
    for (int gx = 0; gx < kGrid; ++gx) {
      const Point2 c{b.min.x + (gx + 0.5) * b.width() / kGrid, b.min.y + (gy + 0.5) * b.height() / kGrid};
      if (!poly.contains(c)) continue;
      auto fits = [&](double h) { return detail::rect_inside_ring(RectSpec{c, h * aspect, h}, ring); };
      double lo = 0.0, hi = hmax;
      if (!fits(best.height * (1.0 + 1e-9))) continue;
      lo = best.height;
      for (int k = 0; k < 40; ++k) {
        const double mid = 0.5 * (lo + hi);
        (fits(mid) ? lo : hi) = mid;
      }
      if (lo > best.height) best = RectSpec{c, lo * aspect, lo};
    }
  if (!(best.height > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "no rectangle fits inside the non-convex cell");
  return best;
}

}  // namespace collage
