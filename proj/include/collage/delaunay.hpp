#pragma once

// Delaunay triangulation of a small point set: lexicographic sweep to get a
// triangulation of the convex hull, then Lawson edge flips.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "collage/errors.hpp"
#include "collage/geometry.hpp"

namespace collage {

using Triangle = std::array<std::size_t, 3>;

namespace detail {

// > 0 when d lies strictly inside the circumcircle of CCW triangle (a, b, c).
inline double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

}  // namespace detail

// Triangles index into `points`, CCW. Duplicate points are skipped.
inline std::vector<Triangle> delaunay(std::span<const Point2> points) {
  const double eps = geom_eps_for(points);
  std::vector<std::size_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    const Point2 a = points[i], b = points[j];
    return a.x < b.x || (a.x == b.x && (a.y < b.y || (a.y == b.y && i < j)));
  });
  std::vector<std::size_t> order;
  for (auto i : idx)
    if (order.empty() || distance(points[order.back()], points[i]) > eps) order.push_back(i);
  if (order.size() < 3) throw Error(ErrorCode::DegenerateGeometry, "delaunay needs 3 distinct points");

  auto P = [&](std::size_t i) { return points[i]; };
  const double diag = bbox_of(points).diagonal();
  const double area_tol = 1e-12 * diag * diag;

  // Collinear prefix.
  std::size_t k = 2;
  while (k < order.size() && std::abs(orient(P(order[0]), P(order[1]), P(order[k]))) <= area_tol) ++k;
  if (k == order.size()) throw Error(ErrorCode::DegenerateGeometry, "all points are collinear");

  std::vector<Triangle> tris;
  const std::size_t apex = order[k];
  const bool apex_left = orient(P(order[0]), P(order[1]), P(apex)) > 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (apex_left) tris.push_back({order[i], order[i + 1], apex});
    else tris.push_back({order[i + 1], order[i], apex});
  }
  // Hull as a CCW cycle of point indices.
  std::vector<std::size_t> hull;
  if (apex_left) {
    for (std::size_t i = 0; i < k; ++i) hull.push_back(order[i]);
    hull.push_back(apex);
  } else {
    hull.push_back(apex);
    for (std::size_t i = k; i-- > 0;) hull.push_back(order[i]);
  }
  // Remaining points are outside the current hull by the sort order.
  for (std::size_t r = k + 1; r < order.size(); ++r) {
    const std::size_t q = order[r];
    const std::size_t h = hull.size();
    std::vector<char> vis(h, 0);
    for (std::size_t e = 0; e < h; ++e)
      vis[e] = orient(P(hull[e]), P(hull[(e + 1) % h]), P(q)) < -area_tol;
    std::size_t first = h;
    for (std::size_t e = 0; e < h; ++e)
      if (vis[e] && !vis[(e + h - 1) % h]) { first = e; break; }
    if (first == h) continue;  // on the hull boundary within tolerance; cannot happen for distinct sorted points
    std::size_t e = first, count = 0;
    while (vis[e]) {
      tris.push_back({hull[(e + 1) % h], hull[e], q});
      e = (e + 1) % h;
      ++count;
    }
    // Replace the interior vertices of the visible chain with q.
    std::vector<std::size_t> nh;
    nh.reserve(h + 1);
    for (std::size_t i = 0; i < h; ++i) {
      const std::size_t off = (i + h - first) % h;  // position relative to the chain start
      if (off >= 1 && off <= count - 1) continue;
      nh.push_back(hull[i]);
      if (off == 0) nh.push_back(q);
    }
    hull = std::move(nh);
  }

  // Lawson flips.
  const double circ_tol = 1e-12 * diag * diag * diag * diag;
  for (std::size_t pass = 0; pass < tris.size() * tris.size() + 100; ++pass) {
    bool flipped = false;
    for (std::size_t t = 0; t < tris.size() && !flipped; ++t) {
      for (int s = 0; s < 3 && !flipped; ++s) {
        const std::size_t u = tris[t][s], v = tris[t][(s + 1) % 3], w = tris[t][(s + 2) % 3];
        for (std::size_t t2 = 0; t2 < tris.size(); ++t2) {
          if (t2 == t) continue;
          int s2 = -1;
          for (int j = 0; j < 3; ++j)
            if (tris[t2][j] == v && tris[t2][(j + 1) % 3] == u) s2 = j;
          if (s2 < 0) continue;
          const std::size_t x = tris[t2][(s2 + 2) % 3];
          if (detail::incircle(P(u), P(v), P(w), P(x)) > circ_tol &&
              orient(P(w), P(u), P(x)) > area_tol && orient(P(x), P(v), P(w)) > area_tol) {
            tris[t] = {w, u, x};
            tris[t2] = {x, v, w};
            flipped = true;
          }
          break;
        }
      }
    }
    if (!flipped) break;
  }
  return tris;
}

inline double triangle_area(std::span<const Point2> pts, const Triangle& t) {
  return 0.5 * orient(pts[t[0]], pts[t[1]], pts[t[2]]);
}

}  // namespace collage
