#pragma once

// Planar primitives shared by every stage of the collage pipeline: points,
// simple and convex polygons, half-planes, axis-aligned rectangles, and the
// line splits used by the slicing tree.
//
// Working coordinates are canvas units (one unit = one raster cell), x to the
// right and y down. Orientation is purely algebraic: "counter-clockwise" means
// positive shoelace area.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "collage/errors.hpp"

namespace collage {

inline constexpr double kConvexEps = 1e-6;     // radians
inline constexpr double kAreaEps = 1e-6;       // relative
inline constexpr double kGeomEpsScale = 1e-9;  // times the relevant diagonal

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }
  friend constexpr Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
  Point2& operator+=(Point2 b) { x += b.x; y += b.y; return *this; }
  Point2& operator-=(Point2 b) { x -= b.x; y -= b.y; return *this; }
  friend constexpr bool operator==(Point2, Point2) = default;
};

using Vec2 = Point2;

inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline constexpr double squared_distance(Point2 a, Point2 b) {
  return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
}
inline constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }  // +90 degrees
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  if (!(n > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "cannot normalize a zero vector");
  return a / n;
}

inline Vec2 rotated(Vec2 a, double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

// Counter-clockwise angle in [0, 2pi) that carries `from` onto `to`.
inline double ccw_angle(Vec2 from, Vec2 to) {
  double a = std::atan2(cross(from, to), dot(from, to));
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a;
}

// Orientation test: >0 if c lies left of the directed line a->b.
inline constexpr double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

struct BBox {
  Point2 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point2 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

  void expand(Point2 p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
  }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double diagonal() const { return std::hypot(width(), height()); }
  bool empty() const { return !(max.x >= min.x && max.y >= min.y); }
};

inline BBox bbox_of(std::span<const Point2> pts) {
  BBox b;
  for (auto p : pts) b.expand(p);
  return b;
}

inline double geom_eps_for(std::span<const Point2> pts) {
  const double d = bbox_of(pts).diagonal();
  return kGeomEpsScale * (d > 0.0 ? d : 1.0);
}

// ---------------------------------------------------------------------------
// Rings (closed vertex loops, implicit closing edge)

using Ring = std::vector<Point2>;

inline double signed_area(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) s += cross(ring[j], ring[i]);
  return 0.5 * s;
}

inline double ring_perimeter(std::span<const Point2> ring) {
  double s = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) s += distance(ring[i], ring[(i + 1) % n]);
  return s;
}

inline Point2 ring_centroid(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  double a = 0.0, cx = 0.0, cy = 0.0;
  // Shift to the first vertex to keep the accumulation well conditioned.
  const Point2 o = n ? ring[0] : Point2{};
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 p = ring[j] - o, q = ring[i] - o;
    const double w = cross(p, q);
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  if (n < 3 || std::abs(a) <= 1e-300)
    throw Error(ErrorCode::DegenerateGeometry, "centroid of a zero-area polygon");
  return Point2{cx / (3.0 * a), cy / (3.0 * a)} + o;
}

// Even-odd crossing test with a +x ray. Each edge is evaluated from its lower
// to its upper end, so two rings sharing an edge agree on points lying on it:
// such a point belongs to exactly one of them.
inline bool point_in_ring(std::span<const Point2> ring, Point2 p) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = ring[j], b = ring[i];
    if ((a.y > p.y) != (b.y > p.y)) {
      const Point2 lo = a.y > p.y ? b : a, hi = a.y > p.y ? a : b;
      if (orient(lo, hi, p) > 0.0) inside = !inside;
    }
  }
  return inside;
}

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Vec2 ab = b - a;
  const double l2 = dot(ab, ab);
  double t = l2 > 0.0 ? dot(p - a, ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + ab * t);
}

inline double distance_to_ring(std::span<const Point2> ring, Point2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = ring.size(); i < n; ++i)
    best = std::min(best, point_segment_distance(p, ring[i], ring[(i + 1) % n]));
  return best;
}

// Drops consecutive vertices closer than eps (including the closing pair).
inline Ring dedupe_ring(std::span<const Point2> ring, double eps) {
  Ring out;
  out.reserve(ring.size());
  for (auto p : ring)
    if (out.empty() || distance(out.back(), p) > eps) out.push_back(p);
  while (out.size() > 1 && distance(out.front(), out.back()) <= eps) out.pop_back();
  return out;
}

// Turning angle at vertex i in (-pi, pi]; positive for a left (convex) turn.
inline double turn_angle(std::span<const Point2> ring, std::size_t i) {
  const std::size_t n = ring.size();
  const Vec2 e1 = ring[i] - ring[(i + n - 1) % n];
  const Vec2 e2 = ring[(i + 1) % n] - ring[i];
  return std::atan2(cross(e1, e2), dot(e1, e2));
}

// Removes vertices whose turning angle is within angle_eps of straight.
inline Ring remove_collinear(std::span<const Point2> ring, double angle_eps = kConvexEps) {
  Ring r(ring.begin(), ring.end());
  bool changed = true;
  while (changed && r.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < r.size() && r.size() > 3; ++i) {
      if (std::abs(turn_angle(r, i)) <= angle_eps) {
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return r;
}

inline bool ring_is_convex(std::span<const Point2> ring, double angle_eps = kConvexEps) {
  if (ring.size() < 3 || signed_area(ring) <= 0.0) return false;
  for (std::size_t i = 0; i < ring.size(); ++i)
    if (turn_angle(ring, i) < -angle_eps) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Segment predicates

// True when the open segments cross at a single interior point of both.
inline bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d, double eps = 0.0) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  const double sab = eps * norm(b - a), scd = eps * norm(d - c);
  return ((o1 > sab && o2 < -sab) || (o1 < -sab && o2 > sab)) &&
         ((o3 > scd && o4 < -scd) || (o3 < -scd && o4 > scd));
}

// Parameter t >= 0 along the ray where it meets segment [a, b], if it does.
inline std::optional<double> ray_segment_hit(Point2 origin, Vec2 dir, Point2 a, Point2 b) {
  const Vec2 e = b - a;
  const double den = cross(dir, e);
  if (std::abs(den) < 1e-300) return std::nullopt;
  const Vec2 w = a - origin;
  const double t = cross(w, e) / den;
  const double u = cross(w, dir) / den;
  if (t < 0.0 || u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
  return t;
}

// Andrew's monotone chain; CCW, no collinear points.
inline Ring convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Ring h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && orient(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && orient(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

// ---------------------------------------------------------------------------
// Polygon types

// Simple polygon ring, CCW. Patches and cells are convex in the normal path;
// merged patches may be mildly non-convex and are carried in this type.
struct Polygon {
  Ring vertices;

  double area() const { return signed_area(vertices); }
  Point2 centroid() const { return ring_centroid(vertices); }
  BBox bbox() const { return bbox_of(vertices); }
  bool contains(Point2 p) const { return point_in_ring(vertices, p); }
  bool is_convex() const { return ring_is_convex(vertices); }
  std::size_t size() const { return vertices.size(); }
};

class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  // Validates and normalizes: drops repeated vertices, orients CCW.
  static ConvexPolygon make(std::span<const Point2> pts, std::optional<double> eps = std::nullopt) {
    const double e = eps.value_or(geom_eps_for(pts));
    Ring r = dedupe_ring(pts, e);
    if (r.size() < 3) throw Error(ErrorCode::DegenerateGeometry, "convex polygon needs at least 3 vertices");
    if (signed_area(r) < 0.0) std::reverse(r.begin(), r.end());
    if (!(signed_area(r) > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "polygon has zero area");
    for (auto p : r)
      if (!is_finite(p)) throw Error(ErrorCode::DegenerateGeometry, "non-finite vertex");
    for (std::size_t i = 0; i < r.size(); ++i)
      if (turn_angle(r, i) < -kConvexEps) throw Error(ErrorCode::DegenerateGeometry, "polygon is not convex");
    ConvexPolygon c;
    c.poly_.vertices = std::move(r);
    return c;
  }

  static ConvexPolygon from_rect(Point2 min, Point2 max) {
    const std::array<Point2, 4> v{min, Point2{max.x, min.y}, max, Point2{min.x, max.y}};
    return make(v);
  }

  const Ring& vertices() const { return poly_.vertices; }
  const Polygon& polygon() const { return poly_; }
  std::size_t size() const { return poly_.vertices.size(); }
  double area() const { return poly_.area(); }
  Point2 centroid() const { return poly_.centroid(); }
  BBox bbox() const { return poly_.bbox(); }

  // Inclusive containment with tolerance eps (distance outside allowed).
  bool contains(Point2 p, double eps = 0.0) const {
    const auto& v = poly_.vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
      const Vec2 e = v[(i + 1) % n] - v[i];
      if (cross(e, p - v[i]) < -eps * norm(e)) return false;
    }
    return true;
  }

 private:
  Polygon poly_;
};

struct PolygonWithHoles {
  Ring outer;               // CCW
  std::vector<Ring> holes;  // CW

  double area() const {
    double a = std::abs(signed_area(outer));
    for (const auto& h : holes) a -= std::abs(signed_area(h));
    return a;
  }
  BBox bbox() const { return bbox_of(outer); }
  bool contains(Point2 p) const {
    if (!point_in_ring(outer, p)) return false;
    for (const auto& h : holes)
      if (point_in_ring(h, p)) return false;
    return true;
  }
  double boundary_distance(Point2 p) const {
    double d = distance_to_ring(outer, p);
    for (const auto& h : holes) d = std::min(d, distance_to_ring(h, p));
    return d;
  }
  std::size_t ring_count() const { return 1 + holes.size(); }
  const Ring& ring(std::size_t i) const { return i == 0 ? outer : holes[i - 1]; }

  // Outer CCW, holes CW.
  void normalize_orientation() {
    if (signed_area(outer) < 0.0) std::reverse(outer.begin(), outer.end());
    for (auto& h : holes)
      if (signed_area(h) > 0.0) std::reverse(h.begin(), h.end());
  }
};

// a*x + b*y <= c with (a, b) unit length.
struct HalfPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double violation(Point2 p) const { return a * p.x + b * p.y - c; }
  bool contains(Point2 p, double eps = 0.0) const { return violation(p) <= eps; }
};

// Axis-aligned rectangle.
struct RectSpec {
  Point2 center;
  double width = 0.0;
  double height = 0.0;

  static RectSpec from_corners(Point2 lo, Point2 hi) {
    return {(lo + hi) * 0.5, hi.x - lo.x, hi.y - lo.y};
  }
  Point2 min() const { return {center.x - 0.5 * width, center.y - 0.5 * height}; }
  Point2 max() const { return {center.x + 0.5 * width, center.y + 0.5 * height}; }
  double area() const { return width * height; }
  double aspect() const { return width / height; }
  // CCW in algebraic orientation: (min), (max.x, min.y), (max), (min.x, max.y).
  std::array<Point2, 4> corners() const {
    const Point2 lo = min(), hi = max();
    return {lo, Point2{hi.x, lo.y}, hi, Point2{lo.x, hi.y}};
  }
  bool contains(Point2 p, double eps = 0.0) const {
    const Point2 lo = min(), hi = max();
    return p.x >= lo.x - eps && p.x <= hi.x + eps && p.y >= lo.y - eps && p.y <= hi.y + eps;
  }
};

inline std::vector<HalfPlane> to_half_planes(const ConvexPolygon& poly) {
  const auto& v = poly.vertices();
  std::vector<HalfPlane> out;
  out.reserve(v.size());
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Vec2 e = v[(i + 1) % n] - v[i];
    const double len = norm(e);
    if (!(len > 0.0)) continue;
    // Outward normal of a CCW edge.
    const Vec2 nrm{e.y / len, -e.x / len};
    out.push_back({nrm.x, nrm.y, dot(nrm, v[i])});
  }
  return out;
}

inline Point2 centroid(const ConvexPolygon& poly) { return poly.centroid(); }

// ---------------------------------------------------------------------------
// Line splits

namespace detail {

// Sutherland-Hodgman clip of a convex ring to the side where side*cross(dir, v - p) >= 0.
inline Ring clip_convex(const Ring& v, Point2 p, Vec2 dir, double side, double eps) {
  Ring out;
  const std::size_t n = v.size();
  out.reserve(n + 2);
  auto s = [&](Point2 q) {
    const double d = side * cross(dir, q - p);
    return std::abs(d) <= eps ? 0.0 : d;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i], b = v[(i + 1) % n];
    const double sa = s(a), sb = s(b);
    if (sa >= 0.0) out.push_back(a);
    if ((sa > 0.0 && sb < 0.0) || (sa < 0.0 && sb > 0.0)) {
      const double t = sa / (sa - sb);
      out.push_back(a + (b - a) * t);
    }
  }
  return out;
}

}  // namespace detail

// Splits a convex polygon along the line through `point` with direction `dir`.
// first = part left of the directed line, second = part right of it.
inline std::pair<ConvexPolygon, ConvexPolygon> split_by_line(const ConvexPolygon& poly, Point2 point, Vec2 dir) {
  const double eps = geom_eps_for(poly.vertices());
  const Vec2 d = normalized(dir);
  // The point must be strictly interior.
  const auto& v = poly.vertices();
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Vec2 e = v[(i + 1) % n] - v[i];
    if (cross(e, point - v[i]) <= eps * norm(e))
      throw Error(ErrorCode::InvalidSplit, "split point is not strictly inside the polygon");
  }
  Ring left = detail::clip_convex(v, point, d, +1.0, eps);
  Ring right = detail::clip_convex(v, point, d, -1.0, eps);
  const double total = poly.area();
  ConvexPolygon a, b;
  try {
    a = ConvexPolygon::make(left, eps);
    b = ConvexPolygon::make(right, eps);
  } catch (const Error& err) {
    throw Error(ErrorCode::InvalidSplit, std::string("split produced a degenerate part: ") + err.what());
  }
  if (a.area() <= kAreaEps * total * 1e-3 || b.area() <= kAreaEps * total * 1e-3)
    throw Error(ErrorCode::InvalidSplit, "split produced an empty part");
  return {std::move(a), std::move(b)};
}

// Splits a simple polygon along the chord of the line through `point` that
// contains `point` (the longest chord if `point` is outside). For convex input
// this equals split_by_line.
inline std::pair<Polygon, Polygon> split_polygon(const Polygon& poly, Point2 point, Vec2 dir) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  const double eps = geom_eps_for(v);
  const Vec2 d = normalized(dir);
  if (poly.is_convex()) {
    auto cp = ConvexPolygon::make(v, eps);
    auto [a, b] = split_by_line(cp, point, d);
    return {a.polygon(), b.polygon()};
  }
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = cross(d, v[i] - point);
    if (std::abs(s[i]) <= eps) s[i] = eps;  // symbolic perturbation: on-line counts as left
  }
  struct Crossing {
    std::size_t edge;
    double t;
    Point2 p;
  };
  std::vector<Crossing> xs;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if ((s[i] > 0.0) != (s[j] > 0.0)) {
      const double t = s[i] / (s[i] - s[j]);
      const Point2 p = v[i] + (v[j] - v[i]) * t;
      xs.push_back({i, dot(p - point, d), p});
    }
  }
  if (xs.size() < 2 || xs.size() % 2 != 0) throw Error(ErrorCode::InvalidSplit, "line does not cross the polygon");
  std::sort(xs.begin(), xs.end(), [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
  std::size_t pick = xs.size();
  for (std::size_t k = 0; k + 1 < xs.size(); k += 2)
    if (xs[k].t <= 0.0 && xs[k + 1].t >= 0.0) pick = k;
  if (pick == xs.size()) {
    double best = -1.0;
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2)
      if (xs[k + 1].t - xs[k].t > best) best = xs[k + 1].t - xs[k].t, pick = k;
  }
  Crossing c1 = xs[pick], c2 = xs[pick + 1];
  if (c1.edge > c2.edge) std::swap(c1, c2);
  Ring a{c1.p}, b{c2.p};
  for (std::size_t k = c1.edge + 1; k <= c2.edge; ++k) a.push_back(v[k]);
  a.push_back(c2.p);
  for (std::size_t k = c2.edge + 1; k < c2.edge + 1 + (n - (c2.edge - c1.edge)); ++k) b.push_back(v[k % n]);
  b.push_back(c1.p);
  a = dedupe_ring(a, eps);
  b = dedupe_ring(b, eps);
  if (a.size() < 3 || b.size() < 3 || signed_area(a) <= 0.0 || signed_area(b) <= 0.0)
    throw Error(ErrorCode::InvalidSplit, "chord split produced a degenerate part");
  // a lies on the side of vertex c1.edge + 1.
  const bool a_left = s[(c1.edge + 1) % n] > 0.0;
  Polygon pa{std::move(a)}, pb{std::move(b)};
  if (a_left) return {std::move(pa), std::move(pb)};
  return {std::move(pb), std::move(pa)};
}

// True iff the polygon has exactly three effective corners once vertices
// closer than eps_geom are merged and near-straight vertices are dropped.
inline bool is_triangle(std::span<const Point2> vertices, std::optional<double> eps_geom = std::nullopt) {
  const double e = eps_geom.value_or(geom_eps_for(vertices));
  Ring r = dedupe_ring(vertices, e);
  if (r.size() < 3) return false;
  r = remove_collinear(r, kConvexEps);
  // remove_collinear stops at three; a fully flat ring is not a triangle.
  if (r.size() == 3 && std::abs(signed_area(r)) <= e * e) return false;
  return r.size() == 3;
}

inline bool is_triangle(const ConvexPolygon& poly) { return is_triangle(poly.vertices()); }
inline bool is_triangle(const Polygon& poly) { return is_triangle(poly.vertices); }

}  // namespace collage
