#pragma once

// Planar straight-line graph over a polygon with holes plus interior cut
// segments. Faces are traced with the face on the left of each half-edge.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "collage/errors.hpp"
#include "collage/geometry.hpp"

namespace collage {

class PlanarSubdivision {
 public:
  struct Edge {
    std::uint32_t u = 0, v = 0;
    bool is_cut = false;  // cuts are interior on both sides
  };
  struct Face {
    std::vector<std::uint32_t> cycle;  // vertex ids, face on the left
    double area = 0.0;
    bool inside = false;
    std::vector<std::vector<std::uint32_t>> holes;  // unattached inner cycles
  };

  explicit PlanarSubdivision(double eps) : eps_(eps) {}

  const std::vector<Point2>& vertices() const { return verts_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Ring edges keep their stored direction: the shape interior is on the left.
  void add_ring(const Ring& r) {
    std::vector<std::uint32_t> ids;
    for (auto p : r) ids.push_back(vertex_at(p));
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] != ids[(i + 1) % ids.size()]) edges_.push_back({ids[i], ids[(i + 1) % ids.size()], false});
  }

  // Inserts an interior segment, splitting edges it touches or crosses.
  void add_cut(Point2 a, Point2 b) {
    const std::uint32_t ia = vertex_at(a), ib = vertex_at(b);
    if (ia == ib) return;
    a = verts_[ia];
    b = verts_[ib];
    const Vec2 d = b - a;
    const double len = norm(d);
    struct Hit {
      double t;
      std::uint32_t v;
    };
    std::vector<Hit> hits{{0.0, ia}, {1.0, ib}};
    // Existing vertices on the segment.
    for (std::uint32_t k = 0; k < verts_.size(); ++k) {
      if (k == ia || k == ib) continue;
      const double t = dot(verts_[k] - a, d) / (len * len);
      if (t <= 0.0 || t >= 1.0) continue;
      if (point_segment_distance(verts_[k], a, b) <= eps_) hits.push_back({t, k});
    }
    // Proper crossings with existing edges.
    const std::size_t ne = edges_.size();
    for (std::size_t e = 0; e < ne; ++e) {
      const Point2 p = verts_[edges_[e].u], q = verts_[edges_[e].v];
      if (!segments_cross(a, b, p, q, 0.0)) continue;
      const double den = cross(d, q - p);
      const double t = cross(p - a, q - p) / den;
      const Point2 x = a + d * t;
      if (distance(x, p) <= eps_ || distance(x, q) <= eps_) continue;  // handled as a vertex hit
      const std::uint32_t nv = static_cast<std::uint32_t>(verts_.size());
      verts_.push_back(x);
      split_edge(e, nv);
      hits.push_back({t, nv});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) { return x.t < y.t; });
    for (std::size_t i = 0; i + 1 < hits.size(); ++i) {
      const auto u = hits[i].v, v = hits[i + 1].v;
      if (u == v || has_edge(u, v)) continue;
      edges_.push_back({u, v, true});
    }
  }

  // All faces. Inner cycles with negative area are attached to the smallest
  // inside face that contains them.
  std::vector<Face> faces() const {
    const std::size_t nh = edges_.size() * 2;
    // Half-edge h: edge h/2, forward when h is even.
    auto from = [&](std::size_t h) { return h % 2 == 0 ? edges_[h / 2].u : edges_[h / 2].v; };
    auto to = [&](std::size_t h) { return h % 2 == 0 ? edges_[h / 2].v : edges_[h / 2].u; };
    std::vector<std::vector<std::size_t>> out(verts_.size());
    for (std::size_t h = 0; h < nh; ++h) out[from(h)].push_back(h);
    auto ang = [&](std::size_t h) {
      const Vec2 d = verts_[to(h)] - verts_[from(h)];
      return std::atan2(d.y, d.x);
    };
    for (auto& o : out) std::sort(o.begin(), o.end(), [&](std::size_t x, std::size_t y) { return ang(x) < ang(y); });
    std::vector<std::size_t> pos(nh);
    for (auto& o : out)
      for (std::size_t i = 0; i < o.size(); ++i) pos[o[i]] = i;
    auto next = [&](std::size_t h) {
      const std::size_t tw = h ^ 1u;
      const auto& o = out[to(h)];
      const std::size_t i = pos[tw];
      return o[(i + o.size() - 1) % o.size()];
    };
    std::vector<char> seen(nh, 0);
    std::vector<Face> all;
    for (std::size_t h0 = 0; h0 < nh; ++h0) {
      if (seen[h0]) continue;
      Face f;
      bool any_ring_fwd = false, any_ring_rev = false;
      std::size_t h = h0;
      std::size_t guard = 0;
      do {
        seen[h] = 1;
        f.cycle.push_back(from(h));
        const auto& ed = edges_[h / 2];
        if (!ed.is_cut) (h % 2 == 0 ? any_ring_fwd : any_ring_rev) = true;
        h = next(h);
      } while (h != h0 && ++guard <= nh);
      Ring pts;
      for (auto v : f.cycle) pts.push_back(verts_[v]);
      f.area = signed_area(pts);
      f.inside = any_ring_fwd || !any_ring_rev;
      all.push_back(std::move(f));
    }
    std::vector<Face> result;
    std::vector<Face> inner;
    for (auto& f : all) {
      if (!f.inside) continue;
      if (f.area > 0.0) result.push_back(std::move(f));
      else inner.push_back(std::move(f));
    }
    for (auto& h : inner) {
      const Point2 probe = verts_[h.cycle.front()];
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < result.size(); ++i) {
        Ring pts;
        for (auto v : result[i].cycle) pts.push_back(verts_[v]);
        if (!point_in_ring(pts, probe) && distance_to_ring(pts, probe) > eps_) continue;
        if (!best || result[i].area < result[*best].area) best = i;
      }
      if (best) result[*best].holes.push_back(std::move(h.cycle));
    }
    return result;
  }

  Ring face_ring(const Face& f) const {
    Ring r;
    for (auto v : f.cycle) r.push_back(verts_[v]);
    return r;
  }

  // First edge point hit by a ray from vertex `from_v` (excluding edges at it).
  std::optional<Point2> cast_ray(std::uint32_t from_v, Vec2 dir) const {
    const Point2 o = verts_[from_v];
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : edges_) {
      if (e.u == from_v || e.v == from_v) continue;
      if (auto t = ray_segment_hit(o, dir, verts_[e.u], verts_[e.v]); t && *t > eps_ && *t < best) best = *t;
    }
    for (std::uint32_t k = 0; k < verts_.size(); ++k) {
      if (k == from_v) continue;
      const Vec2 w = verts_[k] - o;
      const double t = dot(w, dir);
      if (t > eps_ && t < best && std::abs(cross(dir, w)) <= eps_) best = t;
    }
    if (!std::isfinite(best)) return std::nullopt;
    return o + dir * best;
  }

  std::uint32_t vertex_at(Point2 p) {
    for (std::uint32_t k = 0; k < verts_.size(); ++k)
      if (distance(verts_[k], p) <= eps_) return k;
    const auto id = static_cast<std::uint32_t>(verts_.size());
    verts_.push_back(p);
    // Split any edge the new vertex lies on.
    const std::size_t ne = edges_.size();
    for (std::size_t e = 0; e < ne; ++e) {
      const Point2 a = verts_[edges_[e].u], b = verts_[edges_[e].v];
      if (point_segment_distance(p, a, b) <= eps_) {
        verts_[id] = p;
        split_edge(e, id);
        break;
      }
    }
    return id;
  }

 private:
  void split_edge(std::size_t e, std::uint32_t v) {
    const Edge old = edges_[e];
    edges_[e] = {old.u, v, old.is_cut};
    edges_.push_back({v, old.v, old.is_cut});
  }
  bool has_edge(std::uint32_t u, std::uint32_t v) const {
    for (const auto& e : edges_)
      if ((e.u == u && e.v == v) || (e.u == v && e.v == u)) return true;
    return false;
  }

  double eps_;
  std::vector<Point2> verts_;
  std::vector<Edge> edges_;
};

// Interior angle at position i of a cycle (face on the left), in (0, 2pi].
inline double cycle_interior_angle(const std::vector<Point2>& pts, std::size_t i) {
  const std::size_t n = pts.size();
  const Point2 v = pts[i], p = pts[(i + n - 1) % n], q = pts[(i + 1) % n];
  double a = ccw_angle(q - v, p - v);
  if (a == 0.0) a = 2.0 * std::numbers::pi;
  return a;
}

struct ForceSplitResult {
  std::size_t splits = 0;
};

inline constexpr double kSharpReflex = 15.0 * std::numbers::pi / 180.0;
inline constexpr double kReflexRun = 45.0 * std::numbers::pi / 180.0;

// Splits inside faces by casting angle bisectors to the nearest edge until
// every face is hole-free and convex. Order of work: faces with holes split at
// the worst hole vertex; then sharp reflex vertices (excess over pi above
// kSharpReflex); then runs of mildly reflex vertices turning more than
// kReflexRun in total, split at their midpoint; then any remaining reflex
// vertex, largest excess first.
inline ForceSplitResult force_convex(PlanarSubdivision& g, std::size_t max_steps = 10000) {
  ForceSplitResult res;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const auto faces = g.faces();
    std::optional<std::uint32_t> pick_v;
    Vec2 pick_dir;
    auto bisector = [&](const std::vector<Point2>& pts, std::size_t i, double a) {
      return rotated(normalized(pts[(i + 1) % pts.size()] - pts[i]), 0.5 * a);
    };
    for (const auto& f : faces) {
      if (!f.holes.empty()) {
        double worst = -1.0;
        for (const auto& h : f.holes) {
          std::vector<Point2> pts;
          for (auto v : h) pts.push_back(g.vertices()[v]);
          for (std::size_t i = 0; i < pts.size(); ++i) {
            const double a = cycle_interior_angle(pts, i);
            if (a > worst) worst = a, pick_v = h[i], pick_dir = bisector(pts, i, a);
          }
        }
        break;
      }
      std::vector<Point2> pts;
      for (auto v : f.cycle) pts.push_back(g.vertices()[v]);
      const std::size_t n = pts.size();
      std::vector<double> angle(n), excess(n);
      for (std::size_t i = 0; i < n; ++i) {
        angle[i] = cycle_interior_angle(pts, i);
        excess[i] = angle[i] - std::numbers::pi;
      }
      // Start scanning right after a non-reflex vertex so runs do not wrap.
      std::size_t s0 = n;
      for (std::size_t i = 0; i < n; ++i)
        if (excess[i] <= kConvexEps) {
          s0 = i;
          break;
        }
      double best = 0.0;
      std::optional<std::size_t> best_i;
      auto consider = [&](std::size_t i, double score) {
        if (score > best) best = score, best_i = i;
      };
      if (s0 == n) {
        // Every vertex reflex cannot happen for a CCW face; guard anyway.
        continue;
      }
      for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t i = (s0 + k) % n;
        if (excess[i] <= kConvexEps) continue;
        std::vector<std::size_t> run;
        while (excess[(s0 + k) % n] > kConvexEps && k <= n) run.push_back((s0 + k++) % n);
        double total = 0.0, top = 0.0;
        std::size_t top_i = run.front();
        for (auto r : run) {
          total += excess[r];
          if (excess[r] > top) top = excess[r], top_i = r;
        }
        if (top > kSharpReflex) consider(top_i, top + kReflexRun);
        consider(top_i, top);
        if (total > kReflexRun) {
          double acc = 0.0;
          std::size_t mid = run.front();
          for (auto r : run) {
            acc += excess[r];
            mid = r;
            if (acc >= 0.5 * total) break;
          }
          consider(mid, total);
        }
      }
      if (best_i) {
        pick_v = f.cycle[*best_i];
        pick_dir = bisector(pts, *best_i, angle[*best_i]);
        break;
      }
    }
    if (!pick_v) return res;
    auto hit = g.cast_ray(*pick_v, pick_dir);
    if (!hit) throw Error(ErrorCode::DegenerateGeometry, "bisector ray escaped the shape");
    g.add_cut(g.vertices()[*pick_v], *hit);
    ++res.splits;
  }
  throw Error(ErrorCode::DegenerateGeometry, "convex splitting did not terminate");
}

}  // namespace collage
