#pragma once

// Part-cut decomposition of the shape into convex patches: concave corners
// come from the exterior medial axis, raw cuts from the interior axis, then a
// protrusion filter and a greedy selection resolve the corners.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "collage/errors.hpp"
#include "collage/geometry.hpp"
#include "collage/medial_axis.hpp"
#include "collage/planar_graph.hpp"
#include "collage/shape_model.hpp"

namespace collage {

inline constexpr double kDefaultTauP = 0.75;

struct ConcaveCorner {
  Point2 boundary_point;
  Point2 exterior_end_vertex;
  double opening = 0.0;  // interior angle, radians (> pi)
  std::uint32_t ring = 0;
  std::uint32_t vertex = 0;  // index in the ring
  std::uint32_t sample = 0;
  Vec2 to_next;  // unit direction toward the next ring vertex
  Vec2 to_prev;  // unit direction toward the previous ring vertex
};

struct CandidateCut {
  Point2 start;
  Point2 end;
  double length = 0.0;
  double arc_length = 0.0;  // shorter boundary arc; +inf across rings
  double protrusion = 0.0;
  std::uint32_t corner = 0;
  std::optional<std::uint32_t> end_corner;
  std::uint32_t end_sample = 0;
};

struct Patch {
  Polygon polygon;
  double area_share = 0.0;
  double prominence = 0.0;
  std::uint32_t id = 0;
  bool convex = true;
};

namespace detail {

inline bool cut_inside(const ShapeModel& s, Point2 a, Point2 b) {
  const double len = distance(a, b);
  for (std::uint32_t k = 0; k < s.polygon.ring_count(); ++k) {
    const Ring& r = s.polygon.ring(k);
    for (std::size_t i = 0, n = r.size(); i < n; ++i)
      if (segments_cross(a, b, r[i], r[(i + 1) % n], 1e-12)) return false;
  }
  const int steps = std::max(4, static_cast<int>(std::ceil(len)));
  for (int i = 1; i < steps; ++i) {
    const Point2 p = a + (b - a) * (double(i) / steps);
    if (!s.polygon.contains(p)) return false;
    if (s.polygon.boundary_distance(p) <= 1e-6 * s.diagonal()) return false;
  }
  return true;
}

// Whether the cut directions at a corner split its reflex angle into parts
// no larger than pi + eps.
inline bool corner_resolved(const ConcaveCorner& c, const std::vector<Vec2>& dirs) {
  std::vector<double> angles{0.0, c.opening};
  for (auto d : dirs) {
    const double a = ccw_angle(c.to_next, d);
    if (a > 0.0 && a < c.opening) angles.push_back(a);
  }
  std::sort(angles.begin(), angles.end());
  for (std::size_t i = 0; i + 1 < angles.size(); ++i)
    if (angles[i + 1] - angles[i] > std::numbers::pi + kConvexEps) return false;
  return true;
}

// Boundary point for a cut from `from` ending near sample `sid`: the foot of
// the perpendicular on the sample's ring edge (or its neighbours) when it is
// within `tol`, else the sample itself.
inline Point2 refine_cut_end(const ShapeModel& s, Point2 from, std::uint32_t sid, double tol) {
  const auto& smp = s.samples[sid];
  const auto& br = s.rings[smp.ring];
  const Ring& r = s.polygon.ring(smp.ring);
  const std::size_t n = r.size();
  auto it = std::upper_bound(br.vertex_sample.begin(), br.vertex_sample.end(), sid);
  const std::size_t v = it == br.vertex_sample.begin() ? n - 1 : static_cast<std::size_t>(it - br.vertex_sample.begin()) - 1;
  Point2 best = smp.p;
  double best_d = tol;
  for (std::size_t k : {v + n - 1, v, v + 1}) {
    const Point2 a = r[k % n], b = r[(k + 1) % n];
    const Vec2 d = b - a;
    const double t = std::clamp(dot(from - a, d) / dot(d, d), 0.0, 1.0);
    const Point2 foot = a + d * t;
    // Only true perpendicular feet (or vertices) count.
    const bool vertex = t == 0.0 || t == 1.0;
    if (!vertex && std::abs(dot(from - foot, d)) > 1e-9 * norm(d) * (1.0 + distance(from, foot))) continue;
    if (const double dd = distance(foot, smp.p); dd < best_d) best_d = dd, best = foot;
  }
  return best;
}

inline ConcaveCorner make_corner(const ShapeModel& s, std::uint32_t ring, std::uint32_t v, Point2 end_vertex) {
  const Ring& r = s.polygon.ring(ring);
  const std::size_t n = r.size();
  ConcaveCorner c;
  c.boundary_point = r[v];
  c.exterior_end_vertex = end_vertex;
  c.ring = ring;
  c.vertex = v;
  c.sample = s.rings[ring].vertex_sample[v];
  c.to_next = normalized(r[(v + 1) % n] - r[v]);
  c.to_prev = normalized(r[(v + n - 1) % n] - r[v]);
  c.opening = ccw_angle(c.to_next, c.to_prev);
  return c;
}

}  // namespace detail

// One corner per exterior end vertex whose projections straddle a reflex
// polygon vertex.
inline std::vector<ConcaveCorner> find_concave_corners(const ShapeModel& s, const MedialAxisGraph& ext) {
  std::vector<ConcaveCorner> out;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (auto ev : ext.end_vertices) {
    const auto& nd = ext.nodes[ev];
    std::vector<std::uint32_t> sites;
    for (auto id : nd.sites)
      if (id < ext.site_limit) sites.push_back(id);
    // Extreme same-ring pair.
    std::optional<std::pair<std::uint32_t, std::uint32_t>> pair;
    std::size_t best_gap = 0;
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (std::size_t j = i + 1; j < sites.size(); ++j) {
        if (s.samples[sites[i]].ring != s.samples[sites[j]].ring) continue;
        const std::size_t gap = s.index_gap(sites[i], sites[j]);
        if (gap > best_gap) best_gap = gap, pair = std::make_pair(sites[i], sites[j]);
      }
    if (!pair) continue;
    const std::uint32_t ring = s.samples[pair->first].ring;
    const auto& br = s.rings[ring];
    const std::size_t n = br.samples.size();
    // Walk the shorter index arc, with one sample of slack on both sides.
    std::size_t ia = s.samples[pair->first].index, ib = s.samples[pair->second].index;
    std::size_t fwd = (ib + n - ia) % n;
    if (fwd > n - fwd) std::swap(ia, ib), fwd = n - fwd;
    const Ring& r = s.polygon.ring(ring);
    std::optional<std::uint32_t> best_v;
    double best_turn = -kConvexEps;
    for (std::size_t k = 0; k <= fwd + 2; ++k) {
      const std::size_t idx = (ia + n - 1 + k) % n;
      const std::uint32_t sid = br.samples[idx];
      const auto it = std::lower_bound(br.vertex_sample.begin(), br.vertex_sample.end(), sid);
      if (it == br.vertex_sample.end() || *it != sid) continue;
      const auto v = static_cast<std::uint32_t>(it - br.vertex_sample.begin());
      const double t = turn_angle(r, v);
      if (t < best_turn) best_turn = t, best_v = v;
    }
    if (!best_v) continue;
    if (!seen.insert({ring, *best_v}).second) continue;
    out.push_back(detail::make_corner(s, ring, *best_v, nd.p));
  }
  std::sort(out.begin(), out.end(), [](const ConcaveCorner& a, const ConcaveCorner& b) {
    return a.ring != b.ring ? a.ring < b.ring : a.vertex < b.vertex;
  });
  return out;
}

// Cuts from each corner to the far-side projections of the interior medial
// points that have the corner as a projection.
inline std::vector<CandidateCut> generate_raw_cuts(const ShapeModel& s, const MedialAxisGraph& interior,
                                                   const std::vector<ConcaveCorner>& corners,
                                                   Warnings* warnings = nullptr) {
  std::vector<CandidateCut> out;
  if (interior.empty()) return out;
  const double tol = 2.0;
  for (std::uint32_t ci = 0; ci < corners.size(); ++ci) {
    const auto& c = corners[ci];
    const Point2 C = c.boundary_point;
    auto touches = [&](std::uint32_t n) {
      return std::abs(distance(interior.nodes[n].p, C) - interior.nodes[n].radius) <= tol;
    };
    // Seed: the graph point nearest the corner.
    const MedialLocation loc = interior.nearest(C);
    std::uint32_t seed;
    if (loc.edge == std::numeric_limits<std::uint32_t>::max()) {
      seed = 0;
      for (std::uint32_t n = 0; n < interior.nodes.size(); ++n)
        if (distance(interior.nodes[n].p, C) < distance(interior.nodes[seed].p, C)) seed = n;
    } else {
      const auto& e = interior.edges[loc.edge];
      seed = loc.t <= 0.5 ? e.a : e.b;
    }
    std::vector<char> visited(interior.nodes.size(), 0);
    std::queue<std::uint32_t> q;
    q.push(seed);
    visited[seed] = 1;
    std::vector<CandidateCut> mine;
    while (!q.empty()) {
      const auto n = q.front();
      q.pop();
      if (touches(n)) {
        for (auto sid : interior.nodes[n].sites) {
          if (sid >= interior.site_limit) continue;
          if (s.boundary_distance(sid, c.sample) <= 2.0 * tol) continue;  // the corner's own cluster
          CandidateCut cut;
          cut.start = C;
          cut.end = detail::refine_cut_end(s, C, sid, tol);
          cut.end_sample = sid;
          cut.corner = ci;
          for (std::uint32_t cj = 0; cj < corners.size(); ++cj)
            if (cj != ci && distance(corners[cj].boundary_point, cut.end) <= tol) {
              cut.end = corners[cj].boundary_point;
              cut.end_sample = corners[cj].sample;
              cut.end_corner = cj;
            }
          cut.length = distance(cut.start, cut.end);
          cut.arc_length = s.boundary_distance(c.sample, cut.end_sample);
          cut.protrusion = std::isfinite(cut.arc_length) ? cut.length / cut.arc_length : 0.0;
          if (cut.length <= tol || cut.protrusion >= 1.0 - 1e-9) continue;
          bool dup = false;
          for (const auto& m : mine)
            if (distance(m.end, cut.end) <= tol) { dup = true; break; }
          if (dup) continue;
          if (!detail::cut_inside(s, cut.start, cut.end)) continue;
          mine.push_back(cut);
        }
      }
      for (auto e : interior.adjacency[n]) {
        const auto o = interior.edges[e].a == n ? interior.edges[e].b : interior.edges[e].a;
        if (!visited[o] && (touches(o) || n == seed)) {
          visited[o] = 1;
          q.push(o);
        }
      }
    }
    if (mine.empty() && warnings)
      warnings->push_back({WarningCode::CornerUnresolvable, "no valid cut for a concave corner"});
    for (auto& m : mine) {
      // Same segment already emitted from the other end.
      bool dup = false;
      for (const auto& o : out)
        if ((distance(o.start, m.end) <= tol && distance(o.end, m.start) <= tol)) { dup = true; break; }
      if (!dup) out.push_back(m);
    }
  }
  return out;
}

inline std::vector<CandidateCut> filter_by_protrusion(const std::vector<CandidateCut>& cuts, double tau_p) {
  std::vector<CandidateCut> out;
  for (const auto& c : cuts)
    if (c.protrusion <= tau_p) out.push_back(c);
  return out;
}

// Shortest cuts first (then lower protrusion); a cut is accepted when it
// resolves a still-unresolved corner without crossing an accepted cut.
inline std::vector<CandidateCut> select_cuts_greedy(const std::vector<CandidateCut>& cuts,
                                                    const std::vector<ConcaveCorner>& corners,
                                                    Warnings* warnings = nullptr) {
  std::vector<std::size_t> order(cuts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cuts[a].length != cuts[b].length) return cuts[a].length < cuts[b].length;
    return cuts[a].protrusion < cuts[b].protrusion;
  });
  std::vector<std::vector<Vec2>> dirs(corners.size());
  std::vector<char> resolved(corners.size(), 0);
  std::vector<CandidateCut> accepted;
  for (auto i : order) {
    if (std::all_of(resolved.begin(), resolved.end(), [](char r) { return r != 0; })) break;
    const auto& c = cuts[i];
    bool crosses = false;
    for (const auto& a : accepted)
      if (segments_cross(c.start, c.end, a.start, a.end, 1e-12)) { crosses = true; break; }
    if (crosses) continue;
    const Vec2 d = normalized(c.end - c.start);
    bool helps = false;
    auto test = [&](std::uint32_t k, Vec2 dir) {
      if (resolved[k]) return;
      auto trial = dirs[k];
      trial.push_back(dir);
      if (detail::corner_resolved(corners[k], trial)) helps = true;
    };
    test(c.corner, d);
    if (c.end_corner) test(*c.end_corner, -d);
    if (!helps) continue;
    accepted.push_back(c);
    dirs[c.corner].push_back(d);
    resolved[c.corner] = detail::corner_resolved(corners[c.corner], dirs[c.corner]);
    if (c.end_corner) {
      dirs[*c.end_corner].push_back(-d);
      resolved[*c.end_corner] = detail::corner_resolved(corners[*c.end_corner], dirs[*c.end_corner]);
    }
  }
  if (warnings && std::any_of(resolved.begin(), resolved.end(), [](char r) { return r == 0; }))
    warnings->push_back({WarningCode::NonConvexResidual, "some concave corners stay unresolved after greedy selection"});
  return accepted;
}

struct Decomposition {
  std::vector<Patch> patches;
  std::vector<ConcaveCorner> corners;
  std::vector<CandidateCut> raw_cuts;
  std::vector<CandidateCut> filtered_cuts;
  std::vector<CandidateCut> selected_cuts;
  std::size_t forced_splits = 0;
};

namespace detail {

inline std::vector<Patch> patches_from_subdivision(const PlanarSubdivision& g, double total_area) {
  std::vector<Patch> out;
  for (const auto& f : g.faces()) {
    Ring r = g.face_ring(f);
    r = dedupe_ring(r, 1e-9 * (1.0 + bbox_of(r).diagonal()));
    r = remove_collinear(r, kConvexEps);
    if (r.size() < 3 || signed_area(r) <= 0.0) continue;
    Patch p;
    p.polygon.vertices = std::move(r);
    p.convex = f.holes.empty() && p.polygon.is_convex();
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const Patch& a, const Patch& b) {
    const Point2 ca = a.polygon.centroid(), cb = b.polygon.centroid();
    return ca.x != cb.x ? ca.x < cb.x : ca.y < cb.y;
  });
  for (std::uint32_t i = 0; i < out.size(); ++i) {
    out[i].id = i;
    out[i].area_share = out[i].polygon.area() / total_area;
  }
  return out;
}

}  // namespace detail

inline Decomposition decompose(const ShapeModel& s, const MedialAxisGraph& interior, const MedialAxisGraph& exterior,
                               double tau_p = kDefaultTauP, Warnings* warnings = nullptr) {
  if (!(tau_p > 0.0 && tau_p <= 1.0)) throw Error(ErrorCode::PreconditionViolated, "tau_p must lie in (0, 1]");
  Decomposition d;
  d.corners = find_concave_corners(s, exterior);
  d.raw_cuts = generate_raw_cuts(s, interior, d.corners, warnings);
  d.filtered_cuts = filter_by_protrusion(d.raw_cuts, tau_p);
  Warnings local;
  d.selected_cuts = select_cuts_greedy(d.filtered_cuts, d.corners, &local);
  PlanarSubdivision g(1e-7 * s.diagonal());
  for (std::uint32_t k = 0; k < s.polygon.ring_count(); ++k) g.add_ring(s.polygon.ring(k));
  for (const auto& c : d.selected_cuts) g.add_cut(c.start, c.end);
  d.forced_splits = force_convex(g).splits;
  if (warnings) {
    if (d.forced_splits > 0 || !local.empty())
      warnings->push_back({WarningCode::NonConvexResidual,
                           "residual reflex vertices were split along their bisectors (" +
                               std::to_string(d.forced_splits) + " splits)"});
  }
  d.patches = detail::patches_from_subdivision(g, s.polygon.area());
  return d;
}

inline Decomposition decompose(const ShapeModel& s, double tau_p = kDefaultTauP, Warnings* warnings = nullptr) {
  const auto interior = medial_axis(s, AxisKind::Interior, warnings);
  const auto exterior = medial_axis(s, AxisKind::Exterior);
  return decompose(s, interior, exterior, tau_p, warnings);
}

// ---------------------------------------------------------------------------
// Merging

namespace detail {

// Union boundary of two CCW polygons sharing boundary pieces; returns the
// merged ring and the shared length (0 if they do not share an edge).
inline std::pair<Ring, double> union_adjacent(const Ring& A, const Ring& B, double eps) {
  struct DirEdge {
    Point2 a, b;
  };
  auto split_edges = [&](const Ring& R, const Ring& other) {
    std::vector<DirEdge> es;
    for (std::size_t i = 0, n = R.size(); i < n; ++i) {
      const Point2 a = R[i], b = R[(i + 1) % n];
      std::vector<std::pair<double, Point2>> cuts;
      const Vec2 d = b - a;
      const double l2 = dot(d, d);
      for (auto p : other) {
        const double t = dot(p - a, d) / l2;
        if (t > 0.0 && t < 1.0 && point_segment_distance(p, a, b) <= eps && distance(p, a) > eps && distance(p, b) > eps)
          cuts.push_back({t, p});
      }
      std::sort(cuts.begin(), cuts.end(), [](auto& x, auto& y) { return x.first < y.first; });
      Point2 prev = a;
      for (auto& [t, p] : cuts) es.push_back({prev, p}), prev = p;
      es.push_back({prev, b});
    }
    return es;
  };
  auto ea = split_edges(A, B);
  auto eb = split_edges(B, A);
  std::vector<char> ka(ea.size(), 1), kb(eb.size(), 1);
  double shared = 0.0;
  for (std::size_t i = 0; i < ea.size(); ++i)
    for (std::size_t j = 0; j < eb.size(); ++j)
      if (kb[j] && distance(ea[i].a, eb[j].b) <= eps && distance(ea[i].b, eb[j].a) <= eps) {
        ka[i] = kb[j] = 0;
        shared += distance(ea[i].a, ea[i].b);
        break;
      }
  if (shared <= 0.0) return {{}, 0.0};
  std::vector<DirEdge> rest;
  for (std::size_t i = 0; i < ea.size(); ++i)
    if (ka[i]) rest.push_back(ea[i]);
  for (std::size_t j = 0; j < eb.size(); ++j)
    if (kb[j]) rest.push_back(eb[j]);
  Ring out;
  std::vector<char> used(rest.size(), 0);
  std::size_t cur = 0;
  for (std::size_t step = 0; step < rest.size(); ++step) {
    used[cur] = 1;
    out.push_back(rest[cur].a);
    std::optional<std::size_t> nxt;
    for (std::size_t k = 0; k < rest.size(); ++k)
      if (!used[k] && distance(rest[k].a, rest[cur].b) <= eps) { nxt = k; break; }
    if (!nxt) break;
    cur = *nxt;
  }
  out = dedupe_ring(out, eps);
  out = remove_collinear(out, kConvexEps);
  return {out, shared};
}

}  // namespace detail

// Merges the smallest patch into its neighbour with the longest shared
// boundary until at most max(1, n_images) patches remain.
inline std::vector<Patch> merge_small_patches(std::vector<Patch> patches, std::size_t n_images,
                                              Warnings* warnings = nullptr) {
  if (n_images < 1) throw Error(ErrorCode::PreconditionViolated, "need at least one image");
  double total = 0.0;
  for (const auto& p : patches) total += p.polygon.area();
  BBox box;
  for (const auto& p : patches)
    for (auto v : p.polygon.vertices) box.expand(v);
  const double eps = 1e-7 * std::max(1.0, box.diagonal());
  bool flagged = false;
  while (patches.size() > std::max<std::size_t>(1, n_images)) {
    std::vector<std::size_t> order(patches.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return patches[a].polygon.area() < patches[b].polygon.area(); });
    bool merged = false;
    for (auto small : order) {
      std::optional<std::size_t> best;
      double best_shared = 0.0;
      Ring best_ring;
      for (std::size_t j = 0; j < patches.size(); ++j) {
        if (j == small) continue;
        auto [ring, shared] = detail::union_adjacent(patches[small].polygon.vertices, patches[j].polygon.vertices, eps);
        if (shared > best_shared && ring.size() >= 3) best = j, best_shared = shared, best_ring = std::move(ring);
      }
      if (!best) continue;
      Patch& keep = patches[*best];
      keep.polygon.vertices = std::move(best_ring);
      keep.convex = keep.polygon.is_convex();
      if (!keep.convex) flagged = true;
      patches.erase(patches.begin() + static_cast<std::ptrdiff_t>(small));
      merged = true;
      break;
    }
    if (!merged) break;  // no two patches touch
  }
  if (flagged && warnings) warnings->push_back({WarningCode::NonConvexMerge, "merged patch is not convex"});
  for (std::uint32_t i = 0; i < patches.size(); ++i) {
    patches[i].id = i;
    patches[i].area_share = patches[i].polygon.area() / total;
  }
  return patches;
}

}  // namespace collage
