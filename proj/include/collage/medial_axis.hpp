#pragma once

// Medial axis of a sampled boundary. The Voronoi diagram of the boundary
// samples is filtered to edges whose generating samples are not neighbours
// along the boundary and that lie inside the shape (interior axis) or inside
// the padded complement (exterior axis). Short noise spurs are pruned.

#include <boost/polygon/voronoi.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <unordered_map>
#include <vector>

#include "collage/errors.hpp"
#include "collage/geometry.hpp"
#include "collage/shape_model.hpp"

namespace collage {

enum class AxisKind { Interior, Exterior };

struct Frame {
  Vec2 axial{1.0, 0.0};
  Vec2 crosswise{0.0, 1.0};
};

// A point on the graph: edge `edge` at parameter t from its `a` node.
struct MedialLocation {
  Point2 p;
  std::uint32_t edge = 0;
  double t = 0.0;
  std::uint32_t chain = 0;
  double arc = 0.0;  // distance from the chain start
  double distance = 0.0;
};

class MedialAxisGraph {
 public:
  struct Node {
    Point2 p;
    double radius = 0.0;
    std::vector<std::uint32_t> sites;  // generating boundary samples (ids >= site_limit are padding)
  };
  struct Edge {
    std::uint32_t a = 0, b = 0;
    double length = 0.0;
    std::uint32_t chain = 0;
    bool forward = true;  // a -> b follows the chain order
  };
  struct Chain {
    std::vector<std::uint32_t> nodes;
    std::vector<std::uint32_t> edges;
    std::vector<double> cum;  // arc length at each node
    bool cycle = false;
    double length() const { return cum.empty() ? 0.0 : cum.back(); }
  };

  AxisKind kind = AxisKind::Interior;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<std::vector<std::uint32_t>> adjacency;  // node -> incident edge ids
  std::vector<Chain> chains;
  std::vector<std::uint32_t> end_vertices;  // degree-one nodes
  std::uint32_t site_limit = 0;             // ids below this are shape samples
  double diagonal = 1.0;

  bool empty() const { return nodes.empty(); }
  std::size_t degree(std::uint32_t n) const { return adjacency[n].size(); }

  // Test helper: a graph from explicit points and edges.
  static MedialAxisGraph from_edges(const std::vector<Point2>& pts,
                                    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& es,
                                    double diag = 1.0) {
    MedialAxisGraph g;
    g.diagonal = diag;
    for (auto p : pts) g.nodes.push_back({p, 0.0, {}});
    for (auto [a, b] : es) g.edges.push_back({a, b, distance(pts[a], pts[b]), 0, true});
    g.finalize();
    return g;
  }

  // Rebuilds adjacency, chains, end vertices and the edge index.
  void finalize() {
    adjacency.assign(nodes.size(), {});
    for (std::uint32_t e = 0; e < edges.size(); ++e) {
      adjacency[edges[e].a].push_back(e);
      adjacency[edges[e].b].push_back(e);
    }
    end_vertices.clear();
    for (std::uint32_t n = 0; n < nodes.size(); ++n)
      if (adjacency[n].size() == 1) end_vertices.push_back(n);
    build_chains();
    build_index();
  }

  // Closest graph point; ties by lowest chain index, then lowest arc.
  MedialLocation nearest(Point2 z) const {
    if (nodes.empty()) throw Error(ErrorCode::PreconditionViolated, "medial graph is empty");
    MedialLocation best;
    best.distance = std::numeric_limits<double>::infinity();
    auto consider = [&](std::uint32_t e) {
      const MedialLocation loc = locate_on_edge(e, z);
      if (loc.distance < best.distance ||
          (loc.distance == best.distance &&
           (loc.chain < best.chain || (loc.chain == best.chain && loc.arc < best.arc))))
        best = loc;
    };
    if (edges.empty()) {
      // Isolated nodes only.
      std::uint32_t bn = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::uint32_t n = 0; n < nodes.size(); ++n)
        if (double d = distance(nodes[n].p, z); d < bd) bd = d, bn = n;
      best.p = nodes[bn].p;
      best.distance = bd;
      best.edge = std::numeric_limits<std::uint32_t>::max();
      best.chain = std::numeric_limits<std::uint32_t>::max();
      return best;
    }
    auto [cx, cy] = cell_of(z);
    const int max_ring = std::max(nx_, ny_) + 1;
    for (int r = 0; r <= max_ring; ++r) {
      if (r > 0 && (r - 1) * cell_ > best.distance) break;
      visit_ring(cx, cy, r, consider);
    }
    return best;
  }

  // Point at arc length s along a chain (clamped; wraps on cycles).
  Point2 point_at(std::uint32_t chain, double s) const {
    const Chain& c = chains[chain];
    const double L = c.length();
    if (c.nodes.size() == 1 || L <= 0.0) return nodes[c.nodes.front()].p;
    if (c.cycle) {
      s = std::fmod(s, L);
      if (s < 0.0) s += L;
    } else {
      s = std::clamp(s, 0.0, L);
    }
    const auto it = std::upper_bound(c.cum.begin(), c.cum.end(), s);
    std::size_t i = it == c.cum.begin() ? 0 : static_cast<std::size_t>(it - c.cum.begin()) - 1;
    if (i + 1 >= c.nodes.size()) i = c.nodes.size() - 2;
    const double seg = c.cum[i + 1] - c.cum[i];
    const double t = seg > 0.0 ? (s - c.cum[i]) / seg : 0.0;
    return nodes[c.nodes[i]].p + (nodes[c.nodes[i + 1]].p - nodes[c.nodes[i]].p) * t;
  }

  // Axial / crosswise frame at the graph point nearest z.
  Frame direction_at(Point2 z) const {
    const MedialLocation loc = nearest(z);
    const double window = 2.0;  // half-width, canvas cells
    if (loc.chain < chains.size() && chains[loc.chain].length() >= 2.0 * window) {
      const Vec2 d = point_at(loc.chain, loc.arc + window) - point_at(loc.chain, loc.arc - window);
      if (norm(d) > 1e-12) {
        const Vec2 a = normalized(d);
        return {a, perp(a)};
      }
    }
    return principal_frame(loc.p);
  }

  // Principal direction of graph nodes within 5% of the diagonal.
  Frame principal_frame(Point2 c) const {
    const double r = 0.05 * diagonal;
    double sx = 0, sy = 0, n = 0;
    for (const auto& nd : nodes)
      if (distance(nd.p, c) <= r) sx += nd.p.x, sy += nd.p.y, n += 1;
    if (n < 2) return {};
    const double mx = sx / n, my = sy / n;
    double cxx = 0, cxy = 0, cyy = 0;
    for (const auto& nd : nodes)
      if (distance(nd.p, c) <= r) {
        const double dx = nd.p.x - mx, dy = nd.p.y - my;
        cxx += dx * dx, cxy += dx * dy, cyy += dy * dy;
      }
    if (cxx + cyy <= 1e-18) return {};
    // Largest eigenvector of [[cxx, cxy], [cxy, cyy]].
    const double theta = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);
    const Vec2 a{std::cos(theta), std::sin(theta)};
    return {a, perp(a)};
  }

  // Shortest path length along the graph; +inf when disconnected.
  double geodesic(const MedialLocation& m1, const MedialLocation& m2) const {
    constexpr auto none = std::numeric_limits<std::uint32_t>::max();
    if (m1.edge == none || m2.edge == none)
      return distance(m1.p, m2.p) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(nodes.size(), inf);
    using QE = std::pair<double, std::uint32_t>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    auto seed = [&](std::uint32_t n, double d) {
      if (d < dist[n]) dist[n] = d, pq.push({d, n});
    };
    const Edge& e1 = edges[m1.edge];
    seed(e1.a, m1.t * e1.length);
    seed(e1.b, (1.0 - m1.t) * e1.length);
    while (!pq.empty()) {
      auto [d, n] = pq.top();
      pq.pop();
      if (d > dist[n]) continue;
      for (auto e : adjacency[n]) {
        const std::uint32_t o = edges[e].a == n ? edges[e].b : edges[e].a;
        if (d + edges[e].length < dist[o]) dist[o] = d + edges[e].length, pq.push({dist[o], o});
      }
    }
    const Edge& e2 = edges[m2.edge];
    double best = std::min(dist[e2.a] + m2.t * e2.length, dist[e2.b] + (1.0 - m2.t) * e2.length);
    if (m1.edge == m2.edge) best = std::min(best, std::abs(m1.t - m2.t) * e1.length);
    return best;
  }

  MedialLocation location_of_node(std::uint32_t n) const {
    MedialLocation loc;
    loc.p = nodes[n].p;
    if (adjacency[n].empty()) {
      loc.edge = loc.chain = std::numeric_limits<std::uint32_t>::max();
      return loc;
    }
    // Lowest chain among incident edges.
    std::uint32_t be = adjacency[n].front();
    for (auto e : adjacency[n])
      if (edges[e].chain < edges[be].chain) be = e;
    loc = locate_on_edge(be, nodes[n].p);
    return loc;
  }

 private:
  MedialLocation locate_on_edge(std::uint32_t e, Point2 z) const {
    const Edge& ed = edges[e];
    const Point2 a = nodes[ed.a].p, b = nodes[ed.b].p;
    const Vec2 ab = b - a;
    const double l2 = dot(ab, ab);
    const double t = l2 > 0.0 ? std::clamp(dot(z - a, ab) / l2, 0.0, 1.0) : 0.0;
    MedialLocation loc;
    loc.p = a + ab * t;
    loc.edge = e;
    loc.t = t;
    loc.chain = ed.chain;
    loc.distance = distance(loc.p, z);
    const Chain& c = chains[ed.chain];
    // Position of this edge inside its chain.
    const auto pos = edge_pos_[e];
    loc.arc = ed.forward ? c.cum[pos] + t * ed.length : c.cum[pos] + (1.0 - t) * ed.length;
    return loc;
  }

  void build_chains() {
    chains.clear();
    edge_pos_.assign(edges.size(), 0);
    std::vector<char> used(edges.size(), 0);
    auto walk = [&](std::uint32_t start, std::uint32_t first_edge, bool cycle) {
      Chain c;
      c.cycle = cycle;
      c.nodes.push_back(start);
      c.cum.push_back(0.0);
      std::uint32_t cur = start, e = first_edge;
      const auto id = static_cast<std::uint32_t>(chains.size());
      while (true) {
        used[e] = 1;
        Edge& ed = edges[e];
        const std::uint32_t nxt = ed.a == cur ? ed.b : ed.a;
        ed.forward = ed.a == cur;
        ed.chain = id;
        edge_pos_[e] = static_cast<std::uint32_t>(c.edges.size());
        c.edges.push_back(e);
        c.nodes.push_back(nxt);
        c.cum.push_back(c.cum.back() + ed.length);
        cur = nxt;
        if (adjacency[cur].size() != 2 || cur == start) break;
        const std::uint32_t ne = adjacency[cur][0] == e ? adjacency[cur][1] : adjacency[cur][0];
        if (used[ne]) break;
        e = ne;
      }
      chains.push_back(std::move(c));
    };
    for (std::uint32_t n = 0; n < nodes.size(); ++n) {
      if (adjacency[n].size() == 2) continue;
      if (adjacency[n].empty()) {
        Chain c;
        c.nodes.push_back(n);
        c.cum.push_back(0.0);
        chains.push_back(std::move(c));
        continue;
      }
      for (auto e : adjacency[n])
        if (!used[e]) walk(n, e, false);
    }
    for (std::uint32_t e = 0; e < edges.size(); ++e)
      if (!used[e]) walk(std::min(edges[e].a, edges[e].b), e, true);
  }

  void build_index() {
    BBox box;
    for (const auto& n : nodes) box.expand(n.p);
    if (box.empty()) box.expand({0, 0});
    origin_ = box.min;
    cell_ = std::max(4.0, 0.01 * diagonal);
    nx_ = std::max(1, static_cast<int>(std::ceil(box.width() / cell_)) + 1);
    ny_ = std::max(1, static_cast<int>(std::ceil(box.height() / cell_)) + 1);
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (std::uint32_t e = 0; e < edges.size(); ++e) {
      const Point2 a = nodes[edges[e].a].p, b = nodes[edges[e].b].p;
      auto [x0, y0] = cell_of({std::min(a.x, b.x), std::min(a.y, b.y)});
      auto [x1, y1] = cell_of({std::max(a.x, b.x), std::max(a.y, b.y)});
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) buckets_[static_cast<std::size_t>(y) * nx_ + x].push_back(e);
    }
  }

  std::pair<int, int> cell_of(Point2 p) const {
    return {std::clamp(static_cast<int>(std::floor((p.x - origin_.x) / cell_)), 0, nx_ - 1),
            std::clamp(static_cast<int>(std::floor((p.y - origin_.y) / cell_)), 0, ny_ - 1)};
  }
  template <class F>
  void visit_ring(int cx, int cy, int r, F&& f) const {
    auto cellv = [&](int x, int y) {
      if (x < 0 || y < 0 || x >= nx_ || y >= ny_) return;
      for (auto e : buckets_[static_cast<std::size_t>(y) * nx_ + x]) f(e);
    };
    if (r == 0) return cellv(cx, cy);
    for (int x = cx - r; x <= cx + r; ++x) cellv(x, cy - r), cellv(x, cy + r);
    for (int y = cy - r + 1; y <= cy + r - 1; ++y) cellv(cx - r, y), cellv(cx + r, y);
  }

  std::vector<std::uint32_t> edge_pos_;
  double cell_ = 4.0;
  Point2 origin_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

template <class F>
concept DirectionField = requires(const F& f, Point2 p) {
  { f(p) } -> std::convertible_to<Frame>;
};

class MedialDirectionField {
 public:
  explicit MedialDirectionField(const MedialAxisGraph& g) : g_(&g) {}
  explicit MedialDirectionField(MedialAxisGraph&&) = delete;  // would dangle
  Frame operator()(Point2 p) const { return g_->direction_at(p); }

 private:
  const MedialAxisGraph* g_;
};

class ConstantDirectionField {
 public:
  explicit ConstantDirectionField(Vec2 axial = {1.0, 0.0}) : f_{normalized(axial), perp(normalized(axial))} {}
  Frame operator()(Point2) const { return f_; }

 private:
  Frame f_;
};

// ---------------------------------------------------------------------------
// Construction

struct MedialAxisOptions {
  double spur_radius_fraction = 0.01;  // of the canvas diagonal
  double corner_gap_degrees = 30.0;
  double padding_fraction = 0.25;
  double site_scale = 256.0;  // integer grid used by the Voronoi builder
};

namespace detail {

// Largest angle subtended at p by any two of the given sites.
inline double max_site_gap(Point2 p, const std::vector<Point2>& sites) {
  double best = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      const Vec2 a = sites[i] - p, b = sites[j] - p;
      if (norm(a) == 0.0 || norm(b) == 0.0) continue;
      best = std::max(best, std::acos(std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0)));
    }
  return best;
}

}  // namespace detail

inline std::vector<Point2> padding_box_sites(const ShapeModel& s, double fraction, BBox* out_box = nullptr) {
  const double pad = fraction * s.diagonal();
  BBox box;
  box.expand({-pad, -pad});
  box.expand({s.mask.width() + pad, s.mask.height() + pad});
  if (out_box) *out_box = box;
  const Ring r{box.min, {box.max.x, box.min.y}, box.max, {box.min.x, box.max.y}};
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2 a = r[i], b = r[(i + 1) % 4];
    const int steps = std::max(1, static_cast<int>(std::ceil(distance(a, b) / 2.0)));
    for (int j = 0; j < steps; ++j) pts.push_back(a + (b - a) * (double(j) / steps));
  }
  return pts;
}

inline MedialAxisGraph medial_axis(const ShapeModel& s, AxisKind kind, Warnings* warnings = nullptr,
                                   const MedialAxisOptions& opt = {}) {
  namespace bp = boost::polygon;
  MedialAxisGraph g;
  g.kind = kind;
  g.diagonal = s.diagonal();
  g.site_limit = static_cast<std::uint32_t>(s.samples.size());

  std::vector<Point2> site_pos;
  site_pos.reserve(s.samples.size());
  for (const auto& smp : s.samples) site_pos.push_back(smp.p);
  BBox pad_box;
  if (kind == AxisKind::Exterior) {
    const auto box_pts = padding_box_sites(s, opt.padding_fraction, &pad_box);
    site_pos.insert(site_pos.end(), box_pts.begin(), box_pts.end());
  }

  // Integer sites; duplicates collapse onto their first occurrence.
  std::vector<bp::point_data<int>> ipts;
  std::vector<std::uint32_t> input_to_site;
  {
    std::map<std::pair<std::int64_t, std::int64_t>, std::uint32_t> seen;
    for (std::uint32_t i = 0; i < site_pos.size(); ++i) {
      const auto key = std::make_pair(std::llround(site_pos[i].x * opt.site_scale), std::llround(site_pos[i].y * opt.site_scale));
      if (seen.emplace(key, i).second) {
        ipts.emplace_back(static_cast<int>(key.first), static_cast<int>(key.second));
        input_to_site.push_back(i);
      }
    }
  }
  bp::voronoi_diagram<double> vd;
  bp::construct_voronoi(ipts.begin(), ipts.end(), &vd);

  auto is_shape_site = [&](std::uint32_t id) { return id < g.site_limit; };
  auto non_adjacent = [&](std::uint32_t i, std::uint32_t j) {
    if (!is_shape_site(i) || !is_shape_site(j)) return is_shape_site(i) || is_shape_site(j);
    if (s.samples[i].ring != s.samples[j].ring) return true;
    return s.index_gap(i, j) > 2;
  };
  auto keep_point = [&](Point2 p) {
    if (kind == AxisKind::Interior) return s.polygon.contains(p);
    return !s.polygon.contains(p) && p.x > pad_box.min.x && p.y > pad_box.min.y && p.x < pad_box.max.x &&
           p.y < pad_box.max.y;
  };

  std::unordered_map<const void*, std::uint32_t> vmap;
  auto node_for = [&](const bp::voronoi_vertex<double>* v) -> std::uint32_t {
    auto it = vmap.find(v);
    if (it != vmap.end()) return it->second;
    const Point2 p{v->x() / opt.site_scale, v->y() / opt.site_scale};
    MedialAxisGraph::Node nd;
    nd.p = p;
    const auto* e = v->incident_edge();
    do {
      nd.sites.push_back(input_to_site[e->cell()->source_index()]);
      e = e->rot_next();
    } while (e != v->incident_edge());
    std::sort(nd.sites.begin(), nd.sites.end());
    nd.sites.erase(std::unique(nd.sites.begin(), nd.sites.end()), nd.sites.end());
    nd.radius = distance(site_pos[nd.sites.front()], p);
    const auto id = static_cast<std::uint32_t>(g.nodes.size());
    g.nodes.push_back(std::move(nd));
    vmap.emplace(v, id);
    return id;
  };

  std::vector<std::pair<std::uint32_t, std::uint32_t>> raw;
  for (const auto& e : vd.edges()) {
    if (&e > e.twin()) continue;  // each undirected edge once
    if (!e.is_finite() || !e.is_primary()) continue;
    const std::uint32_t si = input_to_site[e.cell()->source_index()];
    const std::uint32_t sj = input_to_site[e.twin()->cell()->source_index()];
    if (!non_adjacent(si, sj)) continue;
    const Point2 a{e.vertex0()->x() / opt.site_scale, e.vertex0()->y() / opt.site_scale};
    const Point2 b{e.vertex1()->x() / opt.site_scale, e.vertex1()->y() / opt.site_scale};
    if (!keep_point((a + b) * 0.5)) continue;
    const auto na = node_for(e.vertex0()), nb = node_for(e.vertex1());
    if (na != nb) raw.emplace_back(std::min(na, nb), std::max(na, nb));
  }
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  for (auto [a, b] : raw) g.edges.push_back({a, b, distance(g.nodes[a].p, g.nodes[b].p), 0, true});

  // Spur pruning on the adjacency structure.
  const double spur_r = opt.spur_radius_fraction * g.diagonal;
  const double gap_min = opt.corner_gap_degrees * std::numbers::pi / 180.0;
  std::vector<char> edge_alive(g.edges.size(), 1);
  std::vector<std::vector<std::uint32_t>> adj(g.nodes.size());
  for (std::uint32_t e = 0; e < g.edges.size(); ++e) adj[g.edges[e].a].push_back(e), adj[g.edges[e].b].push_back(e);
  auto live_deg = [&](std::uint32_t n) {
    std::size_t d = 0;
    for (auto e : adj[n]) d += edge_alive[e];
    return d;
  };
  auto site_points = [&](std::uint32_t n) {
    std::vector<Point2> pts;
    for (auto sid : g.nodes[n].sites) pts.push_back(site_pos[sid]);
    return pts;
  };
  auto end_residual = [&](std::uint32_t n) {
    double best = 0.0;
    const auto& st = g.nodes[n].sites;
    for (std::size_t i = 0; i < st.size(); ++i)
      for (std::size_t j = i + 1; j < st.size(); ++j)
        if (is_shape_site(st[i]) && is_shape_site(st[j])) {
          const double cr = chord_residual(s, st[i], st[j]);
          if (std::isfinite(cr)) best = std::max(best, cr);
        }
    return best;
  };
  // Small radius, or a nearly straight boundary between the node's sites; a
  // genuine corner never qualifies.
  auto prunable = [&](std::uint32_t v) {
    if (g.nodes[v].radius >= spur_r && end_residual(v) >= spur_r) return false;
    return detail::max_site_gap(g.nodes[v].p, site_points(v)) <= gap_min;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t v = 0; v < g.nodes.size(); ++v) {
      if (live_deg(v) != 1 || !prunable(v)) continue;
      // Walk to the next branching node.
      std::vector<std::uint32_t> path_edges;
      std::uint32_t cur = v, prev_e = std::numeric_limits<std::uint32_t>::max();
      while (true) {
        std::uint32_t next_e = prev_e;
        for (auto e : adj[cur])
          if (edge_alive[e] && e != prev_e) { next_e = e; break; }
        if (next_e == prev_e) break;
        path_edges.push_back(next_e);
        cur = g.edges[next_e].a == cur ? g.edges[next_e].b : g.edges[next_e].a;
        prev_e = next_e;
        if (live_deg(cur) != 2) break;
      }
      if (live_deg(cur) <= 1) {
        // The whole component is this path: trim it node by node instead, so
        // only its noisy end goes.
        std::uint32_t at = v;
        for (auto e : path_edges) {
          if (!prunable(at)) break;
          edge_alive[e] = 0;
          at = g.edges[e].a == at ? g.edges[e].b : g.edges[e].a;
          changed = true;
        }
        continue;
      }
      for (auto e : path_edges) edge_alive[e] = 0;
      changed = true;
    }
  }

  // Compact: drop dead edges and isolated nodes.
  std::vector<std::uint32_t> remap(g.nodes.size(), std::numeric_limits<std::uint32_t>::max());
  std::vector<MedialAxisGraph::Node> nodes;
  std::vector<MedialAxisGraph::Edge> edges;
  for (std::uint32_t e = 0; e < g.edges.size(); ++e) {
    if (!edge_alive[e]) continue;
    for (auto n : {g.edges[e].a, g.edges[e].b})
      if (remap[n] == std::numeric_limits<std::uint32_t>::max()) {
        remap[n] = static_cast<std::uint32_t>(nodes.size());
        nodes.push_back(g.nodes[n]);
      }
    edges.push_back({remap[g.edges[e].a], remap[g.edges[e].b], g.edges[e].length, 0, true});
  }
  if (nodes.empty() && !g.nodes.empty()) {
    // Keep the deepest node so the graph is never empty for a valid shape.
    std::uint32_t best = 0;
    for (std::uint32_t n = 0; n < g.nodes.size(); ++n)
      if (g.nodes[n].radius > g.nodes[best].radius) best = n;
    nodes.push_back(g.nodes[best]);
  }
  g.nodes = std::move(nodes);
  g.edges = std::move(edges);

  // Sampling stops the interior axis short of convex polygon vertices; run
  // each corner end on to the vertex it points at.
  if (kind == AxisKind::Interior && !g.edges.empty()) {
    std::vector<std::size_t> deg(g.nodes.size(), 0);
    for (const auto& e : g.edges) ++deg[e.a], ++deg[e.b];
    const std::size_t n0 = g.nodes.size();
    for (std::uint32_t v = 0; v < n0; ++v) {
      if (deg[v] != 1) continue;
      const auto nd = g.nodes[v];
      std::vector<Point2> sp;
      for (auto sid : nd.sites) sp.push_back(site_pos[sid]);
      if (detail::max_site_gap(nd.p, sp) <= gap_min) continue;
      std::optional<Point2> corner;
      double best = 2.0 * nd.radius + 2.0;
      for (std::uint32_t k = 0; k < s.polygon.ring_count(); ++k)
        for (auto q : s.polygon.ring(k))
          if (const double d = distance(q, nd.p); d > 1e-9 && d <= best) best = d, corner = q;
      if (!corner || !s.polygon.contains((nd.p + *corner) * 0.5)) continue;
      MedialAxisGraph::Node tip;
      tip.p = *corner;
      tip.radius = 0.0;
      tip.sites = nd.sites;
      const auto id = static_cast<std::uint32_t>(g.nodes.size());
      g.nodes.push_back(std::move(tip));
      g.edges.push_back({v, id, best, 0, true});
    }
  }
  g.finalize();

  if (kind == AxisKind::Interior && warnings) {
    // Small radii right at a sharp polygon vertex are expected; a thin
    // stretch is one away from every vertex.
    auto near_vertex = [&](Point2 p) {
      for (std::uint32_t k = 0; k < s.polygon.ring_count(); ++k)
        for (auto v : s.polygon.ring(k))
          if (distance(v, p) <= 4.0) return true;
      return false;
    };
    for (const auto& n : g.nodes)
      if (n.radius < 1.0 && !near_vertex(n.p)) {
        warnings->push_back({WarningCode::ThinRegion, "shape is thinner than 2 raster cells somewhere"});
        break;
      }
  }
  return g;
}

// Largest chord residual among a node's same-ring generating samples.
inline double node_chord_residual(const ShapeModel& s, const MedialAxisGraph& g, std::uint32_t n) {
  double best = -1.0;
  const auto& sites = g.nodes[n].sites;
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      if (sites[i] >= g.site_limit || sites[j] >= g.site_limit) continue;
      const double cr = chord_residual(s, sites[i], sites[j]);
      if (std::isfinite(cr)) best = std::max(best, cr);
    }
  return best;
}

struct ShapeCenter {
  Point2 p;
  std::uint32_t node = 0;
  double chord_residual = 0.0;
  MedialLocation location;
};

// Medial node maximizing the chord residual of its projections; ties by
// larger radius, then lowest chain index.
inline ShapeCenter shape_center(const ShapeModel& s, const MedialAxisGraph& g) {
  if (g.empty()) throw Error(ErrorCode::PreconditionViolated, "medial graph is empty");
  std::uint32_t best = 0;
  double best_cr = -2.0;
  std::uint32_t best_chain = std::numeric_limits<std::uint32_t>::max();
  for (std::uint32_t n = 0; n < g.nodes.size(); ++n) {
    const double cr = node_chord_residual(s, g, n);
    std::uint32_t chain = std::numeric_limits<std::uint32_t>::max();
    for (auto e : g.adjacency[n]) chain = std::min(chain, g.edges[e].chain);
    const bool better = cr > best_cr ||
                        (cr == best_cr && (g.nodes[n].radius > g.nodes[best].radius ||
                                           (g.nodes[n].radius == g.nodes[best].radius && chain < best_chain)));
    if (better) best = n, best_cr = cr, best_chain = chain;
  }
  return {g.nodes[best].p, best, std::max(0.0, best_cr), g.location_of_node(best)};
}

inline MedialLocation nearest_medial(const MedialAxisGraph& g, Point2 z) { return g.nearest(z); }
inline Frame direction_at(const MedialAxisGraph& g, Point2 z) { return g.direction_at(z); }
inline double medial_geodesic(const MedialAxisGraph& g, const MedialLocation& a, const MedialLocation& b) {
  return g.geodesic(a, b);
}

}  // namespace collage
