#pragma once

// Input shape on the working canvas: polygon with holes, its rasterized mask,
// and a dense arc-length-parameterized boundary sampling with a grid index.
//
// Canvas transform: canvas = (shape - origin) * scale, where origin is the
// polygon bounding-box minimum and scale maps the long side to `resolution`
// cells. Cell (i, j) covers [i, i+1] x [j, j+1]; its center is sampled.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "collage/errors.hpp"
#include "collage/geometry.hpp"
#include "collage/image_io.hpp"
#include "collage/raster.hpp"

namespace collage {

inline constexpr int kMinResolution = 128;
inline constexpr int kMaxResolution = 4096;

struct BoundarySample {
  Point2 p;
  std::uint32_t ring = 0;
  std::uint32_t index = 0;  // position within the ring
  double arc = 0.0;         // cumulative distance from the ring's first sample
};

struct BoundaryRing {
  std::vector<std::uint32_t> samples;       // global sample ids, in ring order
  std::vector<std::uint32_t> vertex_sample; // sample id of each polygon vertex
  double length = 0.0;
};

struct Projection {
  Point2 p;
  std::uint32_t sample = 0;
  std::uint32_t ring = 0;
  double distance = 0.0;
};

// Uniform-grid bucket index over boundary samples.
class SampleGrid {
 public:
  SampleGrid() = default;
  SampleGrid(const std::vector<BoundarySample>& samples, BBox box, double cell) : cell_(cell) {
    origin_ = box.min;
    nx_ = std::max(1, static_cast<int>(std::ceil(box.width() / cell)) + 1);
    ny_ = std::max(1, static_cast<int>(std::ceil(box.height() / cell)) + 1);
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (std::uint32_t i = 0; i < samples.size(); ++i) {
      auto [cx, cy] = cell_of(samples[i].p);
      buckets_[static_cast<std::size_t>(cy) * nx_ + cx].push_back(i);
    }
  }

  // Nearest sample id and its distance. Ties go to the lowest id.
  std::pair<std::uint32_t, double> nearest(const std::vector<BoundarySample>& samples, Point2 p) const {
    auto [cx, cy] = cell_of(p);
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_id = 0;
    const int max_ring = std::max(nx_, ny_) + 1;
    for (int r = 0; r <= max_ring; ++r) {
      // Every point in ring r is at least (r - 1) * cell away from p's cell.
      if (r > 0 && (r - 1) * cell_ > best) break;
      visit_ring(cx, cy, r, [&](std::uint32_t id) {
        const double d = distance(samples[id].p, p);
        if (d < best || (d == best && id < best_id)) {
          best = d;
          best_id = id;
        }
      });
    }
    return {best_id, best};
  }

  template <class F>
  void within(const std::vector<BoundarySample>& samples, Point2 p, double radius, F&& f) const {
    const int x0 = clampx(static_cast<int>(std::floor((p.x - radius - origin_.x) / cell_)));
    const int x1 = clampx(static_cast<int>(std::floor((p.x + radius - origin_.x) / cell_)));
    const int y0 = clampy(static_cast<int>(std::floor((p.y - radius - origin_.y) / cell_)));
    const int y1 = clampy(static_cast<int>(std::floor((p.y + radius - origin_.y) / cell_)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        for (auto id : buckets_[static_cast<std::size_t>(y) * nx_ + x])
          if (distance(samples[id].p, p) <= radius) f(id);
  }

 private:
  int clampx(int x) const { return std::clamp(x, 0, nx_ - 1); }
  int clampy(int y) const { return std::clamp(y, 0, ny_ - 1); }
  std::pair<int, int> cell_of(Point2 p) const {
    return {clampx(static_cast<int>(std::floor((p.x - origin_.x) / cell_))),
            clampy(static_cast<int>(std::floor((p.y - origin_.y) / cell_)))};
  }
  template <class F>
  void visit_ring(int cx, int cy, int r, F&& f) const {
    auto cellv = [&](int x, int y) {
      if (x < 0 || y < 0 || x >= nx_ || y >= ny_) return;
      for (auto id : buckets_[static_cast<std::size_t>(y) * nx_ + x]) f(id);
    };
    if (r == 0) return cellv(cx, cy);
    for (int x = cx - r; x <= cx + r; ++x) {
      cellv(x, cy - r);
      cellv(x, cy + r);
    }
    for (int y = cy - r + 1; y <= cy + r - 1; ++y) {
      cellv(cx - r, y);
      cellv(cx + r, y);
    }
  }

  double cell_ = 1.0;
  Point2 origin_;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

struct ShapeModel {
  PolygonWithHoles polygon;  // canvas units
  Mask mask;
  int resolution = 0;
  double scale = 1.0;  // canvas units per shape unit
  Point2 origin;       // shape-space point mapped to canvas (0, 0)
  std::vector<BoundarySample> samples;
  std::vector<BoundaryRing> rings;
  SampleGrid grid;

  double diagonal() const { return std::hypot(double(mask.width()), double(mask.height())); }
  double geom_eps() const { return kGeomEpsScale * diagonal(); }
  Point2 to_canvas(Point2 s) const { return (s - origin) * scale; }
  Point2 to_shape(Point2 c) const { return c / scale + origin; }

  std::pair<std::uint32_t, double> nearest_sample(Point2 p) const { return grid.nearest(samples, p); }

  // Shorter arc along the ring; +inf across rings.
  double boundary_distance(std::uint32_t a, std::uint32_t b) const {
    const auto& sa = samples[a];
    const auto& sb = samples[b];
    if (sa.ring != sb.ring) return std::numeric_limits<double>::infinity();
    const double d = std::abs(sa.arc - sb.arc);
    return std::min(d, rings[sa.ring].length - d);
  }

  // Cyclic index gap between two samples of the same ring.
  std::size_t index_gap(std::uint32_t a, std::uint32_t b) const {
    const auto& sa = samples[a];
    const auto& sb = samples[b];
    const std::size_t n = rings[sa.ring].samples.size();
    const std::size_t d = sa.index > sb.index ? sa.index - sb.index : sb.index - sa.index;
    return std::min(d, n - d);
  }
};

// ---------------------------------------------------------------------------
// Parsing

// One ring per line of "x,y" pairs; blank lines and '#' comments ignored.
inline std::vector<Ring> parse_polygon_text(const std::string& text) {
  std::vector<Ring> rings;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    for (char& c : line)
      if (c == ';' || c == '\t' || c == '(' || c == ')') c = ' ';
    std::istringstream ls(line);
    std::string tok;
    Ring r;
    while (ls >> tok) {
      const auto comma = tok.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::InvalidShape, "expected x,y pair, got '" + tok + "'");
      try {
        std::size_t used = 0;
        const double x = std::stod(tok.substr(0, comma), &used);
        const double y = std::stod(tok.substr(comma + 1));
        r.push_back({x, y});
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidShape, "bad coordinate '" + tok + "'");
      }
    }
    if (!r.empty()) rings.push_back(std::move(r));
  }
  if (rings.empty()) throw Error(ErrorCode::InvalidShape, "polygon file has no rings");
  return rings;
}

inline std::vector<Ring> read_polygon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_polygon_text(ss.str());
}

inline void write_polygon_file(const std::string& path, const std::vector<Ring>& rings) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.precision(17);
  for (const auto& r : rings) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? " " : "") << r[i].x << ',' << r[i].y;
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Mask tracing

namespace detail {

// Labels 4-connected components of value `v`; returns labels (-1 elsewhere) and sizes.
inline std::pair<std::vector<int>, std::vector<std::size_t>> label_components(const Mask& m, std::uint8_t v) {
  const int w = m.width(), h = m.height();
  std::vector<int> lab(static_cast<std::size_t>(w) * h, -1);
  std::vector<std::size_t> sizes;
  std::vector<int> stack;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (m(x, y) != v || lab[i] >= 0) continue;
      const int id = static_cast<int>(sizes.size());
      sizes.push_back(0);
      stack.push_back(static_cast<int>(i));
      lab[i] = id;
      while (!stack.empty()) {
        const int c = stack.back();
        stack.pop_back();
        ++sizes[id];
        const int cx = c % w, cy = c / w;
        const int nb[4][2] = {{cx + 1, cy}, {cx - 1, cy}, {cx, cy + 1}, {cx, cy - 1}};
        for (auto& q : nb) {
          if (q[0] < 0 || q[1] < 0 || q[0] >= w || q[1] >= h) continue;
          const std::size_t j = static_cast<std::size_t>(q[1]) * w + q[0];
          if (m.data()[j] == v && lab[j] < 0) {
            lab[j] = id;
            stack.push_back(static_cast<int>(j));
          }
        }
      }
    }
  return {std::move(lab), std::move(sizes)};
}

// Crack-following boundary of a 0/1 mask; foreground on the left of every
// edge, so the outer ring has positive area and holes negative.
inline std::vector<Ring> trace_cracks(const Mask& m) {
  const int w = m.width(), h = m.height();
  auto fg = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && m(x, y) != 0; };
  struct Edge {
    int x0, y0, x1, y1;
    int px, py;  // foreground pixel on the left
    bool used = false;
  };
  std::vector<Edge> edges;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!fg(x, y)) continue;
      if (!fg(x, y - 1)) edges.push_back({x, y, x + 1, y, x, y});
      if (!fg(x + 1, y)) edges.push_back({x + 1, y, x + 1, y + 1, x, y});
      if (!fg(x, y + 1)) edges.push_back({x + 1, y + 1, x, y + 1, x, y});
      if (!fg(x - 1, y)) edges.push_back({x, y + 1, x, y, x, y});
    }
  const int vw = w + 1;
  std::vector<std::vector<std::size_t>> out_edges(static_cast<std::size_t>(vw) * (h + 1));
  for (std::size_t i = 0; i < edges.size(); ++i)
    out_edges[static_cast<std::size_t>(edges[i].y0) * vw + edges[i].x0].push_back(i);
  std::vector<Ring> rings;
  for (std::size_t s = 0; s < edges.size(); ++s) {
    if (edges[s].used) continue;
    Ring r;
    std::size_t e = s;
    while (!edges[e].used) {
      edges[e].used = true;
      r.push_back({double(edges[e].x0), double(edges[e].y0)});
      const auto& cand = out_edges[static_cast<std::size_t>(edges[e].y1) * vw + edges[e].x1];
      std::size_t next = edges.size();
      // At a diagonal touch, keep circling the same pixel (4-connectivity).
      for (auto c : cand)
        if (!edges[c].used && edges[c].px == edges[e].px && edges[c].py == edges[e].py) next = c;
      if (next == edges.size())
        for (auto c : cand)
          if (!edges[c].used) { next = c; break; }
      if (next == edges.size()) break;
      e = next;
    }
    if (r.size() >= 4) rings.push_back(remove_collinear(r, 1e-12));
  }
  return rings;
}

inline void douglas_peucker(const Ring& pts, std::size_t i0, std::size_t i1, double tol, std::vector<char>& keep) {
  if (i1 <= i0 + 1) return;
  double best = -1.0;
  std::size_t bi = i0;
  for (std::size_t i = i0 + 1; i < i1; ++i) {
    const double d = point_segment_distance(pts[i], pts[i0], pts[i1]);
    if (d > best) best = d, bi = i;
  }
  if (best > tol) {
    keep[bi] = 1;
    douglas_peucker(pts, i0, bi, tol, keep);
    douglas_peucker(pts, bi, i1, tol, keep);
  }
}

inline Ring simplify_ring(const Ring& r, double tol) {
  if (r.size() <= 4 || tol <= 0.0) return r;
  // Anchor at vertex 0 and the vertex farthest from it.
  std::size_t far = 0;
  double fd = -1.0;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (double d = distance(r[0], r[i]); d > fd) fd = d, far = i;
  Ring closed(r.begin(), r.end());
  closed.push_back(r[0]);
  std::vector<char> keep(closed.size(), 0);
  keep[0] = keep[far] = keep.back() = 1;
  douglas_peucker(closed, 0, far, tol, keep);
  douglas_peucker(closed, far, closed.size() - 1, tol, keep);
  Ring out;
  for (std::size_t i = 0; i + 1 < closed.size(); ++i)
    if (keep[i]) out.push_back(closed[i]);
  return out;
}

inline bool ring_self_intersects(const Ring& r) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_cross(r[i], r[(i + 1) % n], r[j], r[(j + 1) % n])) return true;
    }
  return false;
}

inline bool rings_cross(const Ring& a, const Ring& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (segments_cross(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) return true;
  return false;
}

// Removes reflex vertices whose dent depth is below `depth`.
inline Ring remove_shallow_dents(Ring r, double depth) {
  const bool ccw = signed_area(r) > 0.0;
  bool changed = true;
  while (changed && r.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < r.size() && r.size() > 3; ++i) {
      const std::size_t n = r.size();
      const Point2 a = r[(i + n - 1) % n], v = r[i], b = r[(i + 1) % n];
      const double t = orient(a, v, b);
      const bool reflex = ccw ? t < 0.0 : t > 0.0;
      if (reflex && point_segment_distance(v, a, b) < depth) {
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return r;
}

}  // namespace detail

// Even-odd scanline fill of all rings at cell centers.
inline Mask rasterize(const std::vector<Ring>& rings, int width, int height) {
  Mask m(width, height, 0);
  std::vector<double> xs;
  for (int y = 0; y < height; ++y) {
    const double py = y + 0.5;
    xs.clear();
    for (const auto& r : rings)
      for (std::size_t i = 0, n = r.size(); i < n; ++i) {
        const Point2 a = r[i], b = r[(i + 1) % n];
        if ((a.y > py) != (b.y > py)) xs.push_back(a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
      const int x1 = std::min(width - 1, static_cast<int>(std::ceil(xs[k + 1] - 0.5)) - 1);
      for (int x = x0; x <= x1; ++x) m(x, y) = 1;
    }
  }
  return m;
}

struct MaskTraceResult {
  std::vector<Ring> rings;  // pixel units, outer first
  bool discarded = false;
};

// Largest 4-connected foreground component of a thresholded gray image,
// traced and simplified. Enclosed background specks under 16 px are filled.
inline MaskTraceResult trace_mask(const Raster<std::uint8_t>& gray, int threshold = 128) {
  Mask m(gray.width(), gray.height());
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = gray.data()[i] >= threshold ? 1 : 0;
  auto [lab, sizes] = detail::label_components(m, 1);
  if (sizes.empty()) throw Error(ErrorCode::InvalidShape, "mask is empty");
  const int keep = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  MaskTraceResult res;
  res.discarded = sizes.size() > 1;
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = lab[i] == keep ? 1 : 0;
  {
    auto [blab, bsizes] = detail::label_components(m, 0);
    std::vector<char> touches(bsizes.size(), 0);
    const int w = m.width(), h = m.height();
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
          const int l = blab[static_cast<std::size_t>(y) * w + x];
          if (l >= 0) touches[l] = 1;
        }
    for (std::size_t i = 0; i < m.size(); ++i) {
      const int l = blab[i];
      if (l >= 0 && !touches[l] && bsizes[l] < 16) m.data()[i] = 1;
    }
  }
  auto rings = detail::trace_cracks(m);
  std::sort(rings.begin(), rings.end(),
            [](const Ring& a, const Ring& b) { return std::abs(signed_area(a)) > std::abs(signed_area(b)); });
  for (auto& r : rings) {
    Ring s = r;
    for (double tol : {0.75, 0.5, 0.25, 0.0}) {
      s = detail::simplify_ring(r, tol);
      if (s.size() >= 3 && !detail::ring_self_intersects(s)) break;
    }
    r = std::move(s);
  }
  res.rings = std::move(rings);
  return res;
}

// ---------------------------------------------------------------------------
// Model construction

namespace detail {

inline void validate_rings(const std::vector<Ring>& rings) {
  if (rings.empty()) throw Error(ErrorCode::InvalidShape, "no outer ring");
  for (std::size_t k = 0; k < rings.size(); ++k) {
    const auto& r = rings[k];
    if (r.size() < 3) throw Error(ErrorCode::InvalidShape, "ring " + std::to_string(k) + " has fewer than 3 vertices");
    for (auto p : r)
      if (!is_finite(p)) throw Error(ErrorCode::InvalidShape, "non-finite coordinate");
    if (std::abs(signed_area(r)) <= 0.0) throw Error(ErrorCode::InvalidShape, "ring " + std::to_string(k) + " has zero area");
    if (ring_self_intersects(r)) throw Error(ErrorCode::InvalidShape, "ring " + std::to_string(k) + " self-intersects");
  }
  for (std::size_t k = 1; k < rings.size(); ++k) {
    if (rings_cross(rings[0], rings[k])) throw Error(ErrorCode::InvalidShape, "hole crosses the outer ring");
    if (!point_in_ring(rings[0], rings[k][0])) throw Error(ErrorCode::InvalidShape, "hole outside the outer ring");
    for (std::size_t j = 1; j < k; ++j)
      if (rings_cross(rings[j], rings[k])) throw Error(ErrorCode::InvalidShape, "holes cross each other");
  }
}

inline void resample_boundary(ShapeModel& s) {
  s.samples.clear();
  s.rings.clear();
  for (std::uint32_t k = 0; k < s.polygon.ring_count(); ++k) {
    const Ring& r = s.polygon.ring(k);
    BoundaryRing br;
    double arc = 0.0;
    for (std::size_t i = 0, n = r.size(); i < n; ++i) {
      const Point2 a = r[i], b = r[(i + 1) % n];
      const double len = distance(a, b);
      const int steps = std::max(1, static_cast<int>(std::ceil(len / 1.0 - 1e-9)));
      br.vertex_sample.push_back(static_cast<std::uint32_t>(s.samples.size()));
      for (int j = 0; j < steps; ++j) {
        const double t = double(j) / steps;
        const auto id = static_cast<std::uint32_t>(s.samples.size());
        s.samples.push_back({a + (b - a) * t, k, static_cast<std::uint32_t>(br.samples.size()), arc + len * t});
        br.samples.push_back(id);
      }
      arc += len;
    }
    br.length = arc;
    s.rings.push_back(std::move(br));
  }
  BBox box;
  for (const auto& smp : s.samples) box.expand(smp.p);
  s.grid = SampleGrid(s.samples, box, 4.0);
}

}  // namespace detail

// `rings` in shape units: first outer, rest holes. `from_mask` enables the
// sub-cell dent cleanup that raster staircases need.
inline ShapeModel build_shape_model(std::vector<Ring> rings, int resolution, bool from_mask = false) {
  if (resolution < kMinResolution || resolution > kMaxResolution)
    throw Error(ErrorCode::PreconditionViolated, "resolution must lie in [128, 4096]");
  for (auto& r : rings) {
    r = dedupe_ring(r, 1e-12 * (1.0 + bbox_of(r).diagonal()));
    r = remove_collinear(r, 1e-12);
  }
  detail::validate_rings(rings);
  ShapeModel s;
  s.resolution = resolution;
  const BBox box = bbox_of(rings[0]);
  const double longest = std::max(box.width(), box.height());
  if (!(longest > 0.0)) throw Error(ErrorCode::InvalidShape, "outer ring has no extent");
  s.scale = resolution / longest;
  s.origin = box.min;
  const int W = std::max(1, static_cast<int>(std::ceil(box.width() * s.scale - 1e-6)));
  const int H = std::max(1, static_cast<int>(std::ceil(box.height() * s.scale - 1e-6)));
  for (auto& r : rings)
    for (auto& p : r) p = s.to_canvas(p);
  if (from_mask)
    for (auto& r : rings) {
      Ring cleaned = detail::remove_shallow_dents(r, 1.0);
      if (!detail::ring_self_intersects(cleaned)) r = std::move(cleaned);
    }
  s.polygon.outer = rings[0];
  s.polygon.holes.assign(rings.begin() + 1, rings.end());
  s.polygon.normalize_orientation();
  std::vector<Ring> all{s.polygon.outer};
  for (const auto& h : s.polygon.holes) all.push_back(h);
  s.mask = rasterize(all, W, H);
  if (count_set(s.mask) == 0) throw Error(ErrorCode::InvalidShape, "shape rasterizes to an empty mask");
  detail::resample_boundary(s);
  return s;
}

inline ShapeModel build_shape_model_from_mask(const Raster<std::uint8_t>& gray, int resolution, Warnings* warnings = nullptr) {
  auto tr = trace_mask(gray);
  if (tr.discarded && warnings)
    warnings->push_back({WarningCode::DiscardedComponent, "mask has several components; kept the largest"});
  return build_shape_model(std::move(tr.rings), resolution, true);
}

inline bool looks_like_polygon_file(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return false;
  std::string ext = path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == "txt" || ext == "poly" || ext == "polygon";
}

inline ShapeModel load_shape(const std::string& path, int resolution, Warnings* warnings = nullptr) {
  if (looks_like_polygon_file(path)) return build_shape_model(read_polygon_file(path), resolution);
  return build_shape_model_from_mask(read_gray(path), resolution, warnings);
}

// ---------------------------------------------------------------------------
// Queries

// Distance from every cell center to the nearest boundary sample; cells that
// contain a boundary sample are 0.
inline Raster<double> distance_map(const ShapeModel& s) {
  Raster<double> d(s.mask.width(), s.mask.height());
  for (int y = 0; y < d.height(); ++y)
    for (int x = 0; x < d.width(); ++x) d(x, y) = s.nearest_sample({x + 0.5, y + 0.5}).second;
  for (const auto& smp : s.samples) {
    const int x = std::clamp(static_cast<int>(std::floor(smp.p.x)), 0, d.width() - 1);
    const int y = std::clamp(static_cast<int>(std::floor(smp.p.y)), 0, d.height() - 1);
    d(x, y) = 0.0;
  }
  return d;
}

// Boundary samples within tol of the minimal distance from z, one
// representative (the closest) per contiguous run along a ring.
inline std::vector<Projection> projections(const ShapeModel& s, Point2 z, double tol = 2.0) {
  const double d0 = s.nearest_sample(z).second;
  std::vector<std::uint32_t> ids;
  s.grid.within(s.samples, z, d0 + tol, [&](std::uint32_t id) { ids.push_back(id); });
  std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
    return s.samples[a].ring != s.samples[b].ring ? s.samples[a].ring < s.samples[b].ring
                                                  : s.samples[a].index < s.samples[b].index;
  });
  std::vector<std::vector<std::uint32_t>> clusters;
  for (auto id : ids) {
    if (!clusters.empty()) {
      const auto last = clusters.back().back();
      if (s.samples[last].ring == s.samples[id].ring && s.index_gap(last, id) <= 2) {
        clusters.back().push_back(id);
        continue;
      }
    }
    clusters.push_back({id});
  }
  // Merge a run that wraps past the ring's first sample.
  if (clusters.size() >= 2) {
    auto& f = clusters.front();
    auto& l = clusters.back();
    if (s.samples[f.front()].ring == s.samples[l.back()].ring && s.index_gap(f.front(), l.back()) <= 2) {
      f.insert(f.end(), l.begin(), l.end());
      clusters.pop_back();
    }
  }
  std::vector<Projection> out;
  for (const auto& c : clusters) {
    std::uint32_t best = c.front();
    double bd = distance(s.samples[best].p, z);
    for (auto id : c)
      if (double d = distance(s.samples[id].p, z); d < bd) bd = d, best = id;
    out.push_back({s.samples[best].p, best, s.samples[best].ring, bd});
  }
  return out;
}

// Boundary geodesic minus chord, in canvas units; +inf across rings.
inline double chord_residual(const ShapeModel& s, std::uint32_t a, std::uint32_t b) {
  const double db = s.boundary_distance(a, b);
  if (!std::isfinite(db)) return db;
  return std::max(0.0, db - distance(s.samples[a].p, s.samples[b].p));
}

inline double chord_residual(const ShapeModel& s, Point2 a, Point2 b) {
  return chord_residual(s, s.nearest_sample(a).first, s.nearest_sample(b).first);
}

}  // namespace collage
