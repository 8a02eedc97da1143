#pragma once

// Binary slicing trees grown per patch, the centroid line split (DPG) and the
// recursive tree-to-cells mapping (SAS).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "collage/decomposition.hpp"
#include "collage/errors.hpp"
#include "collage/geometry.hpp"
#include "collage/medial_axis.hpp"

namespace collage {

enum class CutDirection { Unset, Axial, Crosswise };
enum class ChildOrder { Normal, Swapped };
enum class GrowthMode { Balanced, Unbalanced };

inline constexpr double kDefaultUnbalancedProb = 0.7;

struct MabstNode {
  CutDirection cut_direction = CutDirection::Unset;
  ChildOrder child_order = ChildOrder::Normal;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t parent = -1;
  int depth = 0;
  int elevation = 0;
  Polygon polygon;
  std::optional<std::uint32_t> assigned_image;

  bool is_leaf() const { return left < 0; }
};

// Node 0 is the root. Nodes only ever gain children.
class SlicingTree {
 public:
  SlicingTree() : nodes_(1) {}

  const std::vector<MabstNode>& nodes() const { return nodes_; }
  std::vector<MabstNode>& nodes() { return nodes_; }
  const MabstNode& node(std::size_t i) const { return nodes_[i]; }
  MabstNode& node(std::size_t i) { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }

  void split_leaf(std::size_t i) {
    if (!nodes_[i].is_leaf()) throw Error(ErrorCode::PreconditionViolated, "only leaves can be split");
    const auto l = static_cast<std::int32_t>(nodes_.size());
    MabstNode child;
    child.parent = static_cast<std::int32_t>(i);
    child.depth = nodes_[i].depth + 1;
    nodes_.push_back(child);
    nodes_.push_back(child);
    nodes_[i].left = l;
    nodes_[i].right = l + 1;
    recompute_elevations();
  }

  int subtree_height(std::size_t i) const {
    const auto& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(subtree_height(static_cast<std::size_t>(n.left)), subtree_height(static_cast<std::size_t>(n.right)));
  }
  int height() const { return subtree_height(0); }

  // Distance from node i down to its nearest leaf.
  int shallowest_leaf(std::size_t i) const {
    const auto& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::min(shallowest_leaf(static_cast<std::size_t>(n.left)), shallowest_leaf(static_cast<std::size_t>(n.right)));
  }

  void recompute_elevations() {
    const int h = height();
    for (auto& n : nodes_) n.elevation = h - n.depth;
  }

  // Leaves left to right.
  std::vector<std::size_t> leaves() const {
    std::vector<std::size_t> out;
    collect(0, out, true);
    return out;
  }
  std::size_t leaf_count() const { return leaves().size(); }

  // Inner nodes in pre-order (node, left subtree, right subtree).
  std::vector<std::size_t> inner_preorder(std::size_t from = 0) const {
    std::vector<std::size_t> out;
    collect(from, out, false);
    return out;
  }

  // Leaves below `from`, left to right.
  std::vector<std::size_t> leaves_below(std::size_t from) const {
    std::vector<std::size_t> out;
    collect(from, out, true);
    return out;
  }

 private:
  void collect(std::size_t i, std::vector<std::size_t>& out, bool want_leaves) const {
    const auto& n = nodes_[i];
    if (n.is_leaf()) {
      if (want_leaves) out.push_back(i);
      return;
    }
    if (!want_leaves) out.push_back(i);
    collect(static_cast<std::size_t>(n.left), out, want_leaves);
    collect(static_cast<std::size_t>(n.right), out, want_leaves);
  }

  std::vector<MabstNode> nodes_;
};

struct PatchTree {
  Patch patch;
  SlicingTree tree;
  std::size_t leaf_budget = 1;
};

// ---------------------------------------------------------------------------
// Leaf budgets

// Nearest-integer budgets repaired to sum to n_images with at least one leaf
// per patch. Repair moves one leaf at a time: removals come from the largest
// rounding surplus, additions go to the largest shortfall; near-ties favour
// the smaller quota, then the lower index.
inline std::vector<std::size_t> allocate_leaf_budgets(const std::vector<double>& shares, std::size_t n_images) {
  if (shares.empty()) throw Error(ErrorCode::PreconditionViolated, "no patches");
  if (n_images < shares.size())
    throw Error(ErrorCode::PreconditionViolated, "fewer images than patches; merge patches first");
  double total = 0.0;
  for (double s : shares) {
    if (!(s >= 0.0)) throw Error(ErrorCode::PreconditionViolated, "negative area share");
    total += s;
  }
  if (std::abs(total - 1.0) > 1e-6) throw Error(ErrorCode::PreconditionViolated, "area shares must sum to 1");
  const std::size_t m = shares.size();
  std::vector<double> q(m);
  std::vector<long> b(m);
  long sum = 0;
  for (std::size_t i = 0; i < m; ++i) {
    q[i] = shares[i] * static_cast<double>(n_images);
    b[i] = std::max(1L, std::lround(q[i]));
    sum += b[i];
  }
  const double tie = 1e-9;
  const auto target = static_cast<long>(n_images);
  while (sum > target) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < m; ++i) {
      if (b[i] <= 1) continue;
      if (!pick) { pick = i; continue; }
      const double si = b[i] - q[i], sp = b[*pick] - q[*pick];
      // Taking from the larger quota leaves the smaller one better off.
      if (si > sp + tie || (std::abs(si - sp) <= tie && q[i] > q[*pick] + tie)) pick = i;
    }
    --b[*pick];
    --sum;
  }
  while (sum < target) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < m; ++i) {
      const double di = q[i] - b[i], dp = q[pick] - b[pick];
      if (di > dp + tie || (std::abs(di - dp) <= tie && q[i] < q[pick] - tie)) pick = i;
    }
    ++b[pick];
    ++sum;
  }
  return {b.begin(), b.end()};
}

// ---------------------------------------------------------------------------
// Growth

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace detail {
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline bool coin(std::mt19937_64& rng) { return (rng() >> 63) != 0; }
}  // namespace detail

// Repeats budget - 1 times: walk from the root to a leaf and split it.
// Balanced walks take the child with the shallower nearest leaf, then the
// lower child, then a random one, so every split hits a shallowest leaf.
// Unbalanced walks take the higher child with probability `unbalanced_prob`,
// else a random one.
inline SlicingTree grow_tree(std::size_t budget, GrowthMode mode, std::uint64_t seed,
                             double unbalanced_prob = kDefaultUnbalancedProb) {
  if (budget < 1) throw Error(ErrorCode::PreconditionViolated, "leaf budget must be at least 1");
  std::mt19937_64 rng(seed);
  SlicingTree t;
  for (std::size_t step = 1; step < budget; ++step) {
    std::size_t cur = 0;
    while (!t.node(cur).is_leaf()) {
      const auto l = static_cast<std::size_t>(t.node(cur).left), r = static_cast<std::size_t>(t.node(cur).right);
      const int hl = t.subtree_height(l), hr = t.subtree_height(r);
      bool go_left;
      if (mode == GrowthMode::Balanced) {
        const int sl = t.shallowest_leaf(l), sr = t.shallowest_leaf(r);
        go_left = sl != sr ? sl < sr : hl != hr ? hl < hr : detail::coin(rng);
      } else if (detail::unit_draw(rng) < unbalanced_prob) {
        go_left = hl != hr ? hl > hr : detail::coin(rng);
      } else {
        go_left = detail::coin(rng);
      }
      cur = go_left ? l : r;
    }
    t.split_leaf(cur);
  }
  return t;
}

// ---------------------------------------------------------------------------
// DPG and SAS

// Cut line direction for a node, canonicalized so its left side is stable.
template <DirectionField F>
Vec2 cut_vector(const F& field, Point2 at, CutDirection d) {
  const Frame f = field(at);
  Vec2 v = d == CutDirection::Crosswise ? f.crosswise : f.axial;
  if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;
  return v;
}

// Splits through the polygon's own centroid along the field direction there.
// The first part lies left of the (canonicalized) cut direction.
template <DirectionField F>
std::pair<Polygon, Polygon> dpg(const Polygon& poly, CutDirection d, const F& field) {
  if (d == CutDirection::Unset) throw Error(ErrorCode::PreconditionViolated, "cut direction is unset");
  const Point2 ct = poly.centroid();
  return split_polygon(poly, ct, cut_vector(field, ct, d));
}

template <DirectionField F>
std::pair<Polygon, Polygon> dpg(const ConvexPolygon& poly, CutDirection d, const F& field) {
  return dpg(poly.polygon(), d, field);
}

namespace detail {
inline std::string node_path(const SlicingTree& t, std::size_t i) {
  std::string path;
  while (t.node(i).parent >= 0) {
    const auto p = static_cast<std::size_t>(t.node(i).parent);
    path.insert(path.begin(), t.node(p).left == static_cast<std::int32_t>(i) ? 'L' : 'R');
    i = p;
  }
  return path.empty() ? "root" : "root/" + path;
}
}  // namespace detail

// Fills every node's polygon from the root polygon and returns the leaf
// polygons left to right.
template <DirectionField F>
std::vector<Polygon> sas(SlicingTree& t, const Polygon& root_polygon, const F& field) {
  t.node(0).polygon = root_polygon;
  for (auto i : t.inner_preorder()) {
    auto& n = t.node(i);
    std::pair<Polygon, Polygon> parts;
    try {
      parts = dpg(n.polygon, n.cut_direction, field);
    } catch (const Error& e) {
      throw Error(ErrorCode::SliceFailure, "slicing failed at " + detail::node_path(t, i) + ": " + e.what());
    }
    auto& [p1, p2] = parts;
    if (n.child_order == ChildOrder::Swapped) std::swap(p1, p2);
    t.node(static_cast<std::size_t>(n.left)).polygon = std::move(p1);
    t.node(static_cast<std::size_t>(n.right)).polygon = std::move(p2);
  }
  std::vector<Polygon> out;
  for (auto l : t.leaves()) out.push_back(t.node(l).polygon);
  return out;
}

template <DirectionField F>
std::vector<Polygon> sas(PatchTree& pt, const F& field) {
  return sas(pt.tree, pt.patch.polygon, field);
}

// ---------------------------------------------------------------------------
// Elevation ordering

struct LeafRef {
  std::size_t tree = 0;
  std::size_t node = 0;
  int elevation = 0;
  double prominence = 0.0;
  std::size_t position = 0;  // left-to-right index within its tree
};

// Leaves of all trees by elevation (desc), patch prominence (desc), position
// within the tree (asc), then tree index.
inline std::vector<LeafRef> elevation_index(const std::vector<PatchTree>& trees) {
  std::vector<LeafRef> out;
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const auto leaves = trees[t].tree.leaves();
    for (std::size_t k = 0; k < leaves.size(); ++k)
      out.push_back({t, leaves[k], trees[t].tree.node(leaves[k]).elevation, trees[t].patch.prominence, k});
  }
  std::stable_sort(out.begin(), out.end(), [](const LeafRef& a, const LeafRef& b) {
    if (a.elevation != b.elevation) return a.elevation > b.elevation;
    if (a.prominence != b.prominence) return a.prominence > b.prominence;
    if (a.position != b.position) return a.position < b.position;
    return a.tree < b.tree;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Text dump: (A Normal (leaf img3) (C Swapped (leaf img1) (leaf img2)))

inline std::string dump_tree(const SlicingTree& t, const std::vector<std::string>& image_names = {},
                             std::size_t from = 0) {
  const auto& n = t.node(from);
  if (n.is_leaf()) {
    if (!n.assigned_image) return "(leaf)";
    const auto id = *n.assigned_image;
    return "(leaf " + (id < image_names.size() ? image_names[id] : "img" + std::to_string(id)) + ")";
  }
  const char* d = n.cut_direction == CutDirection::Axial ? "A" : n.cut_direction == CutDirection::Crosswise ? "C" : "U";
  const char* k = n.child_order == ChildOrder::Normal ? "Normal" : "Swapped";
  return std::string("(") + d + " " + k + " " + dump_tree(t, image_names, static_cast<std::size_t>(n.left)) + " " +
         dump_tree(t, image_names, static_cast<std::size_t>(n.right)) + ")";
}

}  // namespace collage
