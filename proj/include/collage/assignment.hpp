#pragma once

// Image ranking, leaf assignment, fitted boxes and the configuration search
// over cut directions and child orders.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "collage/errors.hpp"
#include "collage/geometry.hpp"
#include "collage/inscribed_rect.hpp"
#include "collage/medial_axis.hpp"
#include "collage/slicing_tree.hpp"

namespace collage {

inline constexpr double kDefaultTrianglePenalty = 0.8;
inline constexpr int kDefaultTauE = 3;
inline constexpr int kTauEUnbounded = std::numeric_limits<int>::max();

struct ImageRecord {
  std::string id;
  std::string path;
  int width = 0;
  int height = 0;
  RectSpec salient_box;  // image pixels
  bool has_salient_box = false;
  std::optional<double> importance;
  bool designated = false;
  std::optional<std::string> category;
  std::optional<std::string> saliency_mask;
  int rank = 0;  // 1 = most important

  double aspect() const { return salient_box.width / salient_box.height; }
};

// Designated images first (manifest order), then explicit importance
// (descending, stable), then the rest in manifest order. Returns indices into
// `images` by rank and writes each record's rank.
inline std::vector<std::size_t> rank_images(std::vector<ImageRecord>& images) {
  if (images.empty()) throw Error(ErrorCode::InvalidManifest, "manifest has no images");
  std::set<std::string> ids;
  for (const auto& im : images)
    if (!ids.insert(im.id).second) throw Error(ErrorCode::InvalidManifest, "duplicate image id: " + im.id);
  std::vector<std::size_t> order(images.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto tier = [&](std::size_t i) { return images[i].designated ? 0 : images[i].importance ? 1 : 2; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int ta = tier(a), tb = tier(b);
    if (ta != tb) return ta < tb;
    if (ta == 1) return *images[a].importance > *images[b].importance;
    return false;
  });
  for (std::size_t r = 0; r < order.size(); ++r) images[order[r]].rank = static_cast<int>(r + 1);
  return order;
}

inline double pp_epsilon(double diagonal) { return 1e-6 * diagonal; }

// Inverse of (drop from the patch centroid to the axis + axis distance from
// the center to that foot).
inline double patch_prominence(const Polygon& patch, const MedialAxisGraph& g, const ShapeCenter& center) {
  const Point2 pe = patch.centroid();
  const MedialLocation foot = g.nearest(pe);
  const double drop = distance(pe, foot.p);
  const double along = g.geodesic(center.location, foot);
  return 1.0 / (drop + along + pp_epsilon(g.diagonal));
}

// Zips the elevation order of all leaves with the images by rank. `ranked`
// holds indices into the caller's image list.
inline void assign_images(std::vector<PatchTree>& trees, const std::vector<std::size_t>& ranked) {
  const auto order = elevation_index(trees);
  if (order.size() != ranked.size())
    throw Error(ErrorCode::PreconditionViolated, "leaf count " + std::to_string(order.size()) +
                                                     " does not match image count " + std::to_string(ranked.size()));
  for (std::size_t k = 0; k < order.size(); ++k)
    trees[order[k].tree].tree.node(order[k].node).assigned_image = static_cast<std::uint32_t>(ranked[k]);
}

struct FittedBox {
  std::size_t leaf = 0;
  RectSpec rect;
  double area = 0.0;
  double penalized_area = 0.0;
};

inline FittedBox fit_box(const Polygon& cell, double aspect, double triangle_penalty = kDefaultTrianglePenalty,
                         std::size_t leaf = 0) {
  FittedBox fb;
  fb.leaf = leaf;
  fb.rect = max_inscribed_rect(cell, aspect);
  fb.area = fb.rect.area();
  fb.penalized_area = fb.area * (is_triangle(cell) ? triangle_penalty : 1.0);
  return fb;
}

// Axial extent longer than the crosswise one gets a crosswise cut, otherwise
// an axial cut; child order stays Normal.
template <DirectionField F>
CutDirection preconfigured_direction(const Polygon& poly, const F& field) {
  const Point2 c = poly.centroid();
  const Frame f = field(c);
  double amin = std::numeric_limits<double>::infinity(), amax = -amin, cmin = amin, cmax = -amin;
  for (auto v : poly.vertices) {
    const double a = dot(v - c, f.axial), w = dot(v - c, f.crosswise);
    amin = std::min(amin, a), amax = std::max(amax, a);
    cmin = std::min(cmin, w), cmax = std::max(cmax, w);
  }
  return (amax - amin) > (cmax - cmin) ? CutDirection::Crosswise : CutDirection::Axial;
}

// Sets direction and order for every inner node whose elevation exceeds
// tau_e and fills the polygons down to the first free level.
template <DirectionField F>
void preconfigure(SlicingTree& t, const Polygon& root_polygon, const F& field, int tau_e) {
  t.node(0).polygon = root_polygon;
  for (auto i : t.inner_preorder()) {
    auto& n = t.node(i);
    if (n.elevation <= tau_e) continue;
    n.cut_direction = preconfigured_direction(n.polygon, field);
    n.child_order = ChildOrder::Normal;
    auto [p1, p2] = dpg(n.polygon, n.cut_direction, field);
    t.node(static_cast<std::size_t>(n.left)).polygon = std::move(p1);
    t.node(static_cast<std::size_t>(n.right)).polygon = std::move(p2);
  }
}

struct SearchOptions {
  int tau_e = kDefaultTauE;
  double triangle_penalty = kDefaultTrianglePenalty;
  bool brute_force = false;
};

struct SearchResult {
  double e_area = 0.0;
  // Pruned search: completed configurations scored. Brute force: (node,
  // polygon) states visited by the exact recursion.
  std::uint64_t evaluated = 0;
  std::vector<FittedBox> boxes;  // left-to-right leaves
  std::vector<std::uint8_t> digits;  // per inner node in pre-order
};

// Digit per inner node: 0 = (A, Normal), 1 = (A, Swapped), 2 = (C, Normal),
// 3 = (C, Swapped).
inline CutDirection digit_direction(std::uint8_t d) { return d < 2 ? CutDirection::Axial : CutDirection::Crosswise; }
inline ChildOrder digit_order(std::uint8_t d) { return d % 2 == 0 ? ChildOrder::Normal : ChildOrder::Swapped; }
inline std::uint8_t config_digit(CutDirection dir, ChildOrder k) {
  return static_cast<std::uint8_t>((dir == CutDirection::Crosswise ? 2 : 0) + (k == ChildOrder::Swapped ? 1 : 0));
}

namespace detail {

// Exhaustive search of one free subtree whose root polygon is fixed. Node
// polygons and leaf scores are cached per node by the digits of the node's
// ancestors inside the subtree.
template <DirectionField F>
class SubtreeSearch {
 public:
  SubtreeSearch(const SlicingTree& t, std::size_t root, const Polygon& root_poly, const F& field,
                const std::vector<double>& leaf_aspect, double penalty)
      : t_(t), root_(root), field_(field), aspect_(leaf_aspect), penalty_(penalty) {
    inner_ = t.inner_preorder(root);
    leaves_ = t.leaves_below(root);
    if (inner_.size() > 16) throw Error(ErrorCode::PreconditionViolated, "free subtree too large to enumerate; lower tau_e");
    depth_.assign(t.size(), 0);
    code_.assign(t.size(), 0);
    for (auto i : inner_) {
      depth_[static_cast<std::size_t>(t.node(i).left)] = depth_[i] + 1;
      depth_[static_cast<std::size_t>(t.node(i).right)] = depth_[i] + 1;
    }
    polys_.resize(t.size());
    values_.resize(t.size());
    polys_[root].resize(1);
    polys_[root][0] = root_poly;
    digits_.assign(inner_.size(), 0);
  }

  void run() {
    best_ = -std::numeric_limits<double>::infinity();
    count_ = 0;
    enumerate(0);
  }

  double best() const { return best_; }
  std::uint64_t count() const { return count_; }
  const std::vector<std::uint8_t>& best_digits() const { return best_digits_; }
  const std::vector<std::size_t>& inner() const { return inner_; }

 private:
  void enumerate(std::size_t i) {
    if (i == inner_.size()) {
      ++count_;
      double v = 0.0;
      for (auto l : leaves_) v += leaf_value(l);
      if (v > best_) best_ = v, best_digits_ = digits_;
      return;
    }
    const std::size_t u = inner_[i];
    const auto l = static_cast<std::size_t>(t_.node(u).left), r = static_cast<std::size_t>(t_.node(u).right);
    for (std::uint8_t d = 0; d < 4; ++d) {
      digits_[i] = d;
      code_[l] = code_[r] = code_[u] * 4 + d;
      enumerate(i + 1);
    }
  }

  // Polygon of node u under the current ancestor digits; nullopt when a split
  // on the way failed.
  const std::optional<Polygon>& poly(std::size_t u) {
    auto& slot = polys_[u];
    if (slot.empty()) slot.resize(std::size_t{1} << (2 * depth_[u]));
    auto& p = slot[code_[u]];
    if (u == root_ || p || failed(u)) return p;
    const auto par = static_cast<std::size_t>(t_.node(u).parent);
    const auto& pp = poly(par);
    const std::uint8_t d = static_cast<std::uint8_t>(code_[u] % 4);
    const auto l = static_cast<std::size_t>(t_.node(par).left);
    const auto r = static_cast<std::size_t>(t_.node(par).right);
    auto& pl = slot_of(l, code_[u]);
    auto& pr = slot_of(r, code_[u]);
    if (!pp) {
      mark_failed(l), mark_failed(r);
      return p;
    }
    try {
      auto [a, b] = dpg(*pp, digit_direction(d), field_);
      if (digit_order(d) == ChildOrder::Swapped) std::swap(a, b);
      pl = std::move(a);
      pr = std::move(b);
    } catch (const Error&) {
      mark_failed(l), mark_failed(r);
    }
    return p;
  }

  std::optional<Polygon>& slot_of(std::size_t u, std::uint64_t code) {
    auto& slot = polys_[u];
    if (slot.empty()) slot.resize(std::size_t{1} << (2 * depth_[u]));
    return slot[code];
  }
  bool failed(std::size_t u) const { return failed_.count({u, code_[u]}) != 0; }
  void mark_failed(std::size_t u) { failed_.insert({u, code_[u]}); }

  double leaf_value(std::size_t l) {
    auto& slot = values_[l];
    if (slot.empty()) slot.assign(std::size_t{1} << (2 * depth_[l]), std::numeric_limits<double>::quiet_NaN());
    double& v = slot[code_[l]];
    if (std::isnan(v)) {
      const auto& p = poly(l);
      v = p ? fit_box(*p, aspect_[l], penalty_).penalized_area : -std::numeric_limits<double>::infinity();
    }
    return v;
  }

  const SlicingTree& t_;
  std::size_t root_;
  const F& field_;
  const std::vector<double>& aspect_;
  double penalty_;
  std::vector<std::size_t> inner_, leaves_;
  std::vector<int> depth_;
  std::vector<std::uint64_t> code_;
  std::vector<std::vector<std::optional<Polygon>>> polys_;
  std::vector<std::vector<double>> values_;
  std::set<std::pair<std::size_t, std::uint64_t>> failed_;
  std::vector<std::uint8_t> digits_, best_digits_;
  double best_ = 0.0;
  std::uint64_t count_ = 0;
};

// Exact optimum by recursion on (node, polygon): subtrees below a node are
// independent once its polygon is fixed. Ties keep the smallest digit.
template <DirectionField F>
double exact_best(SlicingTree& t, std::size_t u, const Polygon& poly, const F& field, const std::vector<double>& aspect,
                  double penalty, std::uint64_t& states) {
  ++states;
  const auto& n = t.node(u);
  if (n.is_leaf()) return fit_box(poly, aspect[u], penalty).penalized_area;
  const auto l = static_cast<std::size_t>(n.left), r = static_cast<std::size_t>(n.right);
  double best = -std::numeric_limits<double>::infinity();
  std::uint8_t best_d = 0;
  // Subtree configurations of the winner, saved as (node, digit) pairs.
  std::vector<std::pair<std::size_t, std::uint8_t>> best_sub;
  for (std::uint8_t d = 0; d < 4; ++d) {
    std::pair<Polygon, Polygon> parts;
    try {
      parts = dpg(poly, digit_direction(d), field);
    } catch (const Error&) {
      continue;
    }
    if (digit_order(d) == ChildOrder::Swapped) std::swap(parts.first, parts.second);
    const double v = exact_best(t, l, parts.first, field, aspect, penalty, states) +
                     exact_best(t, r, parts.second, field, aspect, penalty, states);
    if (v > best) {
      best = v;
      best_d = d;
      best_sub.clear();
      for (auto i : t.inner_preorder(l)) best_sub.push_back({i, config_digit(t.node(i).cut_direction, t.node(i).child_order)});
      for (auto i : t.inner_preorder(r)) best_sub.push_back({i, config_digit(t.node(i).cut_direction, t.node(i).child_order)});
    }
  }
  auto& nn = t.node(u);
  nn.cut_direction = digit_direction(best_d);
  nn.child_order = digit_order(best_d);
  for (auto [i, d] : best_sub) {
    t.node(i).cut_direction = digit_direction(d);
    t.node(i).child_order = digit_order(d);
  }
  return best;
}

}  // namespace detail

// Aspect ratio of each leaf's image, indexed by node id (0 for inner nodes).
inline std::vector<double> leaf_aspects(const SlicingTree& t, const std::vector<ImageRecord>& images) {
  std::vector<double> a(t.size(), 1.0);
  for (auto l : t.leaves()) {
    const auto& n = t.node(l);
    if (!n.assigned_image) throw Error(ErrorCode::PreconditionViolated, "leaf has no assigned image");
    a[l] = images.at(*n.assigned_image).aspect();
  }
  return a;
}

// Scores a fully configured tree: runs SAS and fits every leaf.
template <DirectionField F>
SearchResult evaluate_configuration(SlicingTree& t, const Polygon& root_polygon, const std::vector<double>& aspect,
                                    const F& field, double triangle_penalty) {
  SearchResult res;
  const auto cells = sas(t, root_polygon, field);
  const auto leaves = t.leaves();
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    res.boxes.push_back(fit_box(cells[k], aspect[leaves[k]], triangle_penalty, leaves[k]));
    res.e_area += res.boxes.back().penalized_area;
  }
  for (auto i : t.inner_preorder()) res.digits.push_back(config_digit(t.node(i).cut_direction, t.node(i).child_order));
  return res;
}

// Pre-configures nodes above tau_e, then exhaustively searches each free
// subtree independently. Leaves the tree configured with the optimum.
template <DirectionField F>
SearchResult search_configuration(SlicingTree& t, const Polygon& root_polygon, const std::vector<double>& aspect,
                                  const F& field, const SearchOptions& opt = {}) {
  std::uint64_t evaluated = 0;
  if (opt.brute_force) {
    detail::exact_best(t, 0, root_polygon, field, aspect, opt.triangle_penalty, evaluated);
  } else {
    preconfigure(t, root_polygon, field, opt.tau_e);
    for (auto i : t.inner_preorder()) {
      const auto& n = t.node(i);
      if (n.elevation > opt.tau_e) continue;
      if (n.parent >= 0 && t.node(static_cast<std::size_t>(n.parent)).elevation <= opt.tau_e) continue;
      detail::SubtreeSearch<F> s(t, i, n.polygon, field, aspect, opt.triangle_penalty);
      s.run();
      evaluated += s.count();
      for (std::size_t k = 0; k < s.inner().size(); ++k) {
        t.node(s.inner()[k]).cut_direction = digit_direction(s.best_digits()[k]);
        t.node(s.inner()[k]).child_order = digit_order(s.best_digits()[k]);
      }
    }
  }
  SearchResult res = evaluate_configuration(t, root_polygon, aspect, field, opt.triangle_penalty);
  res.evaluated = evaluated;
  return res;
}

template <DirectionField F>
SearchResult search_configuration(PatchTree& pt, const std::vector<ImageRecord>& images, const F& field,
                                  const SearchOptions& opt = {}) {
  return search_configuration(pt.tree, pt.patch.polygon, leaf_aspects(pt.tree, images), field, opt);
}

// Trees are optimized independently.
template <DirectionField F>
std::vector<SearchResult> optimize_all(std::vector<PatchTree>& trees, const std::vector<ImageRecord>& images,
                                       const F& field, const SearchOptions& opt = {}) {
  std::vector<SearchResult> out;
  for (auto& pt : trees) out.push_back(search_configuration(pt, images, field, opt));
  return out;
}

// Number of configurations the pruned search scores on a complete tree.
inline std::uint64_t search_space_size(std::uint64_t n_leaves, int tau_e) {
  const std::uint64_t block = std::uint64_t{1} << tau_e;
  std::uint64_t per = 1;
  for (std::uint64_t i = 0; i + 1 < block; ++i) per *= 4;
  return per * (n_leaves / block);
}

}  // namespace collage
