#pragma once

// End-to-end run: shape analysis, decomposition, trees, assignment, search,
// rendering and metrics, plus the layout file and artifact writing.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "collage/assignment.hpp"
#include "collage/compositor.hpp"
#include "collage/decomposition.hpp"
#include "collage/errors.hpp"
#include "collage/image_io.hpp"
#include "collage/manifest.hpp"
#include "collage/medial_axis.hpp"
#include "collage/metrics.hpp"
#include "collage/shape_model.hpp"
#include "collage/slicing_tree.hpp"

namespace collage {

struct RunConfig {
  int resolution = 1024;
  double tau_p = kDefaultTauP;
  int tau_e = kDefaultTauE;
  GrowthMode mode = GrowthMode::Balanced;
  double unbalanced_prob = kDefaultUnbalancedProb;
  double triangle_penalty = kDefaultTrianglePenalty;
  std::uint64_t seed = 0;
  bool brute_force = false;

  void validate(Warnings* warnings = nullptr) const {
    if (resolution < kMinResolution || resolution > kMaxResolution)
      throw Error(ErrorCode::PreconditionViolated, "resolution must lie in [128, 4096]");
    if (!(tau_p > 0.0 && tau_p <= 1.0)) throw Error(ErrorCode::PreconditionViolated, "tau_p must lie in (0, 1]");
    if (tau_e < 1) throw Error(ErrorCode::PreconditionViolated, "tau_e must be at least 1");
    if (!(unbalanced_prob >= 0.5 && unbalanced_prob <= 0.95))
      throw Error(ErrorCode::PreconditionViolated, "unbalanced probability must lie in [0.5, 0.95]");
    if (!(triangle_penalty > 0.0 && triangle_penalty <= 1.0))
      throw Error(ErrorCode::PreconditionViolated, "triangle penalty must lie in (0, 1]");
    if (warnings && mode == GrowthMode::Unbalanced && unbalanced_prob > 0.9)
      warnings->push_back({WarningCode::HighUnbalancedProbability, "unbalanced probability above 0.9 gives very deep trees"});
  }

  SearchOptions search_options() const { return {tau_e, triangle_penalty, brute_force}; }
};

inline const char* to_string(GrowthMode m) { return m == GrowthMode::Balanced ? "balanced" : "unbalanced"; }

inline GrowthMode parse_growth_mode(const std::string& s) {
  if (s == "balanced") return GrowthMode::Balanced;
  if (s == "unbalanced") return GrowthMode::Unbalanced;
  throw Error(ErrorCode::PreconditionViolated, "mode must be balanced or unbalanced");
}

struct StageTimings {
  double decomposition = 0.0;  // seconds
  double sas_opt = 0.0;
  double filling = 0.0;
};

struct ShapeAnalysis {
  MedialAxisGraph interior;
  MedialAxisGraph exterior;
  ShapeCenter center;
  Decomposition decomposition;
};

struct Layout {
  RunConfig config;
  int width = 0, height = 0;
  std::vector<Ring> canvas_rings;  // shape outline in canvas units, outer first
  std::vector<ImageRecord> images;
  std::vector<PatchTree> trees;
  std::vector<SearchResult> results;
  std::vector<LayoutCell> cells;
  std::vector<std::string> tree_dumps;
  double e_area = 0.0;
  std::uint64_t evaluated = 0;
  Warnings warnings;
  StageTimings timings;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto t = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(t - t0_).count();
    t0_ = t;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

inline std::vector<Ring> canvas_rings(const ShapeModel& s) {
  std::vector<Ring> r{s.polygon.outer};
  for (const auto& h : s.polygon.holes) r.push_back(h);
  return r;
}

}  // namespace detail

inline ShapeAnalysis analyze_shape(const ShapeModel& s, double tau_p, Warnings* warnings = nullptr) {
  ShapeAnalysis a;
  a.interior = medial_axis(s, AxisKind::Interior, warnings);
  a.exterior = medial_axis(s, AxisKind::Exterior);
  a.center = shape_center(s, a.interior);
  a.decomposition = decompose(s, a.interior, a.exterior, tau_p, warnings);
  return a;
}

// Patches merged to at most N_I, with prominence filled in.
inline std::vector<Patch> layout_patches(const ShapeAnalysis& a, std::size_t n_images, Warnings* warnings = nullptr) {
  auto patches = merge_small_patches(a.decomposition.patches, n_images, warnings);
  for (auto& p : patches) p.prominence = patch_prominence(p.polygon, a.interior, a.center);
  return patches;
}

// Budgets, tree growth (one seed per patch), ranking, assignment and the
// configuration search. `images` gets its ranks written.
inline std::vector<PatchTree> build_trees(const std::vector<Patch>& patches, std::vector<ImageRecord>& images,
                                          const RunConfig& cfg) {
  std::vector<double> shares;
  for (const auto& p : patches) shares.push_back(p.area_share);
  const auto budgets = allocate_leaf_budgets(shares, images.size());
  std::vector<PatchTree> trees;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    PatchTree pt;
    pt.patch = patches[i];
    pt.leaf_budget = budgets[i];
    pt.tree = grow_tree(budgets[i], cfg.mode, splitmix64(cfg.seed + i), cfg.unbalanced_prob);
    trees.push_back(std::move(pt));
  }
  assign_images(trees, rank_images(images));
  return trees;
}

inline std::vector<LayoutCell> collect_cells(const std::vector<PatchTree>& trees, const std::vector<SearchResult>& results,
                                             const std::vector<ImageRecord>& images) {
  std::vector<LayoutCell> cells;
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const auto leaves = trees[t].tree.leaves();
    for (std::size_t k = 0; k < leaves.size(); ++k) {
      const auto& n = trees[t].tree.node(leaves[k]);
      LayoutCell c;
      c.polygon = n.polygon;
      c.image = *n.assigned_image;
      c.fitted = results[t].boxes[k].rect;
      c.cover = covering_rect(c.polygon);
      const auto& im = images[c.image];
      c.mode = choose_mode(im.width, im.height, im.salient_box, c.polygon, c.fitted);
      c.patch = static_cast<std::uint32_t>(t);
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

inline Layout compute_layout(const ShapeModel& s, std::vector<ImageRecord> images, const RunConfig& cfg,
                             ShapeAnalysis* analysis_out = nullptr) {
  Layout L;
  cfg.validate(&L.warnings);
  L.config = cfg;
  L.width = s.mask.width();
  L.height = s.mask.height();
  L.canvas_rings = detail::canvas_rings(s);
  detail::Stopwatch sw;
  ShapeAnalysis a = analyze_shape(s, cfg.tau_p, &L.warnings);
  const auto patches = layout_patches(a, images.size(), &L.warnings);
  L.timings.decomposition = sw.lap();

  L.trees = build_trees(patches, images, cfg);
  const MedialDirectionField field(a.interior);
  L.results = optimize_all(L.trees, images, field, cfg.search_options());
  L.timings.sas_opt = sw.lap();

  for (const auto& r : L.results) {
    L.e_area += r.e_area;
    L.evaluated += r.evaluated;
  }
  std::vector<std::string> names;
  for (const auto& im : images) names.push_back(im.id);
  for (const auto& pt : L.trees) L.tree_dumps.push_back(dump_tree(pt.tree, names));
  L.images = std::move(images);
  L.cells = collect_cells(L.trees, L.results, L.images);
  if (analysis_out) *analysis_out = std::move(a);
  return L;
}

inline std::vector<WarpPlan> build_plans(const Layout& L) {
  std::vector<WarpPlan> plans;
  for (const auto& c : L.cells) {
    const auto& im = L.images[c.image];
    plans.push_back(build_warp_plan(im.width, im.height, im.salient_box, c.polygon, c.fitted));
  }
  return plans;
}

// `loaded` is indexed like L.images.
inline RenderResult render_layout(const Layout& L, const std::vector<LoadedImage>& loaded, const Mask& shape_mask) {
  if (loaded.size() != L.images.size()) throw Error(ErrorCode::PreconditionViolated, "image data does not match the layout");
  const auto plans = build_plans(L);
  std::vector<RenderInput> inputs;
  for (const auto& c : L.cells) {
    const auto& li = loaded[c.image];
    inputs.push_back({&li.pixels, {L.images[c.image].salient_box, li.saliency ? &*li.saliency : nullptr}});
  }
  return render(L.cells, plans, inputs, shape_mask);
}

inline Mask layout_mask(const Layout& L) { return rasterize(L.canvas_rings, L.width, L.height); }

inline bool uses_mask_saliency(const std::vector<LoadedImage>& loaded) {
  return std::any_of(loaded.begin(), loaded.end(), [](const LoadedImage& li) { return li.saliency.has_value(); });
}

inline MetricReport layout_metrics(const Layout& L, const RenderResult& r, const Mask& shape_mask, bool mask_saliency) {
  std::vector<std::string> ids;
  std::vector<std::optional<std::string>> cats;
  for (const auto& c : L.cells) {
    ids.push_back(L.images[c.image].id);
    cats.push_back(L.images[c.image].category);
  }
  return compute_metrics(r, shape_mask, L.cells, ids, cats, mask_saliency);
}

// ---------------------------------------------------------------------------
// Layout file. Deterministic: keys sorted, no timings, shortest round-trip
// doubles.

namespace detail {

inline nlohmann::json ring_json(const Ring& r) {
  auto a = nlohmann::json::array();
  for (auto p : r) a.push_back({p.x, p.y});
  return a;
}

inline Ring ring_from_json(const nlohmann::json& j) {
  Ring r;
  for (const auto& p : j) r.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return r;
}

inline nlohmann::json rect_json(const RectSpec& r) { return {r.min().x, r.min().y, r.max().x, r.max().y}; }

inline RectSpec rect_from_json(const nlohmann::json& j) {
  return RectSpec::from_corners({j.at(0).get<double>(), j.at(1).get<double>()}, {j.at(2).get<double>(), j.at(3).get<double>()});
}

}  // namespace detail

inline nlohmann::json layout_json(const Layout& L) {
  using nlohmann::json;
  json j;
  j["format"] = "collage-layout-1";
  j["canvas"] = {{"width", L.width}, {"height", L.height}};
  auto rings = json::array();
  for (const auto& r : L.canvas_rings) rings.push_back(detail::ring_json(r));
  j["shape"] = rings;
  const auto& c = L.config;
  j["config"] = {{"resolution", c.resolution}, {"tau_p", c.tau_p},
                 {"tau_e", c.tau_e},           {"mode", to_string(c.mode)},
                 {"unbalanced_prob", c.unbalanced_prob}, {"triangle_penalty", c.triangle_penalty},
                 {"seed", c.seed},             {"brute_force", c.brute_force}};
  auto imgs = json::array();
  for (const auto& im : L.images) {
    json e{{"id", im.id},          {"path", im.path},     {"width", im.width}, {"height", im.height},
           {"salient_box", detail::rect_json(im.salient_box)}, {"rank", im.rank}, {"designated", im.designated}};
    e["importance"] = im.importance ? json(*im.importance) : json(nullptr);
    e["category"] = im.category ? json(*im.category) : json(nullptr);
    e["saliency_mask"] = im.saliency_mask ? json(*im.saliency_mask) : json(nullptr);
    imgs.push_back(std::move(e));
  }
  j["images"] = imgs;
  auto cells = json::array();
  for (const auto& cell : L.cells)
    cells.push_back({{"polygon", detail::ring_json(cell.polygon.vertices)},
                     {"image", cell.image},
                     {"image_id", L.images[cell.image].id},
                     {"fitted", detail::rect_json(cell.fitted)},
                     {"cover", detail::rect_json(cell.cover)},
                     {"mode", cell.mode == FillMode::Crop ? "crop" : "warp"},
                     {"patch", cell.patch}});
  j["cells"] = cells;
  auto trees = json::array();
  for (std::size_t t = 0; t < L.trees.size(); ++t)
    trees.push_back({{"patch", detail::ring_json(L.trees[t].patch.polygon.vertices)},
                     {"area_share", L.trees[t].patch.area_share},
                     {"prominence", L.trees[t].patch.prominence},
                     {"leaves", L.trees[t].leaf_budget},
                     {"tree", L.tree_dumps.at(t)},
                     {"e_area", L.results.at(t).e_area}});
  j["trees"] = trees;
  j["e_area"] = L.e_area;
  j["evaluated_configurations"] = L.evaluated;
  return j;
}

inline std::string layout_text(const Layout& L) { return layout_json(L).dump(1) + "\n"; }

// Reads what rendering and metrics need: canvas, shape, images and cells.
inline Layout parse_layout(const std::string& text) {
  Layout L;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "collage-layout-1") throw Error(ErrorCode::PreconditionViolated, "not a layout file");
    L.width = j.at("canvas").at("width").get<int>();
    L.height = j.at("canvas").at("height").get<int>();
    for (const auto& r : j.at("shape")) L.canvas_rings.push_back(detail::ring_from_json(r));
    const auto& c = j.at("config");
    L.config.resolution = c.at("resolution").get<int>();
    L.config.tau_p = c.at("tau_p").get<double>();
    L.config.tau_e = c.at("tau_e").get<int>();
    L.config.mode = parse_growth_mode(c.at("mode").get<std::string>());
    L.config.unbalanced_prob = c.at("unbalanced_prob").get<double>();
    L.config.triangle_penalty = c.at("triangle_penalty").get<double>();
    L.config.seed = c.at("seed").get<std::uint64_t>();
    L.config.brute_force = c.at("brute_force").get<bool>();
    for (const auto& e : j.at("images")) {
      ImageRecord im;
      im.id = e.at("id").get<std::string>();
      im.path = e.at("path").get<std::string>();
      im.width = e.at("width").get<int>();
      im.height = e.at("height").get<int>();
      im.salient_box = detail::rect_from_json(e.at("salient_box"));
      im.has_salient_box = true;
      im.rank = e.at("rank").get<int>();
      im.designated = e.at("designated").get<bool>();
      if (!e.at("importance").is_null()) im.importance = e.at("importance").get<double>();
      if (!e.at("category").is_null()) im.category = e.at("category").get<std::string>();
      if (!e.at("saliency_mask").is_null()) im.saliency_mask = e.at("saliency_mask").get<std::string>();
      L.images.push_back(std::move(im));
    }
    for (const auto& e : j.at("cells")) {
      LayoutCell cell;
      cell.polygon.vertices = detail::ring_from_json(e.at("polygon"));
      cell.image = e.at("image").get<std::uint32_t>();
      if (cell.image >= L.images.size()) throw Error(ErrorCode::PreconditionViolated, "cell refers to a missing image");
      cell.fitted = detail::rect_from_json(e.at("fitted"));
      cell.cover = detail::rect_from_json(e.at("cover"));
      cell.mode = e.at("mode").get<std::string>() == "crop" ? FillMode::Crop : FillMode::Warp;
      cell.patch = e.at("patch").get<std::uint32_t>();
      L.cells.push_back(std::move(cell));
    }
    for (const auto& t : j.at("trees")) L.tree_dumps.push_back(t.at("tree").get<std::string>());
    L.e_area = j.at("e_area").get<double>();
    L.evaluated = j.at("evaluated_configurations").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::PreconditionViolated, std::string("malformed layout file: ") + e.what());
  }
  return L;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Layout read_layout(const std::string& path) { return parse_layout(read_text_file(path)); }

// Decodes the images a layout refers to (paths as stored).
inline std::vector<LoadedImage> load_layout_images(const Layout& L) {
  std::vector<LoadedImage> out;
  for (const auto& im : L.images) {
    LoadedImage li;
    li.pixels = read_image(im.path);
    if (li.pixels.width() != im.width || li.pixels.height() != im.height)
      throw Error(ErrorCode::IoError, im.path + " no longer matches the layout");
    if (im.saliency_mask) {
      const auto g = read_gray(*im.saliency_mask);
      Mask m(g.width(), g.height(), 0);
      for (std::size_t i = 0; i < g.size(); ++i) m.data()[i] = g.data()[i] >= 128;
      li.saliency = std::move(m);
    }
    out.push_back(std::move(li));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Artifacts

// Each file is written to a temporary name in the same directory and renamed
// into place. On failure everything committed so far is removed.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir_.string() + ": " + ec.message());
  }
  ~ArtifactWriter() {
    if (!committed_) rollback();
  }
  ArtifactWriter(const ArtifactWriter&) = delete;
  ArtifactWriter& operator=(const ArtifactWriter&) = delete;

  const std::filesystem::path& dir() const { return dir_; }

  void write(const std::string& name, const std::function<void(const std::string&)>& writer) {
    const auto final_path = dir_ / name;
    const auto tmp = dir_ / ("." + name + ".tmp");
    try {
      writer(tmp.string());
    } catch (...) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) {
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::IoError, "cannot move " + final_path.string() + " into place");
    }
    written_.push_back(final_path);
  }

  void write_text(const std::string& name, const std::string& text) {
    write(name, [&](const std::string& p) {
      std::ofstream out(p, std::ios::binary);
      out << text;
      out.close();
      if (!out) throw Error(ErrorCode::IoError, "cannot write " + p);
    });
  }

  void commit() { committed_ = true; }

  void rollback() {
    for (const auto& p : written_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
    written_.clear();
  }

  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
  bool committed_ = false;
};

// Medial axes, cuts and patch outlines over the shape mask.
inline RgbImage debug_axis_image(const ShapeModel& s, const ShapeAnalysis& a) {
  RgbImage img(s.mask.width(), s.mask.height(), Rgb{255, 255, 255});
  for (std::size_t i = 0; i < img.size(); ++i)
    if (s.mask.data()[i]) img.data()[i] = {225, 225, 225};
  auto line = [&](Point2 p, Point2 q, Rgb c) {
    const int steps = std::max(1, static_cast<int>(std::ceil(distance(p, q) * 2.0)));
    for (int k = 0; k <= steps; ++k) {
      const Point2 z = p + (q - p) * (double(k) / steps);
      const int x = static_cast<int>(std::floor(z.x)), y = static_cast<int>(std::floor(z.y));
      if (img.in_bounds(x, y)) img(x, y) = c;
    }
  };
  for (const auto& p : a.decomposition.patches)
    for (std::size_t i = 0; i < p.polygon.size(); ++i)
      line(p.polygon.vertices[i], p.polygon.vertices[(i + 1) % p.polygon.size()], {120, 120, 120});
  for (const auto& e : a.interior.edges) line(a.interior.nodes[e.a].p, a.interior.nodes[e.b].p, {30, 90, 220});
  for (const auto& c : a.decomposition.selected_cuts) line(c.start, c.end, {220, 40, 40});
  const Point2 ctr = a.center.p;
  for (int d = -3; d <= 3; ++d) {
    line(ctr + Vec2{double(d), -3.0}, ctr + Vec2{double(d), 3.0}, {20, 160, 60});
  }
  return img;
}

// Cell index per pixel as a gray level, and the claim count.
inline std::pair<Raster<std::uint8_t>, Raster<std::uint8_t>> debug_mask_images(const RenderResult& r, std::size_t cells) {
  Raster<std::uint8_t> owner(r.owner.width(), r.owner.height(), 0), claims(r.owner.width(), r.owner.height(), 0);
  for (std::size_t i = 0; i < owner.size(); ++i) {
    const auto o = r.owner.data()[i];
    owner.data()[i] = o < 0 ? 0 : static_cast<std::uint8_t>(40 + (215 * (o + 1)) / std::max<std::size_t>(1, cells));
    claims.data()[i] = static_cast<std::uint8_t>(std::min(255, r.claims.data()[i] * 100));
  }
  return {owner, claims};
}

inline std::string warnings_text(const Warnings& ws) {
  std::string out;
  for (const auto& w : ws) out += std::string(to_string(w.code)) + ": " + w.message + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Timing report over N_I = 10..50 on synthetic collections.

struct TimingRow {
  std::size_t n_images = 0;
  StageTimings t;
};

struct TimingReport {
  std::vector<TimingRow> rows;
  double r_squared = 0.0;  // linear fit of SAS+optimization time against N_I
  double slope = 0.0, intercept = 0.0;
};

inline double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y, double* slope = nullptr,
                            double* intercept = nullptr) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
  const double den = n * sxx - sx * sx;
  const double b = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  const double a = (sy - b * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = a + b * x[i];
    ss_res += (y[i] - f) * (y[i] - f);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (slope) *slope = b;
  if (intercept) *intercept = a;
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
}

inline std::string timing_text(const TimingReport& r) {
  std::ostringstream o;
  o.precision(6);
  o << "# seconds per stage; mean over synthetic manifests\n";
  o << "N_I,decomposition,sas_opt,filling\n";
  for (const auto& row : r.rows)
    o << row.n_images << "," << row.t.decomposition << "," << row.t.sas_opt << "," << row.t.filling << "\n";
  o << "# sas_opt linear fit: slope=" << r.slope << " intercept=" << r.intercept << " R2=" << r.r_squared << "\n";
  return o.str();
}

}  // namespace collage
