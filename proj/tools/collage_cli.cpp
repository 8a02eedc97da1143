// collage: command-line front end.
//
//   collage run       --shape S --manifest M --out DIR [options]
//   collage layout    --shape S --manifest M --out DIR [options]
//   collage decompose --shape S --out DIR [--resolution N] [--tau-p F] [--debug-axis]
//   collage metrics   --layout FILE --out DIR
//   collage render    --layout FILE --out DIR
//   collage timing    --shape S [--resolution N] [--manifests K] [--seed N]

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "collage/collage.hpp"

namespace {

using namespace collage;

struct RunArgs {
  std::string shape, manifest, out;
  std::string mode = "balanced";
  bool debug_axis = false, debug_masks = false;
  RunConfig cfg;
};

void add_config_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--resolution", a.cfg.resolution, "canvas size of the longer bbox side")->capture_default_str();
  cmd->add_option("--tau-p", a.cfg.tau_p, "protrusion threshold")->capture_default_str();
  cmd->add_option("--tau-e", a.cfg.tau_e, "elevation threshold of the search")->capture_default_str();
  cmd->add_option("--mode", a.mode, "tree growth: balanced or unbalanced")
      ->check(CLI::IsMember({"balanced", "unbalanced"}))
      ->capture_default_str();
  cmd->add_option("--unbalanced-prob", a.cfg.unbalanced_prob, "max-height bias of unbalanced growth")->capture_default_str();
  cmd->add_option("--triangle-penalty", a.cfg.triangle_penalty, "score factor for triangular cells")->capture_default_str();
  cmd->add_option("--seed", a.cfg.seed, "random seed")->capture_default_str();
  cmd->add_flag("--brute-force", a.cfg.brute_force, "search every configuration");
}

void print_warnings(const Warnings& ws) {
  for (const auto& w : ws) std::cerr << "warning: " << to_string(w.code) << ": " << w.message << "\n";
}

nlohmann::json cut_json(const CandidateCut& c) {
  return {{"start", {c.start.x, c.start.y}}, {"end", {c.end.x, c.end.y}}, {"length", c.length}, {"protrusion", c.protrusion}};
}

nlohmann::json decomposition_json(const ShapeModel& s, const ShapeAnalysis& a) {
  using nlohmann::json;
  json j;
  j["canvas"] = {{"width", s.mask.width()}, {"height", s.mask.height()}};
  j["center"] = {a.center.p.x, a.center.p.y};
  j["concave_corners"] = a.decomposition.corners.size();
  auto cuts = json::array();
  for (const auto& c : a.decomposition.selected_cuts) cuts.push_back(cut_json(c));
  j["cuts"] = cuts;
  j["raw_cuts"] = a.decomposition.raw_cuts.size();
  j["filtered_cuts"] = a.decomposition.filtered_cuts.size();
  j["forced_splits"] = a.decomposition.forced_splits;
  auto patches = json::array();
  for (const auto& p : a.decomposition.patches) {
    auto ring = json::array();
    for (auto v : p.polygon.vertices) ring.push_back({v.x, v.y});
    patches.push_back({{"id", p.id}, {"area_share", p.area_share}, {"convex", p.convex}, {"polygon", ring}});
  }
  j["patches"] = patches;
  return j;
}

int cmd_run(RunArgs& a, bool render_outputs) {
  a.cfg.mode = parse_growth_mode(a.mode);
  Warnings ws;
  a.cfg.validate();
  const ShapeModel s = load_shape(a.shape, a.cfg.resolution, &ws);
  std::vector<LoadedImage> loaded;
  auto images = load_manifest(a.manifest, &ws, &loaded);
  ShapeAnalysis analysis;
  Layout L = compute_layout(s, std::move(images), a.cfg, &analysis);
  ws.insert(ws.end(), L.warnings.begin(), L.warnings.end());

  ArtifactWriter out(a.out);
  out.write_text("layout.json", layout_text(L));
  if (render_outputs) {
    detail::Stopwatch sw;
    const RenderResult r = render_layout(L, loaded, s.mask);
    L.timings.filling = sw.lap();
    const MetricReport m = layout_metrics(L, r, s.mask, uses_mask_saliency(loaded));
    out.write("collage.png", [&](const std::string& p) { write_png(p, r.canvas); });
    out.write_text("metrics.txt", metrics_text(m));
    out.write_text("metrics.json", metrics_json(m).dump(1) + "\n");
    if (a.debug_masks) {
      const auto [owner, claims] = debug_mask_images(r, L.cells.size());
      out.write("shape_mask.png", [&](const std::string& p) { write_png(p, mask_to_gray(s.mask)); });
      out.write("cell_owner.png", [&](const std::string& p) { write_png(p, owner); });
      out.write("cell_claims.png", [&](const std::string& p) { write_png(p, claims); });
    }
  }
  if (a.debug_axis)
    out.write("axis.png", [&](const std::string& p) { write_png(p, debug_axis_image(s, analysis)); });
  out.commit();
  print_warnings(ws);
  std::cerr << "cells=" << L.cells.size() << " patches=" << L.trees.size() << " E_area=" << L.e_area
            << " decomposition=" << L.timings.decomposition << "s sas_opt=" << L.timings.sas_opt
            << "s filling=" << L.timings.filling << "s\n";
  return 0;
}

int cmd_decompose(RunArgs& a) {
  Warnings ws;
  a.cfg.validate();
  const ShapeModel s = load_shape(a.shape, a.cfg.resolution, &ws);
  const ShapeAnalysis analysis = analyze_shape(s, a.cfg.tau_p, &ws);
  ArtifactWriter out(a.out);
  out.write_text("decomposition.json", decomposition_json(s, analysis).dump(1) + "\n");
  if (a.debug_axis)
    out.write("axis.png", [&](const std::string& p) { write_png(p, debug_axis_image(s, analysis)); });
  out.commit();
  print_warnings(ws);
  std::cerr << "patches=" << analysis.decomposition.patches.size() << " cuts=" << analysis.decomposition.selected_cuts.size()
            << "\n";
  return 0;
}

int cmd_from_layout(const std::string& layout_path, const std::string& out_dir, bool metrics) {
  const Layout L = read_layout(layout_path);
  const auto loaded = load_layout_images(L);
  const Mask mask = layout_mask(L);
  const RenderResult r = render_layout(L, loaded, mask);
  ArtifactWriter out(out_dir);
  if (metrics) {
    const MetricReport m = layout_metrics(L, r, mask, uses_mask_saliency(loaded));
    out.write_text("metrics.txt", metrics_text(m));
    out.write_text("metrics.json", metrics_json(m).dump(1) + "\n");
    std::cout << metrics_text(m);
  } else {
    out.write("collage.png", [&](const std::string& p) { write_png(p, r.canvas); });
  }
  out.commit();
  return 0;
}

int cmd_timing(RunArgs& a, int manifests) {
  a.cfg.mode = parse_growth_mode(a.mode);
  Warnings ws;
  const ShapeModel s = load_shape(a.shape, a.cfg.resolution, &ws);
  const TimingReport rep = timing_report(s, a.cfg, {10, 20, 30, 40, 50}, manifests);
  std::cout << timing_text(rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Image collage for arbitrary shapes"};
  app.require_subcommand(1);

  RunArgs run, lay, dec, tim;
  auto* c_run = app.add_subcommand("run", "decompose, lay out, render and score");
  auto* c_lay = app.add_subcommand("layout", "compute the layout only");
  for (auto [cmd, args] : {std::pair{c_run, &run}, std::pair{c_lay, &lay}}) {
    cmd->add_option("--shape", args->shape, "polygon text file or mask image")->required();
    cmd->add_option("--manifest", args->manifest, "image manifest (JSON)")->required();
    cmd->add_option("--out", args->out, "output directory")->required();
    add_config_options(cmd, *args);
  }
  c_run->add_flag("--debug-axis", run.debug_axis, "write axis.png");
  c_run->add_flag("--debug-masks", run.debug_masks, "write shape and cell masks");
  c_lay->add_flag("--debug-axis", lay.debug_axis, "write axis.png");

  auto* c_dec = app.add_subcommand("decompose", "medial axis and patch decomposition");
  c_dec->add_option("--shape", dec.shape, "polygon text file or mask image")->required();
  c_dec->add_option("--out", dec.out, "output directory")->required();
  c_dec->add_option("--resolution", dec.cfg.resolution)->capture_default_str();
  c_dec->add_option("--tau-p", dec.cfg.tau_p)->capture_default_str();
  c_dec->add_flag("--debug-axis", dec.debug_axis, "write axis.png");

  std::string layout_path, out_dir;
  auto* c_met = app.add_subcommand("metrics", "re-render a layout and score it");
  c_met->add_option("--layout", layout_path, "layout.json")->required();
  c_met->add_option("--out", out_dir, "output directory")->required();
  auto* c_ren = app.add_subcommand("render", "render a layout to collage.png");
  c_ren->add_option("--layout", layout_path, "layout.json")->required();
  c_ren->add_option("--out", out_dir, "output directory")->required();

  int manifests = 5;
  auto* c_tim = app.add_subcommand("timing", "stage timings for 10..50 images");
  c_tim->add_option("--shape", tim.shape, "polygon text file or mask image")->required();
  c_tim->add_option("--manifests", manifests, "synthetic manifests per image count")->capture_default_str();
  add_config_options(c_tim, tim);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_run) return cmd_run(run, true);
    if (*c_lay) return cmd_run(lay, false);
    if (*c_dec) return cmd_decompose(dec);
    if (*c_met) return cmd_from_layout(layout_path, out_dir, true);
    if (*c_ren) return cmd_from_layout(layout_path, out_dir, false);
    if (*c_tim) return cmd_timing(tim, manifests);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
