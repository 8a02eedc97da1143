#pragma once

// Stage timings for N_I = 10, 20, ..., 50 on seeded synthetic collections.
// Each N_I is averaged over several manifests: the pruned search cost depends
// on how the leaves fall into free subtrees, which varies between trees.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "collage/pipeline.hpp"
#include "collage/synthetic.hpp"

namespace collage {

inline StageTimings time_one_run(const ShapeModel& s, std::size_t n_images, const RunConfig& cfg,
                                 std::uint64_t manifest = 0) {
  std::vector<LoadedImage> loaded;
  auto images = synthetic_collection(n_images, splitmix64(cfg.seed * 1000003 + n_images * 64 + manifest), &loaded);
  RunConfig c = cfg;
  c.seed = cfg.seed + manifest;
  Layout L = compute_layout(s, std::move(images), c);
  detail::Stopwatch sw;
  const auto r = render_layout(L, loaded, s.mask);
  L.timings.filling = sw.lap();
  (void)r;
  return L.timings;
}

inline TimingReport timing_report(const ShapeModel& s, const RunConfig& cfg,
                                  const std::vector<std::size_t>& sizes = {10, 20, 30, 40, 50}, int manifests = 5) {
  TimingReport rep;
  std::vector<double> xs, ys;
  for (auto n : sizes) {
    std::vector<StageTimings> runs;
    for (int k = 0; k < std::max(1, manifests); ++k) runs.push_back(time_one_run(s, n, cfg, static_cast<std::uint64_t>(k)));
    auto mean = [&](double StageTimings::*f) {
      double sum = 0.0;
      for (const auto& r : runs) sum += r.*f;
      return sum / static_cast<double>(runs.size());
    };
    TimingRow row{n, {mean(&StageTimings::decomposition), mean(&StageTimings::sas_opt), mean(&StageTimings::filling)}};
    rep.rows.push_back(row);
    xs.push_back(static_cast<double>(n));
    ys.push_back(row.t.sas_opt);
  }
  rep.r_squared = linear_fit_r2(xs, ys, &rep.slope, &rep.intercept);
  return rep;
}

}  // namespace collage
