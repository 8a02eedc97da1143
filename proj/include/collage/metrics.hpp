#pragma once

// Collage quality metrics over the shape mask: saliency area, compactness,
// overlap, category correlation and saliency loss.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "collage/compositor.hpp"
#include "collage/errors.hpp"
#include "collage/raster.hpp"

namespace collage {

namespace detail {
inline void require_same_size(const Mask& a, const Mask& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw Error(ErrorCode::PreconditionViolated, "mask sizes differ");
}
inline double shape_pixels(const Mask& shape) {
  const auto n = count_set(shape);
  if (n == 0) throw Error(ErrorCode::PreconditionViolated, "empty shape mask");
  return static_cast<double>(n);
}
}  // namespace detail

// |union of salient pixels inside the shape| / P_X
inline double saliency_area(const std::vector<Mask>& salient, const Mask& shape) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (!shape.data()[i]) continue;
    for (const auto& m : salient)
      if (m.data()[i]) { ++n; break; }
  }
  return static_cast<double>(n) / detail::shape_pixels(shape);
}

inline double saliency_area(const Mask& salient_union, const Mask& shape) {
  return saliency_area(std::vector<Mask>{salient_union}, shape);
}

// Shape pixels nobody painted / P_X
inline double compactness(const Mask& painted, const Mask& shape) {
  detail::require_same_size(painted, shape);
  std::size_t w = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) w += shape.data()[i] && !painted.data()[i];
  return static_cast<double>(w) / detail::shape_pixels(shape);
}

// Sum over image pairs of shared pixels / P_X, from per-pixel image counts.
inline double overlap(const Raster<std::uint8_t>& counts, const Mask& shape) {
  double po = 0.0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (!shape.data()[i]) continue;
    const double k = counts.data()[i];
    po += k * (k - 1.0) / 2.0;
  }
  return po / detail::shape_pixels(shape);
}

inline double overlap(const std::vector<Mask>& images, const Mask& shape) {
  Raster<std::uint8_t> counts(shape.width(), shape.height(), 0);
  for (const auto& m : images) {
    detail::require_same_size(m, shape);
    for (std::size_t i = 0; i < m.size(); ++i) counts.data()[i] += m.data()[i] != 0;
  }
  return overlap(counts, shape);
}

// Mean distance of each categorized image's location to its category mean.
// Locations are already normalized by shape width and height. nullopt when
// no image has a category.
inline std::optional<double> correlation(const std::vector<std::optional<std::string>>& categories,
                                         const std::vector<Point2>& locations) {
  if (categories.size() != locations.size()) throw Error(ErrorCode::PreconditionViolated, "category/location mismatch");
  std::map<std::string, std::pair<Point2, std::size_t>> acc;
  for (std::size_t i = 0; i < categories.size(); ++i)
    if (categories[i]) {
      auto& [sum, n] = acc[*categories[i]];
      sum += locations[i];
      ++n;
    }
  if (acc.empty()) return std::nullopt;
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < categories.size(); ++i)
    if (categories[i]) {
      const auto& [sum, n] = acc[*categories[i]];
      total += distance(locations[i], sum / static_cast<double>(n));
      ++count;
    }
  return total / static_cast<double>(count);
}

// 1 - |union S_i| / sum |S_i|, from per-pixel counts of placed saliency.
inline double saliency_loss(const Raster<std::uint16_t>& counts) {
  double uni = 0.0, sum = 0.0;
  for (auto k : counts.data()) {
    uni += k > 0;
    sum += k;
  }
  return sum > 0.0 ? 1.0 - uni / sum : 0.0;
}

inline double saliency_loss(const std::vector<Mask>& salient) {
  if (salient.empty()) return 0.0;
  Raster<std::uint16_t> counts(salient[0].width(), salient[0].height(), 0);
  for (const auto& m : salient)
    for (std::size_t i = 0; i < m.size(); ++i) counts.data()[i] += m.data()[i] != 0;
  return saliency_loss(counts);
}

struct ImageDiagnostics {
  std::string id;
  std::size_t painted_pixels = 0;
  std::size_t visible_salient_pixels = 0;
  std::size_t placed_salient_pixels = 0;
  Point2 location;  // normalized painted centroid
  std::string mode;
};

struct MetricReport {
  double m_a = 0.0, m_c = 0.0, m_o = 0.0, m_s = 0.0;
  std::optional<double> m_n;
  std::size_t p_x = 0;
  std::string saliency_source = "salient boxes";
  std::vector<ImageDiagnostics> images;
};

// `ids` and `categories` are per cell, in cell order.
inline MetricReport compute_metrics(const RenderResult& r, const Mask& shape, const std::vector<LayoutCell>& cells,
                                    const std::vector<std::string>& ids,
                                    const std::vector<std::optional<std::string>>& categories, bool mask_saliency = false) {
  MetricReport rep;
  rep.p_x = count_set(shape);
  Mask painted(shape.width(), shape.height(), 0);
  for (std::size_t i = 0; i < painted.size(); ++i) painted.data()[i] = r.owner.data()[i] >= 0;
  rep.m_a = saliency_area(r.visible_salient, shape);
  rep.m_c = compactness(painted, shape);
  rep.m_o = overlap(r.claims, shape);
  rep.m_s = saliency_loss(r.placed_salient);
  rep.saliency_source = mask_saliency ? "saliency masks" : "salient boxes";
  std::vector<std::size_t> visible(cells.size(), 0);
  for (std::size_t i = 0; i < r.owner.size(); ++i)
    if (r.owner.data()[i] >= 0 && r.visible_salient.data()[i]) ++visible[static_cast<std::size_t>(r.owner.data()[i])];
  std::vector<Point2> loc;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    ImageDiagnostics d;
    d.id = ids.at(c);
    d.painted_pixels = r.painted[c];
    d.visible_salient_pixels = visible[c];
    d.placed_salient_pixels = r.placed_salient_pixels[c];
    d.location = {r.painted_centroid[c].x / shape.width(), r.painted_centroid[c].y / shape.height()};
    d.mode = cells[c].mode == FillMode::Crop ? "crop" : "warp";
    loc.push_back(d.location);
    rep.images.push_back(d);
  }
  rep.m_n = correlation(categories, loc);
  return rep;
}

inline std::string metrics_text(const MetricReport& m) {
  std::ostringstream o;
  o.precision(10);
  o << "# image location = centroid of its painted region, normalized by shape width/height\n";
  o << "# saliency source = " << m.saliency_source << "\n";
  o << "M_a=" << m.m_a << "\n";
  o << "M_c=" << m.m_c << "\n";
  o << "M_o=" << m.m_o << "\n";
  o << "M_n=";
  if (m.m_n) o << *m.m_n;
  else o << "n/a";
  o << "\n";
  o << "M_s=" << m.m_s << "\n";
  o << "P_X=" << m.p_x << "\n";
  return o.str();
}

inline nlohmann::json metrics_json(const MetricReport& m) {
  nlohmann::json j;
  j["M_a"] = m.m_a;
  j["M_c"] = m.m_c;
  j["M_o"] = m.m_o;
  j["M_n"] = m.m_n ? nlohmann::json(*m.m_n) : nlohmann::json(nullptr);
  j["M_s"] = m.m_s;
  j["P_X"] = m.p_x;
  j["location"] = "painted-region centroid, normalized by shape width and height";
  j["saliency_source"] = m.saliency_source;
  auto& arr = j["images"] = nlohmann::json::array();
  for (const auto& d : m.images)
    arr.push_back({{"id", d.id},
                   {"painted_pixels", d.painted_pixels},
                   {"visible_salient_pixels", d.visible_salient_pixels},
                   {"placed_salient_pixels", d.placed_salient_pixels},
                   {"location", {d.location.x, d.location.y}},
                   {"mode", d.mode}});
  return j;
}

}  // namespace collage
