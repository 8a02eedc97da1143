#pragma once

// Image manifest: a JSON file {"images": [ {...}, ... ]} (a bare array is
// accepted too). Per record: "path" (required, relative to the manifest),
// "id", "salient_box" [x1, y1, x2, y2] in image pixels, "importance",
// "designated", "category", "saliency_mask".

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "collage/assignment.hpp"
#include "collage/errors.hpp"
#include "collage/image_io.hpp"

namespace collage {

struct LoadedImage {
  RgbImage pixels;
  std::optional<Mask> saliency;  // image-sized, 0/1
};

namespace detail {

inline RectSpec parse_box(const nlohmann::json& j, int w, int h, const std::string& id) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::InvalidManifest, id + ": salient_box must be [x1, y1, x2, y2]");
  const double x1 = j[0].get<double>(), y1 = j[1].get<double>(), x2 = j[2].get<double>(), y2 = j[3].get<double>();
  if (!(x1 < x2 && y1 < y2)) throw Error(ErrorCode::InvalidManifest, id + ": salient_box is empty");
  if (x1 < 0 || y1 < 0 || x2 > w || y2 > h) throw Error(ErrorCode::InvalidManifest, id + ": salient_box exceeds the image");
  return RectSpec::from_corners({x1, y1}, {x2, y2});
}

}  // namespace detail

// Parses manifest text. Images are decoded to learn their sizes; unreadable
// ones are skipped with a warning. `base` resolves relative paths.
inline std::vector<ImageRecord> parse_manifest(const std::string& text, const std::filesystem::path& base,
                                               Warnings* warnings = nullptr, std::vector<LoadedImage>* loaded = nullptr) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidManifest, std::string("manifest is not valid JSON: ") + e.what());
  }
  const nlohmann::json* arr = &root;
  if (root.is_object()) {
    if (!root.contains("images")) throw Error(ErrorCode::InvalidManifest, "manifest has no \"images\" list");
    arr = &root["images"];
  }
  if (!arr->is_array()) throw Error(ErrorCode::InvalidManifest, "manifest images must be a list");
  std::vector<ImageRecord> out;
  for (const auto& e : *arr) {
    if (!e.is_object() || !e.contains("path") || !e["path"].is_string())
      throw Error(ErrorCode::InvalidManifest, "every manifest record needs a \"path\"");
    ImageRecord r;
    const std::filesystem::path p = e["path"].get<std::string>();
    r.path = (p.is_absolute() ? p : base / p).lexically_normal().string();
    r.id = e.contains("id") ? e["id"].get<std::string>() : p.stem().string();
    LoadedImage li;
    try {
      li.pixels = read_image(r.path);
    } catch (const Error& err) {
      if (warnings) warnings->push_back({WarningCode::UnreadableImage, "skipping " + r.id + ": " + err.what()});
      continue;
    }
    r.width = li.pixels.width();
    r.height = li.pixels.height();
    if (e.contains("salient_box") && !e["salient_box"].is_null()) {
      r.salient_box = detail::parse_box(e["salient_box"], r.width, r.height, r.id);
      r.has_salient_box = true;
    } else {
      r.salient_box = RectSpec::from_corners({0.0, 0.0}, {double(r.width), double(r.height)});
    }
    if (e.contains("importance") && !e["importance"].is_null()) r.importance = e["importance"].get<double>();
    if (e.contains("designated")) r.designated = e["designated"].get<bool>();
    if (e.contains("category") && !e["category"].is_null()) r.category = e["category"].get<std::string>();
    if (e.contains("saliency_mask") && !e["saliency_mask"].is_null()) {
      const std::filesystem::path mp = e["saliency_mask"].get<std::string>();
      r.saliency_mask = (mp.is_absolute() ? mp : base / mp).lexically_normal().string();
      try {
        const auto g = read_gray(*r.saliency_mask);
        if (g.width() != r.width || g.height() != r.height) throw Error(ErrorCode::IoError, "size differs from the image");
        Mask m(g.width(), g.height(), 0);
        for (std::size_t i = 0; i < g.size(); ++i) m.data()[i] = g.data()[i] >= 128;
        li.saliency = std::move(m);
      } catch (const Error& err) {
        if (warnings)
          warnings->push_back({WarningCode::UnreadableImage, "ignoring saliency mask of " + r.id + ": " + err.what()});
        r.saliency_mask.reset();
      }
    }
    out.push_back(std::move(r));
    if (loaded) loaded->push_back(std::move(li));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidManifest, "manifest has no usable images");
  return out;
}

inline std::vector<ImageRecord> load_manifest(const std::string& path, Warnings* warnings = nullptr,
                                              std::vector<LoadedImage>* loaded = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), std::filesystem::path(path).parent_path(), warnings, loaded);
}

}  // namespace collage
