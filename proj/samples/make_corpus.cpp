// make_corpus DIR
//
// Writes the sample corpus: shapes/<name>.txt for every built-in shape,
// shapes/heart_mask.png (a raster version of the heart), and
// collections/c6, c12, c20 with synthetic PNG images and manifest.json.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "collage/collage.hpp"

namespace fs = std::filesystem;
using namespace collage;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_corpus DIR\n";
    return 2;
  }
  const fs::path root = argv[1];
  try {
    fs::create_directories(root / "shapes");
    for (const auto& s : corpus_shapes()) write_polygon_file((root / "shapes" / (s.name + ".txt")).string(), s.rings);

    // Heart drawn as a mask, to exercise the raster input path.
    const auto heart = build_shape_model(corpus_shape("heart").rings, 400);
    Raster<std::uint8_t> gray(heart.mask.width() + 40, heart.mask.height() + 40, 0);
    for (int y = 0; y < heart.mask.height(); ++y)
      for (int x = 0; x < heart.mask.width(); ++x) gray(x + 20, y + 20) = heart.mask(x, y) ? 255 : 0;
    write_png((root / "shapes" / "heart_mask.png").string(), gray);

    for (std::size_t n : {6, 12, 20}) {
      const fs::path dir = root / "collections" / ("c" + std::to_string(n));
      fs::create_directories(dir);
      std::vector<LoadedImage> loaded;
      const auto images = synthetic_collection(n, 100 + n, &loaded);
      nlohmann::json list = nlohmann::json::array();
      for (std::size_t i = 0; i < images.size(); ++i) {
        const auto& im = images[i];
        write_png((dir / im.path).string(), loaded[i].pixels);
        const auto lo = im.salient_box.min(), hi = im.salient_box.max();
        nlohmann::json e{{"id", im.id}, {"path", im.path}, {"salient_box", {lo.x, lo.y, hi.x, hi.y}}};
        if (im.category) e["category"] = *im.category;
        if (im.importance) e["importance"] = *im.importance;
        if (i == 0) e["designated"] = true;
        list.push_back(std::move(e));
      }
      std::ofstream out(dir / "manifest.json");
      out << nlohmann::json{{"images", list}}.dump(1) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "corpus written to " << root.string() << "\n";
  return 0;
}
