#pragma once

// Built-in test shapes and seeded synthetic image collections, used by the
// sample corpus, the timing report and the tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "collage/assignment.hpp"
#include "collage/geometry.hpp"
#include "collage/manifest.hpp"
#include "collage/raster.hpp"

namespace collage {

struct NamedShape {
  std::string name;
  std::vector<Ring> rings;  // outer first
};

namespace detail {

inline Ring circle_ring(Point2 c, double r, int n, bool clockwise = false) {
  Ring out;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n * (clockwise ? -1.0 : 1.0);
    out.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return out;
}

// Star-shaped outline r(theta) = 1 + sum of bumps.
inline Ring bumpy_ring(const std::vector<std::pair<double, double>>& bumps, double width, int n) {
  Ring out;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    double r = 1.0;
    for (auto [at, h] : bumps) {
      double d = std::remainder(a - at, 2.0 * std::numbers::pi);
      r += h * std::exp(-(d * d) / (2.0 * width * width));
    }
    out.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return out;
}

}  // namespace detail

inline std::vector<NamedShape> corpus_shapes() {
  using detail::circle_ring;
  const double pi = std::numbers::pi;
  std::vector<NamedShape> s;
  s.push_back({"square", {{{0, 0}, {4, 0}, {4, 4}, {0, 4}}}});
  s.push_back({"rectangle", {{{0, 0}, {4, 0}, {4, 2}, {0, 2}}}});
  s.push_back({"l_shape", {{{0, 0}, {4, 0}, {4, 2}, {2, 2}, {2, 4}, {0, 4}}}});
  s.push_back({"plus", {{{1, 0}, {2, 0}, {2, 1}, {3, 1}, {3, 2}, {2, 2}, {2, 3}, {1, 3}, {1, 2}, {0, 2}, {0, 1}, {1, 1}}}});
  s.push_back({"u_shape", {{{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}}}});
  s.push_back({"t_shape", {{{0, 0}, {3, 0}, {3, 1}, {2, 1}, {2, 3}, {1, 3}, {1, 1}, {0, 1}}}});
  s.push_back({"frame", {{{0, 0}, {4, 0}, {4, 4}, {0, 4}}, {{1.5, 1.5}, {1.5, 2.5}, {2.5, 2.5}, {2.5, 1.5}}}});
  s.push_back({"annulus", {circle_ring({0, 0}, 2.0, 72), circle_ring({0, 0}, 1.0, 48, true)}});
  {
    Ring heart;
    for (int i = 0; i < 96; ++i) {
      const double t = 2.0 * pi * i / 96;
      // y grows downward, so the tip points down on the canvas.
      heart.push_back({16 * std::pow(std::sin(t), 3),
                       -(13 * std::cos(t) - 5 * std::cos(2 * t) - 2 * std::cos(3 * t) - std::cos(4 * t))});
    }
    s.push_back({"heart", {heart}});
  }
  {
    // Body with two ears (upper side on the canvas) and four legs.
    const double up = -pi / 2, down = pi / 2;
    s.push_back({"panda", {detail::bumpy_ring({{up - 0.7, 0.45}, {up + 0.7, 0.45}, {down - 1.0, 0.35},
                                               {down - 0.35, 0.35}, {down + 0.35, 0.35}, {down + 1.0, 0.35}},
                                              0.12, 160)}});
  }
  {
    Ring star;
    for (int i = 0; i < 10; ++i) {
      const double a = 2.0 * pi * i / 10 - pi / 2, r = i % 2 ? 0.5 : 1.0;
      star.push_back({r * std::cos(a), r * std::sin(a)});
    }
    s.push_back({"star", {star}});
  }
  s.push_back({"hexagon", {circle_ring({0, 0}, 1.0, 6)}});
  return s;
}

inline const NamedShape& corpus_shape(const std::string& name) {
  static const auto all = corpus_shapes();
  for (const auto& s : all)
    if (s.name == name) return s;
  throw Error(ErrorCode::PreconditionViolated, "unknown corpus shape: " + name);
}

// Smooth two-colour pattern with a checker overlay; deterministic per seed.
inline RgbImage synthetic_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto channel = [&] { return static_cast<int>(rng() % 200) + 30; };
  const int r0 = channel(), g0 = channel(), b0 = channel(), r1 = channel(), g1 = channel(), b1 = channel();
  const int cell = 8 + static_cast<int>(rng() % 24);
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double t = (double(x) / w + double(y) / h) * 0.5;
      const int k = ((x / cell) + (y / cell)) % 2 ? 20 : -20;
      auto mix = [&](int a, int b) { return static_cast<std::uint8_t>(std::clamp(int(a + (b - a) * t) + k, 0, 255)); };
      img(x, y) = {mix(r0, r1), mix(g0, g1), mix(b0, b1)};
    }
  return img;
}

// n images with random sizes, aspect ratios, salient boxes, categories and
// some importance scores.
inline std::vector<ImageRecord> synthetic_collection(std::size_t n, std::uint64_t seed,
                                                     std::vector<LoadedImage>* loaded = nullptr) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) { return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53); };
  std::vector<ImageRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    ImageRecord r;
    r.id = "img" + std::to_string(i);
    r.path = r.id + ".png";
    const double aspect = std::exp(uni(std::log(0.5), std::log(2.0)));
    const int base = static_cast<int>(uni(120, 240));
    r.width = std::max(16, static_cast<int>(std::lround(base * std::sqrt(aspect))));
    r.height = std::max(16, static_cast<int>(std::lround(base / std::sqrt(aspect))));
    const double fw = uni(0.35, 0.85), fh = uni(0.35, 0.85);
    const double bw = std::floor(r.width * fw), bh = std::floor(r.height * fh);
    const double bx = std::floor(uni(1.0, r.width - bw - 1.0)), by = std::floor(uni(1.0, r.height - bh - 1.0));
    r.salient_box = RectSpec::from_corners({bx, by}, {bx + bw, by + bh});
    r.has_salient_box = true;
    r.category = std::string(1, static_cast<char>('a' + rng() % 3));
    if (rng() % 3 == 0) r.importance = uni(0.0, 1.0);
    const std::uint64_t img_seed = rng();
    if (loaded) loaded->push_back({synthetic_image(r.width, r.height, img_seed), std::nullopt});
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace collage
