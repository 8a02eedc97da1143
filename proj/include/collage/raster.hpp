#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "collage/errors.hpp"

namespace collage {

template <class T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{}) : w_(width), h_(height) {
    if (width < 0 || height < 0) throw Error(ErrorCode::PreconditionViolated, "negative raster size");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const { return w_; }
  int height() const { return h_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < w_ && y < h_; }

  T& operator()(int x, int y) { return data_[static_cast<std::size_t>(y) * w_ + x]; }
  const T& operator()(int x, int y) const { return data_[static_cast<std::size_t>(y) * w_ + x]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Raster& a, const Raster& b) {
    return a.w_ == b.w_ && a.h_ == b.h_ && a.data_ == b.data_;
  }

 private:
  int w_ = 0;
  int h_ = 0;
  std::vector<T> data_;
};

using Mask = Raster<std::uint8_t>;  // 0 or 1

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(Rgb, Rgb) = default;
};

using RgbImage = Raster<Rgb>;

inline std::size_t count_set(const Mask& m) {
  std::size_t n = 0;
  for (auto v : m.data()) n += v != 0;
  return n;
}

}  // namespace collage
