#pragma once

// Image reading and writing: PNG (libpng), JPEG (libjpeg) and binary/ASCII
// PNM. Everything is decoded to 8-bit RGB or 8-bit gray.

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include <csetjmp>

#include "collage/errors.hpp"
#include "collage/raster.hpp"

namespace collage {

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return std::vector<unsigned char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline RgbImage decode_png(const std::vector<unsigned char>& bytes, const std::string& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
    throw Error(ErrorCode::IoError, "bad PNG " + path + ": " + img.message);
  img.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
  // Transparent pixels composite onto white.
  png_color white{255, 255, 255};
  if (!png_image_finish_read(&img, &white, buf.data(), 0, nullptr)) {
    png_image_free(&img);
    throw Error(ErrorCode::IoError, "bad PNG " + path + ": " + img.message);
  }
  RgbImage out(static_cast<int>(img.width), static_cast<int>(img.height));
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = {buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
  return out;
}

struct JpegErr {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
};

inline void jpeg_fail(j_common_ptr cinfo) {
  auto* e = reinterpret_cast<JpegErr*>(cinfo->err);
  std::longjmp(e->jump, 1);
}

inline RgbImage decode_jpeg(const std::vector<unsigned char>& bytes, const std::string& path) {
  jpeg_decompress_struct cinfo;
  JpegErr err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_fail;
  std::vector<unsigned char> pixels;
  int w = 0, h = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorCode::IoError, "bad JPEG " + path);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  w = static_cast<int>(cinfo.output_width);
  h = static_cast<int>(cinfo.output_height);
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    unsigned char* row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  RgbImage out(w, h);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = {pixels[3 * i], pixels[3 * i + 1], pixels[3 * i + 2]};
  return out;
}

inline RgbImage decode_pnm(const std::vector<unsigned char>& bytes, const std::string& path) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> int {
    skip_ws();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw Error(ErrorCode::IoError, "bad PNM header in " + path);
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) v = v * 10 + (bytes[pos++] - '0');
    return static_cast<int>(v);
  };
  if (bytes.size() < 2 || bytes[0] != 'P') throw Error(ErrorCode::IoError, "not a PNM file: " + path);
  const int kind = bytes[1] - '0';
  if (kind < 1 || kind > 6) throw Error(ErrorCode::IoError, "unsupported PNM variant in " + path);
  pos = 2;
  const int w = read_int(), h = read_int();
  const int maxv = (kind == 1 || kind == 4) ? 1 : read_int();
  if (w <= 0 || h <= 0 || maxv <= 0 || maxv > 255) throw Error(ErrorCode::IoError, "unsupported PNM size/depth in " + path);
  RgbImage out(w, h);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  auto scale = [&](int v) { return static_cast<std::uint8_t>((v * 255 + maxv / 2) / maxv); };
  if (kind <= 3) {
    const int ch = kind == 3 ? 3 : 1;
    for (std::size_t i = 0; i < n; ++i) {
      int c[3];
      for (int k = 0; k < ch; ++k) {
        if (kind == 1) {
          skip_ws();
          if (pos >= bytes.size()) throw Error(ErrorCode::IoError, "truncated PNM " + path);
          c[k] = bytes[pos++] == '1' ? 0 : 255;  // 1 = black
        } else {
          c[k] = scale(read_int());
        }
      }
      out.data()[i] = ch == 3 ? Rgb{std::uint8_t(c[0]), std::uint8_t(c[1]), std::uint8_t(c[2])}
                              : Rgb{std::uint8_t(c[0]), std::uint8_t(c[0]), std::uint8_t(c[0])};
    }
    return out;
  }
  ++pos;  // single whitespace before raster
  if (kind == 4) {
    const std::size_t stride = (static_cast<std::size_t>(w) + 7) / 8;
    if (pos + stride * h > bytes.size()) throw Error(ErrorCode::IoError, "truncated PNM " + path);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const bool black = (bytes[pos + y * stride + x / 8] >> (7 - x % 8)) & 1;
        const std::uint8_t v = black ? 0 : 255;
        out(x, y) = {v, v, v};
      }
    return out;
  }
  const int ch = kind == 6 ? 3 : 1;
  if (pos + n * ch > bytes.size()) throw Error(ErrorCode::IoError, "truncated PNM " + path);
  for (std::size_t i = 0; i < n; ++i) {
    if (ch == 3) {
      out.data()[i] = {scale(bytes[pos + 3 * i]), scale(bytes[pos + 3 * i + 1]), scale(bytes[pos + 3 * i + 2])};
    } else {
      const std::uint8_t v = scale(bytes[pos + i]);
      out.data()[i] = {v, v, v};
    }
  }
  return out;
}

}  // namespace detail

inline RgbImage read_image(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' && bytes[3] == 'G')
    return detail::decode_png(bytes, path);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8) return detail::decode_jpeg(bytes, path);
  if (bytes.size() >= 2 && bytes[0] == 'P') return detail::decode_pnm(bytes, path);
  throw Error(ErrorCode::IoError, "unrecognized image format: " + path);
}

inline std::uint8_t luminance(Rgb c) {
  return static_cast<std::uint8_t>((299 * c.r + 587 * c.g + 114 * c.b + 500) / 1000);
}

inline Raster<std::uint8_t> read_gray(const std::string& path) {
  const RgbImage img = read_image(path);
  Raster<std::uint8_t> g(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) g.data()[i] = luminance(img.data()[i]);
  return g;
}

inline void write_png(const std::string& path, const RgbImage& img) {
  png_image pi;
  std::memset(&pi, 0, sizeof pi);
  pi.version = PNG_IMAGE_VERSION;
  pi.width = static_cast<png_uint_32>(img.width());
  pi.height = static_cast<png_uint_32>(img.height());
  pi.format = PNG_FORMAT_RGB;
  static_assert(sizeof(Rgb) == 3);
  if (!png_image_write_to_file(&pi, path.c_str(), 0, img.data().data(), 0, nullptr))
    throw Error(ErrorCode::IoError, "cannot write " + path + ": " + pi.message);
}

inline void write_png(const std::string& path, const Raster<std::uint8_t>& gray) {
  png_image pi;
  std::memset(&pi, 0, sizeof pi);
  pi.version = PNG_IMAGE_VERSION;
  pi.width = static_cast<png_uint_32>(gray.width());
  pi.height = static_cast<png_uint_32>(gray.height());
  pi.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&pi, path.c_str(), 0, gray.data().data(), 0, nullptr))
    throw Error(ErrorCode::IoError, "cannot write " + path + ": " + pi.message);
}

inline void write_pgm(const std::string& path, const Raster<std::uint8_t>& gray) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << "P5\n" << gray.width() << ' ' << gray.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data().data()), static_cast<std::streamsize>(gray.size()));
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
}

// 0/1 mask to 0/255 gray.
inline Raster<std::uint8_t> mask_to_gray(const Mask& m) {
  Raster<std::uint8_t> g(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) g.data()[i] = m.data()[i] ? 255 : 0;
  return g;
}

}  // namespace collage
