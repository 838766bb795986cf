#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

// ---------------------------------------------------------------- PGM (P2)

inline Image read_pgm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2") throw std::runtime_error("read_pgm: expected ASCII PGM (P2): " + path);
  auto next_token = [&in, &path]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw std::runtime_error("read_pgm: truncated file " + path);
  };
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (w <= 0 || h <= 0 || maxval <= 0)
    throw std::runtime_error("read_pgm: bad header in " + path);
  Image img(w, h);
  for (double& v : img.data) v = std::stod(next_token()) / maxval;
  return img;
}

inline void write_pgm(const Image& img, const std::string& path, int maxval = 255) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  out << "P2\n" << img.width << " " << img.height << "\n" << maxval << "\n";
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const long v = std::lround(std::clamp(img.at(x, y), 0.0, 1.0) * maxval);
      out << v << (x + 1 == img.width ? "\n" : " ");
    }
  }
  if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

// --------------------------------------------------------------------- PNG

// Grayscale 8/16-bit PNG; color input collapses to luminance.
inline Image read_png(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error("read_png: cannot open " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw std::runtime_error("read_png: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw std::runtime_error("read_png: decode failed for " + path);
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const png_byte color = png_get_color_type(png, info);
  png_byte depth = png_get_bit_depth(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (depth == 16) png_set_swap(png);  // little-endian reads below
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<std::uint8_t> raw(rowbytes * h);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);

  Image img(static_cast<int>(w), static_cast<int>(h));
  const double scale = depth == 16 ? 65535.0 : 255.0;
  for (png_uint_32 y = 0; y < h; ++y) {
    const std::uint8_t* row = raw.data() + y * rowbytes;
    for (png_uint_32 x = 0; x < w; ++x) {
      double c[3] = {0, 0, 0};
      for (int ch = 0; ch < std::min(channels, 3); ++ch) {
        const std::size_t o = (x * channels + ch) * (depth == 16 ? 2 : 1);
        c[ch] = depth == 16
                    ? static_cast<double>(row[o] | (row[o + 1] << 8))
                    : static_cast<double>(row[o]);
      }
      img.at(static_cast<int>(x), static_cast<int>(y)) =
          (channels >= 3 ? luminance(c[0], c[1], c[2]) : c[0]) / scale;
    }
  }
  return img;
}

inline void write_png(const Image& img, const std::string& path, int bit_depth = 16) {
  if (bit_depth != 8 && bit_depth != 16)
    throw std::invalid_argument("write_png: bit depth must be 8 or 16");
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("write_png: cannot open " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw std::runtime_error("write_png: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw std::runtime_error("write_png: encode failed for " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, img.width, img.height, bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const int maxval = bit_depth == 16 ? 65535 : 255;
  const int bytes = bit_depth / 8;
  std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * bytes);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const long v = std::lround(std::clamp(img.at(x, y), 0.0, 1.0) * maxval);
      if (bit_depth == 16) {
        row[2 * x] = static_cast<std::uint8_t>(v >> 8);  // network byte order
        row[2 * x + 1] = static_cast<std::uint8_t>(v & 0xff);
      } else {
        row[x] = static_cast<std::uint8_t>(v);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

// Dispatch on extension; .png or .pgm.
inline Image read_image(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".png") return read_png(path);
  return read_pgm(path);
}

inline void write_image(const Image& img, const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".png")
    write_png(img, path);
  else
    write_pgm(img, path);
}

// ----------------------------------------------------------- kernel files

// Format: first line "w h", then h lines of w space-separated decimals.
inline void write_kernel(const BlurKernel& k, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_kernel: cannot open " + path);
  out << k.width << " " << k.height << "\n";
  char buf[40];
  for (int j = 0; j < k.height; ++j) {
    for (int i = 0; i < k.width; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", k.at(i, j));
      out << buf << (i + 1 == k.width ? "\n" : " ");
    }
  }
  if (!out) throw std::runtime_error("write_kernel: write failed for " + path);
}

inline BlurKernel read_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_kernel: cannot open " + path);
  int w = 0, h = 0;
  if (!(in >> w >> h)) throw std::runtime_error("read_kernel: bad header in " + path);
  if (w <= 0 || h <= 0 || w % 2 == 0 || h % 2 == 0)
    throw std::runtime_error("read_kernel: tap counts must be positive and odd: " + path);
  BlurKernel k(w, h);
  for (double& t : k.taps) {
    if (!(in >> t)) throw std::runtime_error("read_kernel: truncated file " + path);
    if (!std::isfinite(t) || t < 0.0)
      throw std::runtime_error("read_kernel: taps must be finite and nonnegative: " + path);
  }
  const double s = k.sum();
  if (s <= 0.0) throw std::runtime_error("read_kernel: zero-mass kernel in " + path);
  if (std::fabs(s - 1.0) > 1e-6) {
    std::cerr << "read_kernel: warning: taps sum to " << s << ", renormalizing\n";
    for (double& t : k.taps) t /= s;
  }
  return k;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace deblur
