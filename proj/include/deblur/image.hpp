#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace deblur {

// Row-major single-channel raster. Intensities are nominally in [0,1] but the
// type is also used for gradient channels and other real-valued grids.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, double fill = 0.0)
      : width(w), height(h), data(check_dims(w, h), fill) {}

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  std::size_t size() const { return data.size(); }

  bool same_dims(const Image& o) const { return width == o.width && height == o.height; }

 private:
  static std::size_t check_dims(int w, int h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Image: dimensions must be positive");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
};

inline bool all_finite(const Image& img) {
  for (double v : img.data)
    if (!std::isfinite(v)) return false;
  return true;
}

// Pair of horizontal/vertical forward-difference channels of one image.
struct GradientImage {
  Image gx;
  Image gy;

  GradientImage() = default;
  GradientImage(int w, int h) : gx(w, h), gy(w, h) {}
  GradientImage(Image x, Image y) : gx(std::move(x)), gy(std::move(y)) {
    if (!gx.same_dims(gy))
      throw std::invalid_argument("GradientImage: channel dimensions differ");
  }

  int width() const { return gx.width; }
  int height() const { return gx.height; }
};

// gx(x,y) = img(x+1,y) - img(x,y), gy(x,y) = img(x,y+1) - img(x,y);
// the last column of gx and last row of gy are zero.
inline GradientImage gradients(const Image& img) {
  GradientImage g(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x + 1 < img.width; ++x)
      g.gx.at(x, y) = img.at(x + 1, y) - img.at(x, y);
    g.gx.at(img.width - 1, y) = 0.0;
  }
  for (int y = 0; y + 1 < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      g.gy.at(x, y) = img.at(x, y + 1) - img.at(x, y);
  for (int x = 0; x < img.width; ++x)
    g.gy.at(x, img.height - 1) = 0.0;
  return g;
}

inline Image interior_crop(const Image& img, int margin) {
  if (margin < 0) throw std::invalid_argument("interior_crop: negative margin");
  const int w = img.width - 2 * margin;
  const int h = img.height - 2 * margin;
  if (w <= 0 || h <= 0) throw std::invalid_argument("interior_crop: margin leaves no interior");
  Image out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.at(x, y) = img.at(x + margin, y + margin);
  return out;
}

// Luminance weights used when collapsing color input to a single channel.
inline double luminance(double r, double g, double b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

namespace detail {

inline void zero_margin(Image& img, int margin) {
  if (margin <= 0) return;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (x < margin || y < margin || x >= img.width - margin || y >= img.height - margin)
        img.at(x, y) = 0.0;
}

}  // namespace detail

}  // namespace deblur
