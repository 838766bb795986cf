#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "deblur/image.hpp"

namespace deblur {

struct EdgeMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> on;

  EdgeMask() = default;
  EdgeMask(int w, int h) : width(w), height(h), on(static_cast<std::size_t>(w) * h, 0) {}
  bool at(int x, int y) const { return on[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { on[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
};

namespace detail {

inline Image gaussian_smooth_5x5(const Image& in, double sigma) {
  double w[5];
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    w[i] = std::exp(-(i - 2) * (i - 2) / (2.0 * sigma * sigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  Image tmp(in.width, in.height), out(in.width, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int i = -2; i <= 2; ++i) acc += w[i + 2] * in.at(std::clamp(x + i, 0, in.width - 1), y);
      tmp.at(x, y) = acc;
    }
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int i = -2; i <= 2; ++i)
        acc += w[i + 2] * tmp.at(x, std::clamp(y + i, 0, in.height - 1));
      out.at(x, y) = acc;
    }
  return out;
}

}  // namespace detail

// Canny detector: Gaussian 5x5 (sigma 1.4), Sobel, non-maximum suppression
// along the quantized gradient direction, hysteresis. Plateau ties keep
// exactly one pixel (strict test toward the forward neighbor). The outer
// 2-pixel border, where the smoothing window is truncated, stays off.
inline EdgeMask canny_edges(const Image& img, double low, double high) {
  if (low < 0.0 || low > high) throw std::invalid_argument("canny_edges: need 0 <= low <= high");
  const int w = img.width, h = img.height;
  const Image smooth = detail::gaussian_smooth_5x5(img, 1.4);

  Image mag(w, h);
  std::vector<std::uint8_t> dir(static_cast<std::size_t>(w) * h, 0);
  auto sample = [&](int x, int y) {
    return smooth.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double gx = sample(x + 1, y - 1) + 2.0 * sample(x + 1, y) + sample(x + 1, y + 1) -
                        sample(x - 1, y - 1) - 2.0 * sample(x - 1, y) - sample(x - 1, y + 1);
      const double gy = sample(x - 1, y + 1) + 2.0 * sample(x, y + 1) + sample(x + 1, y + 1) -
                        sample(x - 1, y - 1) - 2.0 * sample(x, y - 1) - sample(x + 1, y - 1);
      mag.at(x, y) = std::sqrt(gx * gx + gy * gy);
      double angle = std::atan2(gy, gx) * 180.0 / 3.14159265358979323846;
      if (angle < 0.0) angle += 180.0;
      std::uint8_t d = 0;
      if (angle >= 22.5 && angle < 67.5)
        d = 1;  // diagonal /
      else if (angle >= 67.5 && angle < 112.5)
        d = 2;  // vertical gradient
      else if (angle >= 112.5 && angle < 157.5)
        d = 3;  // diagonal backslash
      dir[static_cast<std::size_t>(y) * w + x] = d;
    }

  static const int fwd[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  EdgeMask keep(w, h);
  auto mag_at = [&](int x, int y) {
    if (x < 0 || x >= w || y < 0 || y >= h) return 0.0;
    return mag.at(x, y);
  };
  for (int y = 2; y < h - 2; ++y)
    for (int x = 2; x < w - 2; ++x) {
      const int d = dir[static_cast<std::size_t>(y) * w + x];
      const double m = mag.at(x, y);
      const double mf = mag_at(x + fwd[d][0], y + fwd[d][1]);
      const double mb = mag_at(x - fwd[d][0], y - fwd[d][1]);
      if (m > mf && m >= mb && m >= low) keep.set(x, y, true);
    }

  // Hysteresis: grow from strong pixels through weak ones, 8-connected.
  EdgeMask out(w, h);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (keep.at(x, y) && mag.at(x, y) >= high && !out.at(x, y)) {
        out.set(x, y, true);
        stack.emplace_back(x, y);
        while (!stack.empty()) {
          auto [cx, cy] = stack.back();
          stack.pop_back();
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              const int nx = cx + dx, ny = cy + dy;
              if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
              if (out.at(nx, ny) || !keep.at(nx, ny)) continue;
              out.set(nx, ny, true);
              stack.emplace_back(nx, ny);
            }
        }
      }
  return out;
}

}  // namespace deblur
