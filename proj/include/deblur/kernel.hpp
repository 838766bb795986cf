#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace deblur {

// Small 2D convolution kernel. Tap counts are odd in both axes so the kernel
// has a well-defined center; after project_kernel the taps are nonnegative
// and sum to one.
struct BlurKernel {
  int width = 1;
  int height = 1;
  std::vector<double> taps{1.0};

  BlurKernel() = default;
  BlurKernel(int w, int h, double fill = 0.0)
      : width(w), height(h), taps(check_dims(w, h), fill) {}

  static BlurKernel delta(int w = 1, int h = 1) {
    BlurKernel k(w, h, 0.0);
    k.at(k.cx(), k.cy()) = 1.0;
    return k;
  }

  double& at(int i, int j) { return taps[static_cast<std::size_t>(j) * width + i]; }
  double at(int i, int j) const { return taps[static_cast<std::size_t>(j) * width + i]; }

  int cx() const { return width / 2; }
  int cy() const { return height / 2; }
  int radius() const { return std::max(width, height) / 2; }

  double sum() const {
    double s = 0.0;
    for (double t : taps) s += t;
    return s;
  }

 private:
  static std::size_t check_dims(int w, int h) {
    if (w <= 0 || h <= 0 || w % 2 == 0 || h % 2 == 0)
      throw std::invalid_argument("BlurKernel: tap counts must be positive and odd");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
};

// rho_k(k) = sum of squared taps.
inline double kernel_prior(const BlurKernel& k) {
  double s = 0.0;
  for (double t : k.taps) s += t * t;
  return s;
}

// Clamp negative taps to zero and renormalize to unit sum. A kernel with no
// positive mass degenerates to the delta kernel of the same size.
inline BlurKernel project_kernel(const BlurKernel& k) {
  BlurKernel out = k;
  double s = 0.0;
  for (double& t : out.taps) {
    if (t < 0.0) t = 0.0;
    s += t;
  }
  if (s <= 0.0) return BlurKernel::delta(k.width, k.height);
  for (double& t : out.taps) t /= s;
  return out;
}

namespace detail {

inline int nearest_odd(double v) {
  int m = static_cast<int>(std::lround((v - 1.0) / 2.0));
  return 2 * std::max(m, 0) + 1;
}

// Bilinear sample of kernel taps at fractional coordinates, zero outside.
inline double sample_taps(const BlurKernel& k, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  double v = 0.0;
  for (int dy = 0; dy <= 1; ++dy) {
    const int yy = y0 + dy;
    if (yy < 0 || yy >= k.height) continue;
    const double wy = dy ? fy : 1.0 - fy;
    for (int dx = 0; dx <= 1; ++dx) {
      const int xx = x0 + dx;
      if (xx < 0 || xx >= k.width) continue;
      const double wx = dx ? fx : 1.0 - fx;
      v += wx * wy * k.at(xx, yy);
    }
  }
  return v;
}

// Bilinear resample to explicit odd target dimensions, then project.
inline BlurKernel resize_kernel_to(const BlurKernel& k, int tw, int th) {
  BlurKernel out(tw, th, 0.0);
  const double sx = static_cast<double>(k.width) / tw;
  const double sy = static_cast<double>(k.height) / th;
  for (int j = 0; j < th; ++j)
    for (int i = 0; i < tw; ++i)
      out.at(i, j) = sample_taps(k, k.cx() + (i - out.cx()) * sx, k.cy() + (j - out.cy()) * sy);
  return project_kernel(out);
}

}  // namespace detail

// Bilinear resample to the nearest odd size >= 1 per axis, then project.
inline BlurKernel resize_kernel(const BlurKernel& k, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("resize_kernel: scale must be positive");
  const int tw = detail::nearest_odd(k.width * scale);
  const int th = detail::nearest_odd(k.height * scale);
  BlurKernel out(tw, th, 0.0);
  for (int j = 0; j < th; ++j)
    for (int i = 0; i < tw; ++i)
      out.at(i, j) =
          detail::sample_taps(k, k.cx() + (i - out.cx()) / scale, k.cy() + (j - out.cy()) / scale);
  return project_kernel(out);
}

// Maximum normalized cross-correlation over all integer translations, with
// both kernels first centered by their center of mass on a common canvas.
inline double kernel_similarity(const BlurKernel& a, const BlurKernel& b) {
  const int half = std::max(std::max(a.width, b.width), std::max(a.height, b.height)) / 2;
  const int n = 2 * (2 * half) + 1;  // room for the translation search

  auto embed = [&](const BlurKernel& k) {
    std::vector<double> canvas(static_cast<std::size_t>(n) * n, 0.0);
    double mass = 0.0, mx = 0.0, my = 0.0;
    for (int j = 0; j < k.height; ++j)
      for (int i = 0; i < k.width; ++i) {
        mass += k.at(i, j);
        mx += i * k.at(i, j);
        my += j * k.at(i, j);
      }
    const int ox = n / 2 - (mass > 0.0 ? static_cast<int>(std::lround(mx / mass)) : k.cx());
    const int oy = n / 2 - (mass > 0.0 ? static_cast<int>(std::lround(my / mass)) : k.cy());
    for (int j = 0; j < k.height; ++j)
      for (int i = 0; i < k.width; ++i) {
        const int x = i + ox, y = j + oy;
        if (x >= 0 && x < n && y >= 0 && y < n)
          canvas[static_cast<std::size_t>(y) * n + x] = k.at(i, j);
      }
    return canvas;
  };

  const std::vector<double> ca = embed(a);
  const std::vector<double> cb = embed(b);
  double na = 0.0, nb = 0.0;
  for (double v : ca) na += v * v;
  for (double v : cb) nb += v * v;
  if (na <= 0.0 || nb <= 0.0) return 0.0;

  double best = -1.0;
  for (int dy = -(n - 1); dy <= n - 1; ++dy)
    for (int dx = -(n - 1); dx <= n - 1; ++dx) {
      double dot = 0.0;
      const int x0 = std::max(0, -dx), x1 = std::min(n, n - dx);
      const int y0 = std::max(0, -dy), y1 = std::min(n, n - dy);
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
          dot += ca[static_cast<std::size_t>(y) * n + x] *
                 cb[static_cast<std::size_t>(y + dy) * n + (x + dx)];
      best = std::max(best, dot / std::sqrt(na * nb));
    }
  return best;
}

}  // namespace deblur
