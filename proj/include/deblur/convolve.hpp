#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

#include "deblur/fft.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"
#include "deblur/parallel.hpp"

namespace deblur {

// Interior-crop policy: every energy in one comparison is evaluated on the
// region that excludes `margin` rows/columns on each side, with margin taken
// from the largest kernel radius in play.
struct BoundaryPolicy {
  int margin = 0;

  static BoundaryPolicy for_kernel(const BlurKernel& k) { return BoundaryPolicy{k.radius()}; }
};

namespace detail {

constexpr int kSpatialKernelLimit = 31;  // taps per side; larger kernels go through FFT

inline void check_kernel_fits(const Image& x, const BlurKernel& k, const char* who) {
  if (k.width > x.width || k.height > x.height)
    throw std::invalid_argument(std::string(who) + ": kernel larger than channel");
}

// out(p) = sum_u k(u) x(p + c - u), x replicate-padded.
inline Image convolve_spatial(const Image& x, const BlurKernel& k) {
  Image out(x.width, x.height);
  const int w = x.width, h = x.height;
  const int cx = k.cx(), cy = k.cy();
  auto row = [&](int y) {
    const bool y_interior = (y >= k.height - 1 - cy) && (y + cy < h);
    for (int xx = 0; xx < w; ++xx) {
      const bool interior = y_interior && (xx >= k.width - 1 - cx) && (xx + cx < w);
      double acc = 0.0;
      if (interior) {
        for (int j = 0; j < k.height; ++j) {
          const double* src = &x.data[static_cast<std::size_t>(y + cy - j) * w];
          const double* kt = &k.taps[static_cast<std::size_t>(j) * k.width];
          for (int i = 0; i < k.width; ++i) acc += kt[i] * src[xx + cx - i];
        }
      } else {
        for (int j = 0; j < k.height; ++j) {
          const int yy = std::clamp(y + cy - j, 0, h - 1);
          for (int i = 0; i < k.width; ++i) {
            const int sx = std::clamp(xx + cx - i, 0, w - 1);
            acc += k.at(i, j) * x.at(sx, yy);
          }
        }
      }
      out.at(xx, y) = acc;
    }
  };
  if (static_cast<long long>(w) * h * k.width * k.height > 1 << 20)
    parallel_for(0, h, row, std::max(1, h / 8));
  else
    for (int y = 0; y < h; ++y) row(y);
  return out;
}

// out(p) = sum_u k(u) x(p + u - c), x zero-padded.
inline Image correlate_spatial(const Image& x, const BlurKernel& k) {
  Image out(x.width, x.height);
  const int w = x.width, h = x.height;
  const int cx = k.cx(), cy = k.cy();
  auto row = [&](int y) {
    const bool y_interior = (y >= cy) && (y + k.height - 1 - cy < h);
    for (int xx = 0; xx < w; ++xx) {
      const bool interior = y_interior && (xx >= cx) && (xx + k.width - 1 - cx < w);
      double acc = 0.0;
      if (interior) {
        for (int j = 0; j < k.height; ++j) {
          const double* src = &x.data[static_cast<std::size_t>(y + j - cy) * w];
          const double* kt = &k.taps[static_cast<std::size_t>(j) * k.width];
          for (int i = 0; i < k.width; ++i) acc += kt[i] * src[xx + i - cx];
        }
      } else {
        for (int j = 0; j < k.height; ++j) {
          const int yy = y + j - cy;
          if (yy < 0 || yy >= h) continue;
          for (int i = 0; i < k.width; ++i) {
            const int sx = xx + i - cx;
            if (sx < 0 || sx >= w) continue;
            acc += k.at(i, j) * x.at(sx, yy);
          }
        }
      }
      out.at(xx, y) = acc;
    }
  };
  if (static_cast<long long>(w) * h * k.width * k.height > 1 << 20)
    parallel_for(0, h, row, std::max(1, h / 8));
  else
    for (int y = 0; y < h; ++y) row(y);
  return out;
}

// Frequency-domain path for large kernels: pad by the kernel radius (replicate
// for convolution, zero for correlation), multiply spectra circularly, crop.
inline Image conv_fft(const Image& x, const BlurKernel& k, bool correlate) {
  const int rx = k.width / 2, ry = k.height / 2;
  const int pw = x.width + 2 * rx, ph = x.height + 2 * ry;
  Image padded(pw, ph);
  for (int y = 0; y < ph; ++y)
    for (int xx = 0; xx < pw; ++xx) {
      const int sx = xx - rx, sy = y - ry;
      if (correlate) {
        padded.at(xx, y) = (sx >= 0 && sx < x.width && sy >= 0 && sy < x.height)
                               ? x.at(sx, sy)
                               : 0.0;
      } else {
        padded.at(xx, y) = x.at(std::clamp(sx, 0, x.width - 1), std::clamp(sy, 0, x.height - 1));
      }
    }
  Image kwrap(pw, ph);
  for (int j = 0; j < k.height; ++j)
    for (int i = 0; i < k.width; ++i) {
      const int u = ((i - k.cx()) % pw + pw) % pw;
      const int v = ((j - k.cy()) % ph + ph) % ph;
      kwrap.at(u, v) += k.at(i, j);
    }
  auto fx = detail::fft2_r2c(padded);
  auto fk = detail::fft2_r2c(kwrap);
  for (std::size_t i = 0; i < fx.size(); ++i)
    fx[i] *= correlate ? std::conj(fk[i]) : fk[i];
  Image full = detail::ifft2_c2r(fx, pw, ph);
  Image out(x.width, x.height);
  for (int y = 0; y < x.height; ++y)
    for (int xx = 0; xx < x.width; ++xx)
      out.at(xx, y) = full.at(xx + rx, y + ry);
  return out;
}

}  // namespace detail

// b = k * l convolution with replicate padding; same-size output.
inline Image convolve(const Image& x, const BlurKernel& k) {
  detail::check_kernel_fits(x, k, "convolve");
  if (std::max(k.width, k.height) <= detail::kSpatialKernelLimit)
    return detail::convolve_spatial(x, k);
  return detail::conv_fft(x, k, /*correlate=*/false);
}

// Adjoint of convolve for interior-supported fields: zero-padded correlation.
// For any x and any y supported on the interior (margin >= kernel radius),
// <convolve(x,k), y> == <x, correlate(y,k)>.
inline Image correlate(const Image& x, const BlurKernel& k) {
  detail::check_kernel_fits(x, k, "correlate");
  if (std::max(k.width, k.height) <= detail::kSpatialKernelLimit)
    return detail::correlate_spatial(x, k);
  return detail::conv_fft(x, k, /*correlate=*/true);
}

inline GradientImage convolve(const GradientImage& g, const BlurKernel& k) {
  return GradientImage(convolve(g.gx, k), convolve(g.gy, k));
}

// ||k*l - b||^2 summed over both channels on the interior crop.
inline double data_term(const BlurKernel& k, const GradientImage& l, const GradientImage& b,
                        const BoundaryPolicy& bp) {
  if (l.width() != b.width() || l.height() != b.height())
    throw std::invalid_argument("data_term: dimension mismatch");
  if (bp.margin < 0 || 2 * bp.margin >= l.width() || 2 * bp.margin >= l.height())
    throw std::invalid_argument("data_term: margin leaves no interior");
  auto channel = [&](const Image& lc, const Image& bc) {
    Image conv = convolve(lc, k);
    double s = 0.0;
    for (int y = bp.margin; y < conv.height - bp.margin; ++y)
      for (int x = bp.margin; x < conv.width - bp.margin; ++x) {
        const double r = conv.at(x, y) - bc.at(x, y);
        s += r * r;
      }
    return s;
  };
  return channel(l.gx, b.gx) + channel(l.gy, b.gy);
}

}  // namespace deblur
