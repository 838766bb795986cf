#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "deblur/convolve.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

// Deterministic generator with implementation-independent sampling (the
// distributions in <random> are not pinned across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  // Sum of uniforms; close enough to Gaussian for synthetic sensor noise.
  double gaussian() {
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += uniform();
    return s - 6.0;
  }

 private:
  std::uint64_t state_;
};

struct SyntheticOptions {
  int shapes = 7;            // rectangles + disks per image
  double edge_min = 0.25;    // minimum intensity step across a shape boundary
  double edge_max = 0.55;
  double texture_amp = 0.02; // white micro-texture amplitude (natural variance)
  double wave_amp = 0.015;   // smooth low-frequency shading
};

// Piecewise-constant composition of rectangles and disks over a mid-gray
// background, plus low-frequency shading and per-pixel micro-texture. The
// micro-texture supplies the gradient variance that blur suppresses.
inline Image make_step_texture_image(int w, int h, std::uint64_t seed,
                                     const SyntheticOptions& opts = {}) {
  Rng rng(seed);
  Image img(w, h, 0.5);
  for (int s = 0; s < opts.shapes; ++s) {
    const double delta = rng.uniform(opts.edge_min, opts.edge_max) *
                         (rng.uniform() < 0.5 ? -1.0 : 1.0);
    if (rng.uniform() < 0.5) {
      const int x0 = rng.uniform_int(2, w - 3), y0 = rng.uniform_int(2, h - 3);
      const int x1 = rng.uniform_int(2, w - 3), y1 = rng.uniform_int(2, h - 3);
      const int xa = std::min(x0, x1), xb = std::max(x0, x1);
      const int ya = std::min(y0, y1), yb = std::max(y0, y1);
      for (int y = ya; y <= yb; ++y)
        for (int x = xa; x <= xb; ++x) img.at(x, y) += delta;
    } else {
      const double cx = rng.uniform(0.15 * w, 0.85 * w);
      const double cy = rng.uniform(0.15 * h, 0.85 * h);
      const double r = rng.uniform(0.08, 0.25) * std::min(w, h);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.at(x, y) += delta;
    }
  }
  const double fx = rng.uniform(1.0, 3.0), fy = rng.uniform(1.0, 3.0);
  const double px = rng.uniform(0.0, 6.283), py = rng.uniform(0.0, 6.283);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.at(x, y) += opts.wave_amp * std::sin(6.283185307179586 * fx * x / w + px) *
                      std::cos(6.283185307179586 * fy * y / h + py);
      img.at(x, y) += opts.texture_amp * (2.0 * rng.uniform() - 1.0);
      img.at(x, y) = std::clamp(img.at(x, y), 0.02, 0.98);
    }
  return img;
}

// Almost featureless image: shading plus faint texture, no step edges.
inline Image make_near_flat_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  Image img(w, h, 0.5);
  const double gx = rng.uniform(-0.05, 0.05), gy = rng.uniform(-0.05, 0.05);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.at(x, y) += gx * (x - w / 2.0) / w + gy * (y - h / 2.0) / h;
      img.at(x, y) += 0.004 * (2.0 * rng.uniform() - 1.0);
    }
  return img;
}

// Uniform 1D motion kernel along x (h = 1) or y (w = 1).
inline BlurKernel box_kernel_1d(int len, bool horizontal = true) {
  BlurKernel k = horizontal ? BlurKernel(len, 1) : BlurKernel(1, len);
  for (double& t : k.taps) t = 1.0 / len;
  return k;
}

// Triangular 1D motion kernel; its ramps have non-uniform slopes, which is
// the generic situation for real motion blur (a uniform box is the
// degenerate case).
inline BlurKernel tent_kernel_1d(int len, bool horizontal = true) {
  BlurKernel k = horizontal ? BlurKernel(len, 1) : BlurKernel(1, len);
  const int c = len / 2;
  for (int i = 0; i < len; ++i) k.taps[i] = c + 1 - std::abs(i - c);
  return project_kernel(k);
}

inline BlurKernel gaussian_kernel(int size, double sigma) {
  BlurKernel k(size, size);
  const int c = size / 2;
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i)
      k.at(i, j) = std::exp(-((i - c) * (i - c) + (j - c) * (j - c)) / (2.0 * sigma * sigma));
  return project_kernel(k);
}

// Smooth random camera-shake trajectory splatted bilinearly onto the grid.
inline BlurKernel trajectory_kernel(int size, std::uint64_t seed, int steps = 64) {
  Rng rng(seed);
  BlurKernel k(size, size, 0.0);
  const double c = size / 2;
  double x = c, y = c, vx = rng.uniform(-0.6, 0.6), vy = rng.uniform(-0.6, 0.6);
  for (int s = 0; s < steps; ++s) {
    vx = 0.9 * vx + rng.uniform(-0.25, 0.25);
    vy = 0.9 * vy + rng.uniform(-0.25, 0.25);
    x = std::clamp(x + vx, 0.5, size - 1.5);
    y = std::clamp(y + vy, 0.5, size - 1.5);
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const double ax = x - x0, ay = y - y0;
    k.at(x0, y0) += (1 - ax) * (1 - ay);
    k.at(x0 + 1, y0) += ax * (1 - ay);
    k.at(x0, y0 + 1) += (1 - ax) * ay;
    k.at(x0 + 1, y0 + 1) += ax * ay;
  }
  return project_kernel(k);
}

// Like trajectory_kernel, but the walk is rescaled so its dominant axis spans
// the whole canvas: the kernel's true extent matches its tap count.
inline BlurKernel spanning_trajectory_kernel(int size, std::uint64_t seed, int steps = 64) {
  Rng rng(seed);
  std::vector<double> xs(steps), ys(steps);
  double x = 0.0, y = 0.0, vx = rng.uniform(-0.6, 0.6), vy = rng.uniform(-0.6, 0.6);
  for (int s = 0; s < steps; ++s) {
    vx = 0.9 * vx + rng.uniform(-0.25, 0.25);
    vy = 0.9 * vy + rng.uniform(-0.25, 0.25);
    x += vx;
    y += vy;
    xs[s] = x;
    ys[s] = y;
  }
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  const double span = std::max({*xmax - *xmin, *ymax - *ymin, 1e-6});
  const double scale = (size - 2.2) / span;
  BlurKernel k(size, size, 0.0);
  for (int s = 0; s < steps; ++s) {
    const double px = 0.6 + (xs[s] - *xmin) * scale +
                      0.5 * (size - 2.2 - (*xmax - *xmin) * scale);
    const double py = 0.6 + (ys[s] - *ymin) * scale +
                      0.5 * (size - 2.2 - (*ymax - *ymin) * scale);
    const int x0 = static_cast<int>(px), y0 = static_cast<int>(py);
    const double ax = px - x0, ay = py - y0;
    k.at(x0, y0) += (1 - ax) * (1 - ay);
    k.at(x0 + 1, y0) += ax * (1 - ay);
    k.at(x0, y0 + 1) += (1 - ax) * ay;
    k.at(x0 + 1, y0 + 1) += ax * ay;
  }
  return project_kernel(k);
}

// Blur an intensity image and add seeded sensor noise, then return the
// gradient-domain observation used by the whole pipeline.
inline GradientImage synthesize_blurred(const Image& sharp, const BlurKernel& k,
                                        std::uint64_t noise_seed, double noise_sigma = 0.001) {
  Image blurred = convolve(sharp, k);
  if (noise_sigma > 0.0) {
    Rng rng(noise_seed);
    for (double& v : blurred.data) v += noise_sigma * rng.gaussian();
  }
  return gradients(blurred);
}

struct DatasetItem {
  std::string image_id;
  std::string kernel_id;
  Image sharp;
  BlurKernel kernel;
  GradientImage blurred;  // gradient-domain observation
};

// Ten-image desk-scale set: nine step-rich compositions of varying edge
// density and one near-flat image, blurred by a mix of kernel shapes.
inline std::vector<DatasetItem> bundled_dataset(int size = 64) {
  std::vector<DatasetItem> set;
  auto add = [&](const std::string& iid, const std::string& kid, Image img, BlurKernel k,
                 std::uint64_t noise_seed) {
    DatasetItem item;
    item.image_id = iid;
    item.kernel_id = kid;
    item.blurred = synthesize_blurred(img, k, noise_seed);
    item.sharp = std::move(img);
    item.kernel = std::move(k);
    set.push_back(std::move(item));
  };

  SyntheticOptions dense;
  dense.shapes = 10;
  SyntheticOptions sparse;
  sparse.shapes = 4;

  add("img00", "box7h", make_step_texture_image(size, size, 101), box_kernel_1d(7), 9101);
  add("img01", "box7v", make_step_texture_image(size, size, 102, dense), box_kernel_1d(7, false),
      9102);
  add("img02", "traj7a", make_step_texture_image(size, size, 103), trajectory_kernel(7, 31), 9103);
  add("img03", "gauss5", make_step_texture_image(size, size, 104, sparse),
      gaussian_kernel(5, 1.0), 9104);
  add("img04", "traj9a", make_step_texture_image(size, size, 105), trajectory_kernel(9, 35), 9105);
  add("img05", "box5h", make_step_texture_image(size, size, 106, dense), box_kernel_1d(5), 9106);
  add("img06", "traj7b", make_step_texture_image(size, size, 107), trajectory_kernel(7, 35), 9107);
  add("img07", "gauss7", make_step_texture_image(size, size, 108), gaussian_kernel(7, 1.3), 9108);
  add("img08", "traj9b", make_step_texture_image(size, size, 109, sparse),
      trajectory_kernel(9, 34), 9109);
  add("img09", "box7h", make_near_flat_image(size, size, 110), box_kernel_1d(7), 9110);
  return set;
}

}  // namespace deblur
