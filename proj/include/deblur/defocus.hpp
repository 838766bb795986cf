#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "deblur/canny.hpp"
#include "deblur/energy.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"
#include "deblur/matting.hpp"
#include "deblur/parallel.hpp"
#include "deblur/params.hpp"

namespace deblur {

struct DefocusParams {
  std::vector<double> radii;   // candidate disk radii, increasing, >= 0
  int window = 41;             // local evaluation window, odd, > 2 * max radius
  double canny_low = 0.03;
  double canny_high = 0.10;
  double prop_lambda = 0.05;   // data-fidelity weight of the propagation
  int ml_window = 3;           // matting window side (3 -> radius 1)
  double ml_epsilon = 1e-5;

  void validate() const {
    if (radii.empty()) throw std::invalid_argument("DefocusParams: no candidate radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (radii[i] < 0.0) throw std::invalid_argument("DefocusParams: negative radius");
      if (i > 0 && radii[i] <= radii[i - 1])
        throw std::invalid_argument("DefocusParams: radii must be increasing");
    }
    if (window % 2 == 0 || window <= 2 * radii.back())
      throw std::invalid_argument("DefocusParams: window must be odd and > 2*max radius");
    if (canny_low < 0.0 || canny_low > canny_high)
      throw std::invalid_argument("DefocusParams: bad Canny thresholds");
    if (!(prop_lambda > 0.0)) throw std::invalid_argument("DefocusParams: prop_lambda <= 0");
    if (ml_window < 3 || ml_window % 2 == 0)
      throw std::invalid_argument("DefocusParams: ml_window must be odd and >= 3");
  }
};

// Anti-aliased normalized disk: tap = clamped pixel-center coverage
// max(0, min(1, r - d + 1/2)). Radius 0 degenerates to the delta kernel.
inline BlurKernel disk_kernel(double radius) {
  if (radius < 0.0) throw std::invalid_argument("disk_kernel: negative radius");
  const int half = static_cast<int>(std::ceil(radius));
  const int size = 2 * half + 1;
  BlurKernel k(size, size);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) {
      const double d = std::hypot(i - half, j - half);
      k.at(i, j) = std::clamp(radius - d + 0.5, 0.0, 1.0);
    }
  return project_kernel(k);
}

struct SparseDefocusSample {
  int x = 0;
  int y = 0;
  double radius = 0.0;
  double energy = 0.0;
};

struct SparseDefocusMap {
  int width = 0;
  int height = 0;
  std::vector<SparseDefocusSample> samples;  // scan order
  int skipped = 0;                           // edge pixels whose window left the image
};

// Per-edge-pixel defocus radius: evaluate f_IRLS of each candidate disk on
// the window centered at the pixel and keep the argmin (ties toward the
// smaller radius). Windows that leave the image are skipped and counted.
inline SparseDefocusMap estimate_defocus_sparse(const Image& img, const DefocusParams& dp,
                                                const EnergyParams& params) {
  dp.validate();
  params.validate();
  const EdgeMask edges = canny_edges(img, dp.canny_low, dp.canny_high);

  std::vector<BlurKernel> kernels;
  kernels.reserve(dp.radii.size());
  int margin = 0;
  for (double r : dp.radii) {
    kernels.push_back(disk_kernel(r));
    margin = std::max(margin, kernels.back().radius());
  }

  const int half = dp.window / 2;
  std::vector<std::pair<int, int>> pixels;
  int skipped = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      if (!edges.at(x, y)) continue;
      if (x < half || y < half || x + half >= img.width || y + half >= img.height) {
        ++skipped;
        continue;
      }
      pixels.emplace_back(x, y);
    }

  SparseDefocusMap out;
  out.width = img.width;
  out.height = img.height;
  out.skipped = skipped;
  out.samples.resize(pixels.size());

  parallel_for(0, static_cast<int>(pixels.size()), [&](int i) {
    const auto [px, py] = pixels[i];
    Image window(dp.window, dp.window);
    for (int y = 0; y < dp.window; ++y)
      for (int x = 0; x < dp.window; ++x)
        window.at(x, y) = img.at(px - half + x, py - half + y);
    const GradientImage wg = gradients(window);
    int best = 0;
    double best_energy = 0.0;
    for (std::size_t r = 0; r < kernels.size(); ++r) {
      const double e = energy(kernels[r], wg, params, margin).breakdown.total;
      if (r == 0 || e < best_energy) {
        best_energy = e;
        best = static_cast<int>(r);
      }
    }
    out.samples[i] = SparseDefocusSample{px, py, dp.radii[best], best_energy};
  }, 1);
  return out;
}

// Edge-aware densification: solve (L + lambda D) d = lambda D d_sparse with
// L the matting Laplacian of the guide and D the indicator of sparse pixels.
// The output is clamped to the candidate radius range.
inline Image propagate_defocus(const SparseDefocusMap& sparse, const Image& guide,
                               const DefocusParams& dp) {
  dp.validate();
  if (sparse.samples.empty())
    throw std::invalid_argument("propagate_defocus: empty sparse map");
  if (sparse.width != guide.width || sparse.height != guide.height)
    throw std::invalid_argument("propagate_defocus: guide/sparse dimension mismatch");

  const int n = guide.width * guide.height;
  Eigen::SparseMatrix<double> A = matting_laplacian(guide, dp.ml_window / 2, dp.ml_epsilon);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> diag;
  diag.reserve(sparse.samples.size());
  for (const SparseDefocusSample& s : sparse.samples) {
    const int idx = s.y * guide.width + s.x;
    diag.emplace_back(idx, idx, dp.prop_lambda);
    rhs[idx] += dp.prop_lambda * s.radius;
  }
  Eigen::SparseMatrix<double> D(n, n);
  D.setFromTriplets(diag.begin(), diag.end());
  A += D;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("propagate_defocus: propagation system is singular");
  const Eigen::VectorXd d = solver.solve(rhs);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("propagate_defocus: solve failed");

  Image out(guide.width, guide.height);
  const double lo = dp.radii.front(), hi = dp.radii.back();
  for (int i = 0; i < n; ++i) out.data[i] = std::clamp(d[i], lo, hi);
  return out;
}

}  // namespace deblur
