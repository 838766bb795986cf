#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "deblur/image.hpp"

namespace deblur {

// Matting Laplacian of a single-channel guide image: for every full window
// w_k of the given radius,
//   L(i,j) += delta_ij - (1/n) * (1 + (I_i - mu)(I_j - mu) / (var + eps/n)),
// n = window pixel count. Symmetric positive semidefinite, annihilates
// constants.
inline Eigen::SparseMatrix<double> matting_laplacian(const Image& guide, int window_radius = 1,
                                                     double epsilon = 1e-5) {
  if (window_radius < 1) throw std::invalid_argument("matting_laplacian: radius must be >= 1");
  const int w = guide.width, h = guide.height;
  const int side = 2 * window_radius + 1;
  const int n = side * side;
  if (w < side || h < side)
    throw std::invalid_argument("matting_laplacian: guide smaller than one window");

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(w) * h * n);
  std::vector<int> idx(n);
  std::vector<double> val(n);

  for (int cy = window_radius; cy < h - window_radius; ++cy)
    for (int cx = window_radius; cx < w - window_radius; ++cx) {
      double mean = 0.0, sq = 0.0;
      int t = 0;
      for (int dy = -window_radius; dy <= window_radius; ++dy)
        for (int dx = -window_radius; dx <= window_radius; ++dx) {
          const double v = guide.at(cx + dx, cy + dy);
          idx[t] = (cy + dy) * w + (cx + dx);
          val[t] = v;
          mean += v;
          sq += v * v;
          ++t;
        }
      mean /= n;
      const double var = sq / n - mean * mean;
      const double denom = var + epsilon / n;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const double wab = (a == b ? 1.0 : 0.0) -
                             (1.0 + (val[a] - mean) * (val[b] - mean) / denom) / n;
          triplets.emplace_back(idx[a], idx[b], wab);
        }
    }

  Eigen::SparseMatrix<double> L(w * h, w * h);
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

}  // namespace deblur
