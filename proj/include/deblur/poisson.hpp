#pragma once

#include <complex>
#include <vector>

#include "deblur/fft.hpp"
#include "deblur/image.hpp"

namespace deblur {

// Least-squares intensity image whose forward-difference gradients best match
// g under periodic boundary assumptions, solved in the frequency domain. The
// mean is pinned to 0.5. Used for visualizing gradient-domain latents.
inline Image poisson_reconstruct(const GradientImage& g) {
  const int w = g.width(), h = g.height();
  const int wc = w / 2 + 1;
  auto fx = detail::fft2_r2c(g.gx);
  auto fy = detail::fft2_r2c(g.gy);

  const double two_pi = 6.283185307179586476925286766559;
  std::vector<std::complex<double>> sol(fx.size());
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < wc; ++u) {
      const std::size_t idx = static_cast<std::size_t>(v) * wc + u;
      if (u == 0 && v == 0) {
        sol[idx] = std::complex<double>(0.5 * w * h, 0.0);
        continue;
      }
      // Eigenvalues of the periodic forward-difference stencils.
      const std::complex<double> dx = std::polar(1.0, two_pi * u / w) - 1.0;
      const std::complex<double> dy = std::polar(1.0, two_pi * v / h) - 1.0;
      const double denom = std::norm(dx) + std::norm(dy);
      sol[idx] = (std::conj(dx) * fx[idx] + std::conj(dy) * fy[idx]) / denom;
    }
  }
  return detail::ifft2_c2r(sol, w, h);
}

}  // namespace deblur
