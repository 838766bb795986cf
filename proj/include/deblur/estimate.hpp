#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "deblur/cg.hpp"
#include "deblur/convolve.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

struct KernelSolveOptions {
  double tol = 1e-7;
  int max_iters = 300;
};

namespace detail {

// Applies the forward model of the k-step: (B k)(p) = (k * l)(p) for p in the
// interior; entries outside the interior are zero.
inline void kstep_forward(const Image& l, const std::vector<double>& taps, int kw, int kh,
                          int margin, Image& out) {
  const int w = l.width, h = l.height;
  const int cx = kw / 2, cy = kh / 2;
  for (double& v : out.data) v = 0.0;
  for (int y = margin; y < h - margin; ++y)
    for (int x = margin; x < w - margin; ++x) {
      double acc = 0.0;
      for (int j = 0; j < kh; ++j) {
        const double* src = &l.data[static_cast<std::size_t>(y + cy - j) * w];
        const double* kt = &taps[static_cast<std::size_t>(j) * kw];
        for (int i = 0; i < kw; ++i) acc += kt[i] * src[x + cx - i];
      }
      out.at(x, y) = acc;
    }
}

// Adjoint: (B^T r)(u) = sum over interior pixels of r(p) * l(p + c - u).
inline void kstep_adjoint(const Image& l, const Image& r, int kw, int kh, int margin,
                          std::vector<double>& out) {
  const int w = l.width, h = l.height;
  const int cx = kw / 2, cy = kh / 2;
  for (int j = 0; j < kh; ++j)
    for (int i = 0; i < kw; ++i) {
      double acc = 0.0;
      for (int y = margin; y < h - margin; ++y) {
        const double* lr = &l.data[static_cast<std::size_t>(y + cy - j) * w];
        const double* rr = &r.data[static_cast<std::size_t>(y) * w];
        for (int x = margin; x < w - margin; ++x) acc += rr[x] * lr[x + cx - i];
      }
      out[static_cast<std::size_t>(j) * kw + i] += acc;
    }
}

}  // namespace detail

// Unconstrained ridge-regularized least-squares kernel:
// argmin_k ||k*l - b||^2 (interior crop, both channels) + lambda_k ||k||^2,
// solved by conjugate gradient on the normal equations, warm started at k0
// (delta by default, which makes the solution never worse than delta).
inline BlurKernel estimate_kernel_raw(const GradientImage& l, const GradientImage& b, int kw,
                                      int kh, double lambda_k, int margin = -1,
                                      const std::optional<BlurKernel>& k0 = std::nullopt,
                                      const KernelSolveOptions& opts = {}) {
  if (kw <= 0 || kh <= 0 || kw % 2 == 0 || kh % 2 == 0)
    throw std::invalid_argument("estimate_kernel: size must be odd");
  if (l.width() != b.width() || l.height() != b.height())
    throw std::invalid_argument("estimate_kernel: dimension mismatch");
  if (lambda_k < 0.0) throw std::invalid_argument("estimate_kernel: negative lambda_k");
  const int radius = std::max(kw, kh) / 2;
  if (margin < 0) margin = radius;
  if (margin < radius) throw std::invalid_argument("estimate_kernel: margin below kernel radius");
  if (2 * margin >= l.width() || 2 * margin >= l.height())
    throw std::invalid_argument("estimate_kernel: kernel exceeds image interior");

  double lsq = 0.0;
  for (double v : l.gx.data) lsq += v * v;
  for (double v : l.gy.data) lsq += v * v;
  if (lsq <= 0.0)
    throw std::invalid_argument("estimate_kernel: degenerate all-zero gradients");

  const std::size_t n = static_cast<std::size_t>(kw) * kh;
  Image tmp(l.width(), l.height());

  std::vector<double> rhs(n, 0.0);
  {
    Image masked = b.gx;
    detail::zero_margin(masked, margin);
    detail::kstep_adjoint(l.gx, masked, kw, kh, margin, rhs);
    masked = b.gy;
    detail::zero_margin(masked, margin);
    detail::kstep_adjoint(l.gy, masked, kw, kh, margin, rhs);
  }

  auto apply = [&](const std::vector<double>& kv) {
    std::vector<double> out(n, 0.0);
    detail::kstep_forward(l.gx, kv, kw, kh, margin, tmp);
    detail::kstep_adjoint(l.gx, tmp, kw, kh, margin, out);
    detail::kstep_forward(l.gy, kv, kw, kh, margin, tmp);
    detail::kstep_adjoint(l.gy, tmp, kw, kh, margin, out);
    for (std::size_t i = 0; i < n; ++i) out[i] += lambda_k * kv[i];
    return out;
  };

  BlurKernel init = k0 ? *k0 : BlurKernel::delta(kw, kh);
  if (init.width != kw || init.height != kh)
    throw std::invalid_argument("estimate_kernel: warm start size mismatch");
  std::vector<double> x = init.taps;
  conjugate_gradient(apply, rhs, x, opts.tol, opts.max_iters);

  BlurKernel out(kw, kh);
  out.taps = std::move(x);
  return out;
}

// Ridge least squares under k >= 0, by gradient projection alternated with
// conjugate gradient on the free variables. Warm started at max(k0, 0); every
// accepted move decreases the k-step objective, so the result is never worse
// than the initializer. The unit-sum normalization is *not* applied here: the
// alternating solver normalizes only at level end (delayed scaling), which is
// what lets the estimation leave the no-blur kernel.
inline BlurKernel estimate_kernel_nonneg(const GradientImage& l, const GradientImage& b, int kw,
                                         int kh, double lambda_k, int margin = -1,
                                         const std::optional<BlurKernel>& k0 = std::nullopt,
                                         const KernelSolveOptions& opts = {}) {
  if (kw <= 0 || kh <= 0 || kw % 2 == 0 || kh % 2 == 0)
    throw std::invalid_argument("estimate_kernel: size must be odd");
  if (l.width() != b.width() || l.height() != b.height())
    throw std::invalid_argument("estimate_kernel: dimension mismatch");
  if (lambda_k < 0.0) throw std::invalid_argument("estimate_kernel: negative lambda_k");
  const int radius = std::max(kw, kh) / 2;
  if (margin < 0) margin = radius;
  if (margin < radius) throw std::invalid_argument("estimate_kernel: margin below kernel radius");
  if (2 * margin >= l.width() || 2 * margin >= l.height())
    throw std::invalid_argument("estimate_kernel: kernel exceeds image interior");

  double lsq = 0.0;
  for (double v : l.gx.data) lsq += v * v;
  for (double v : l.gy.data) lsq += v * v;
  if (lsq <= 0.0)
    throw std::invalid_argument("estimate_kernel: degenerate all-zero gradients");

  const std::size_t n = static_cast<std::size_t>(kw) * kh;
  Image tmp(l.width(), l.height());

  std::vector<double> rhs(n, 0.0);
  {
    Image masked = b.gx;
    detail::zero_margin(masked, margin);
    detail::kstep_adjoint(l.gx, masked, kw, kh, margin, rhs);
    masked = b.gy;
    detail::zero_margin(masked, margin);
    detail::kstep_adjoint(l.gy, masked, kw, kh, margin, rhs);
  }

  auto apply = [&](const std::vector<double>& kv) {
    std::vector<double> out(n, 0.0);
    detail::kstep_forward(l.gx, kv, kw, kh, margin, tmp);
    detail::kstep_adjoint(l.gx, tmp, kw, kh, margin, out);
    detail::kstep_forward(l.gy, kv, kw, kh, margin, tmp);
    detail::kstep_adjoint(l.gy, tmp, kw, kh, margin, out);
    for (std::size_t i = 0; i < n; ++i) out[i] += lambda_k * kv[i];
    return out;
  };
  auto dot = [](const std::vector<double>& a, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * c[i];
    return s;
  };
  // Quadratic model q(x) = x'Ax/2 - rhs'x; equal to (f_k - const)/2.
  auto quad = [&](const std::vector<double>& x) {
    return 0.5 * dot(x, apply(x)) - dot(rhs, x);
  };

  BlurKernel init = k0 ? *k0 : BlurKernel::delta(kw, kh);
  if (init.width != kw || init.height != kh)
    throw std::invalid_argument("estimate_kernel: warm start size mismatch");
  std::vector<double> x = init.taps;
  for (double& v : x) v = std::max(v, 0.0);
  double fx = quad(x);

  double rhs_scale = 0.0;
  for (double v : rhs) rhs_scale = std::max(rhs_scale, std::fabs(v));
  const double kkt_tol = opts.tol * (rhs_scale + lambda_k + 1.0);

  const int rounds = 8;
  for (int round = 0; round < rounds; ++round) {
    std::vector<double> g = apply(x);
    for (std::size_t i = 0; i < n; ++i) g[i] -= rhs[i];
    double viol = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      viol = std::max(viol, x[i] > 0.0 ? std::fabs(g[i]) : std::max(0.0, -g[i]));
    if (viol <= kkt_tol) break;

    // Cauchy step along the projected steepest descent direction.
    std::vector<double> d(n, 0.0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] > 0.0 || g[i] < 0.0) {
        d[i] = -g[i];
        any = any || d[i] != 0.0;
      }
    if (!any) break;
    const std::vector<double> ad = apply(d);
    const double dad = dot(d, ad);
    double t = dad > 0.0 ? dot(d, d) / dad : 1.0;
    for (int bt = 0; bt < 40; ++bt) {
      std::vector<double> xn = x;
      for (std::size_t i = 0; i < n; ++i) xn[i] = std::max(xn[i] + t * d[i], 0.0);
      const double fn = quad(xn);
      if (fn <= fx) {
        x = std::move(xn);
        fx = fn;
        break;
      }
      t *= 0.5;
    }

    // CG restricted to the free variables, then a projected line search
    // toward the subspace solution (monotone: the 1D quadratic decreases on
    // [0,1] toward the subspace minimizer).
    std::vector<std::uint8_t> free_set(n);
    for (std::size_t i = 0; i < n; ++i) free_set[i] = x[i] > 0.0;
    auto sub_apply = [&](const std::vector<double>& v) {
      std::vector<double> masked = v;
      for (std::size_t i = 0; i < n; ++i)
        if (!free_set[i]) masked[i] = 0.0;
      std::vector<double> out = apply(masked);
      for (std::size_t i = 0; i < n; ++i)
        if (!free_set[i]) out[i] = 0.0;
      return out;
    };
    std::vector<double> sub_rhs = rhs;
    for (std::size_t i = 0; i < n; ++i)
      if (!free_set[i]) sub_rhs[i] = 0.0;
    std::vector<double> z = x;
    conjugate_gradient(sub_apply, sub_rhs, z, opts.tol,
                       std::min(opts.max_iters, static_cast<int>(n) + 10));
    double s = 1.0;
    for (int bt = 0; bt < 40; ++bt) {
      std::vector<double> xn = x;
      for (std::size_t i = 0; i < n; ++i) xn[i] = std::max(xn[i] + s * (z[i] - x[i]), 0.0);
      const double fn = quad(xn);
      if (fn <= fx) {
        x = std::move(xn);
        fx = fn;
        break;
      }
      s *= 0.5;
    }
  }

  BlurKernel out(kw, kh);
  out.taps = std::move(x);
  return out;
}

// The k-step: solve the ridge system, then clamp negatives and renormalize.
inline BlurKernel estimate_kernel(const GradientImage& l, const GradientImage& b, int kw, int kh,
                                  double lambda_k, int margin = -1,
                                  const std::optional<BlurKernel>& k0 = std::nullopt,
                                  const KernelSolveOptions& opts = {}) {
  return project_kernel(estimate_kernel_nonneg(l, b, kw, kh, lambda_k, margin, k0, opts));
}

// Value of the k-step objective f_k(k; l) = data + lambda_k ||k||^2.
inline double kernel_objective(const BlurKernel& k, const GradientImage& l,
                               const GradientImage& b, double lambda_k, int margin) {
  return data_term(k, l, b, BoundaryPolicy{margin}) + lambda_k * kernel_prior(k);
}

}  // namespace deblur
