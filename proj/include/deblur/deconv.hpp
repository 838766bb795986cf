#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "deblur/convolve.hpp"
#include "deblur/energy.hpp"
#include "deblur/estimate.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"
#include "deblur/latent.hpp"
#include "deblur/params.hpp"

namespace deblur {

// Multi-scale stack of blurred-gradient images, coarsest first; the finest
// level is the input.
struct Pyramid {
  std::vector<GradientImage> levels;
  double ratio = 1.0;
};

enum class TracePhase { LatentStep, KernelStep };

struct TraceEntry {
  int level = 0;
  int iteration = 0;
  TracePhase phase = TracePhase::LatentStep;
  EnergyBreakdown breakdown;
  BlurKernel kernel;
  bool converged = true;
};

struct DeconvTrace {
  std::vector<TraceEntry> entries;
};

struct DeconvResult {
  BlurKernel kernel;
  GradientImage latent;
  DeconvTrace trace;
};

namespace detail {

inline int round_dim(int v, double s) { return std::max(3, static_cast<int>(std::lround(v * s))); }

// Binomial [1 2 1]/4 prefilter along both axes, replicate boundary.
inline Image binomial_smooth(const Image& in) {
  Image tmp(in.width, in.height), out(in.width, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      const int xm = std::max(0, x - 1), xp = std::min(in.width - 1, x + 1);
      tmp.at(x, y) = 0.25 * in.at(xm, y) + 0.5 * in.at(x, y) + 0.25 * in.at(xp, y);
    }
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      const int ym = std::max(0, y - 1), yp = std::min(in.height - 1, y + 1);
      out.at(x, y) = 0.25 * tmp.at(x, ym) + 0.5 * tmp.at(x, y) + 0.25 * tmp.at(x, yp);
    }
  return out;
}

inline Image bilinear_resize(const Image& in, int tw, int th) {
  Image out(tw, th);
  const double sx = static_cast<double>(in.width) / tw;
  const double sy = static_cast<double>(in.height) / th;
  for (int y = 0; y < th; ++y)
    for (int x = 0; x < tw; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, in.width - 1.0);
      const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, in.height - 1.0);
      const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
      const int x1 = std::min(x0 + 1, in.width - 1), y1 = std::min(y0 + 1, in.height - 1);
      const double ax = fx - x0, ay = fy - y0;
      out.at(x, y) = (1 - ax) * (1 - ay) * in.at(x0, y0) + ax * (1 - ay) * in.at(x1, y0) +
                     (1 - ax) * ay * in.at(x0, y1) + ax * ay * in.at(x1, y1);
    }
  return out;
}

// Low-pass then bilinear downsample of one gradient channel, with the
// amplitude compensated by the coarse-grid step (fine pixels per coarse pixel)
// so a step edge keeps its full height at every level.
inline Image downsample_gradient(const Image& in, int tw, int th, double step_factor) {
  Image out = bilinear_resize(binomial_smooth(in), tw, th);
  for (double& v : out.data) v *= step_factor;
  return out;
}

inline double image_sumsq(const GradientImage& g) {
  double s = 0.0;
  for (double v : g.gx.data) s += v * v;
  for (double v : g.gy.data) s += v * v;
  return s;
}

}  // namespace detail

// Build `levels` pyramid levels; level j has dimensions scaled by
// ratio^(levels-1-j), generated by chaining per-level downsampling.
inline Pyramid build_pyramid(const GradientImage& b, double ratio, int levels) {
  if (!(ratio > 0.0) || !(ratio < 1.0))
    throw std::invalid_argument("build_pyramid: ratio must be in (0,1)");
  if (levels < 1) throw std::invalid_argument("build_pyramid: need at least one level");
  Pyramid pyr;
  pyr.ratio = ratio;
  pyr.levels.resize(levels);
  pyr.levels[levels - 1] = b;
  for (int j = levels - 2; j >= 0; --j) {
    const GradientImage& fine = pyr.levels[j + 1];
    const double s = std::pow(ratio, static_cast<double>(levels - 1 - j));
    const int tw = detail::round_dim(b.width(), s);
    const int th = detail::round_dim(b.height(), s);
    pyr.levels[j] = GradientImage(
        detail::downsample_gradient(fine.gx, tw, th, static_cast<double>(fine.width()) / tw),
        detail::downsample_gradient(fine.gy, tw, th, static_cast<double>(fine.height()) / th));
  }
  return pyr;
}

// Number of levels so that the coarsest kernel still has >= min_taps taps on
// its larger axis; levels whose rounded kernel size stops shrinking add
// nothing and are not generated.
inline int pyramid_levels_for_kernel(int kw, int kh, double ratio, int min_taps = 3) {
  const int dim = std::max(kw, kh);
  int levels = 1;
  int prev = dim;
  while (true) {
    const int next = detail::nearest_odd(dim * std::pow(ratio, levels));
    if (next < min_taps || next >= prev) break;
    prev = next;
    ++levels;
  }
  return levels;
}

namespace detail {

// One level of alternating estimation. Appends to the trace; k is updated in
// place and the final latent is returned. The k-step solves the ridge system
// under nonnegativity, warm started at the current kernel, which decreases
// f_k by construction; the unit-sum normalization is deferred to the end of
// the level (delayed scaling), which is what lets the iteration leave the
// no-blur kernel. Working kernels inside a level are therefore nonnegative
// but not normalized.
inline GradientImage run_level(const GradientImage& b, BlurKernel& k, const EnergyParams& params,
                               int iters, int level, DeconvTrace& trace) {
  const int margin = k.radius();
  LatentResult lat = irls_latent(k, b, params);
  trace.entries.push_back(TraceEntry{level, 0, TracePhase::LatentStep,
                                     compute_breakdown(k, lat.latent, b, params, margin), k,
                                     lat.converged});
  for (int t = 1; t <= iters; ++t) {
    BlurKernel next = estimate_kernel_nonneg(lat.latent, b, k.width, k.height, params.lambda_k,
                                             margin, k);
    if (kernel_objective(next, lat.latent, b, params.lambda_k, margin) >
        kernel_objective(k, lat.latent, b, params.lambda_k, margin))
      next = k;  // floating-point dust guard; the solver is monotone
    k = next;
    trace.entries.push_back(TraceEntry{level, t, TracePhase::KernelStep,
                                       compute_breakdown(k, lat.latent, b, params, margin), k,
                                       lat.converged});
    lat = irls_latent(k, b, params);
    trace.entries.push_back(TraceEntry{level, t, TracePhase::LatentStep,
                                       compute_breakdown(k, lat.latent, b, params, margin), k,
                                       lat.converged});
  }
  // Normalize and refresh the latent so the level ends on a valid kernel.
  k = project_kernel(k);
  lat = irls_latent(k, b, params);
  trace.entries.push_back(TraceEntry{level, iters + 1, TracePhase::LatentStep,
                                     compute_breakdown(k, lat.latent, b, params, margin), k,
                                     lat.converged});
  return lat.latent;
}

inline void check_deconv_input(const GradientImage& b, int kw, int kh, int iters) {
  if (kw <= 0 || kh <= 0 || kw % 2 == 0 || kh % 2 == 0)
    throw std::invalid_argument("blind_deconv: kernel size must be odd");
  if (iters < 1) throw std::invalid_argument("blind_deconv: need at least one iteration");
  if (image_sumsq(b) <= 0.0)
    throw std::invalid_argument("blind_deconv: degenerate all-zero gradients");
}

}  // namespace detail

// Naive MAP blind deconvolution at a single scale, alternating the IRLS
// l-step and the ridge k-step from a delta kernel.
inline DeconvResult blind_deconv_single_scale(const GradientImage& b, int kw, int kh,
                                              const EnergyParams& params, int iters) {
  params.validate();
  detail::check_deconv_input(b, kw, kh, iters);
  DeconvResult res;
  res.kernel = BlurKernel::delta(kw, kh);
  res.latent = detail::run_level(b, res.kernel, params, iters, 0, res.trace);
  return res;
}

// Coarse-to-fine variant: run the single-scale loop on each pyramid level and
// upsample the kernel between levels.
inline DeconvResult blind_deconv_multiscale(const GradientImage& b, int kw, int kh,
                                            const EnergyParams& params, int iters_per_level,
                                            double ratio) {
  params.validate();
  detail::check_deconv_input(b, kw, kh, iters_per_level);
  if (!(ratio > 0.0) || !(ratio < 1.0))
    throw std::invalid_argument("blind_deconv_multiscale: ratio must be in (0,1)");

  const int levels = pyramid_levels_for_kernel(kw, kh, ratio);
  const Pyramid pyr = build_pyramid(b, ratio, levels);

  DeconvResult res;
  for (int j = 0; j < levels; ++j) {
    const double s = std::pow(ratio, static_cast<double>(levels - 1 - j));
    const int lkw = detail::nearest_odd(kw * s);
    const int lkh = detail::nearest_odd(kh * s);
    if (j == 0)
      res.kernel = BlurKernel::delta(lkw, lkh);
    else
      res.kernel = detail::resize_kernel_to(res.kernel, lkw, lkh);
    res.latent = detail::run_level(pyr.levels[j], res.kernel, params, iters_per_level, j,
                                   res.trace);
  }
  return res;
}

}  // namespace deblur
