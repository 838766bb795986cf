#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "deblur/cg.hpp"
#include "deblur/convolve.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"
#include "deblur/parallel.hpp"
#include "deblur/params.hpp"
#include "deblur/penalty.hpp"

namespace deblur {

namespace detail {

// Per-pixel objective of the no-blur problem: E(l) = (l - b)^2 + lambda_l*phi(l).
// Solved by exhaustive search over `grid` samples on [-R, R], R = max(1, 2|b|),
// followed by one parabolic refinement around the grid minimum. The search is
// run on |b| and the sign restored, which makes the solver exactly odd; the
// result is clamped to [0, |b|] where the true minimizer provably lies.
class ShrinkSolver {
 public:
  explicit ShrinkSolver(const EnergyParams& p)
      : p_(p), tau_pow_(std::pow(p.tau, p.alpha - 2.0)) {
    // Shared penalty table for the common R = 1 range (|b| <= 0.5).
    table_.resize(p_.noblur_grid);
    const double step = 2.0 / (p_.noblur_grid - 1);
    for (int i = 0; i < p_.noblur_grid; ++i) {
      const double l = -1.0 + i * step;
      table_[i] = p_.lambda_l * phi_hoisted(l, p_.alpha, p_.tau, tau_pow_);
    }
  }

  double solve(double b) const {
    if (p_.lambda_l == 0.0 || b == 0.0) return b;
    const double ab = std::fabs(b);
    const double sign = b > 0.0 ? 1.0 : -1.0;
    const double R = std::max(1.0, 2.0 * ab);
    const int n = p_.noblur_grid;
    const double step = 2.0 * R / (n - 1);
    const bool shared = (R == 1.0);

    auto penalty = [&](int i) {
      if (shared) return table_[i];
      const double l = -R + i * step;
      return p_.lambda_l * phi_hoisted(l, p_.alpha, p_.tau, tau_pow_);
    };
    auto objective_at = [&](double l) {
      const double d = l - ab;
      return d * d + p_.lambda_l * phi_hoisted(l, p_.alpha, p_.tau, tau_pow_);
    };

    int best_i = 0;
    double best_e = objective_at(-R);
    for (int i = 1; i < n; ++i) {
      const double l = -R + i * step;
      const double d = l - ab;
      const double e = d * d + penalty(i);
      if (e < best_e) {
        best_e = e;
        best_i = i;
      }
    }
    double best_l = -R + best_i * step;

    if (best_i > 0 && best_i < n - 1) {
      const double em = objective_at(best_l - step);
      const double ep = objective_at(best_l + step);
      const double denom = em - 2.0 * best_e + ep;
      if (denom > 0.0) {
        const double vertex = best_l + 0.5 * step * (em - ep) / denom;
        const double ev = objective_at(vertex);
        if (ev < best_e) {
          best_e = ev;
          best_l = vertex;
        }
      }
    }
    best_l = std::clamp(best_l, 0.0, ab);
    return sign * best_l;
  }

 private:
  EnergyParams p_;
  double tau_pow_;
  std::vector<double> table_;
};

}  // namespace detail

// Minimizer of (l - b_i)^2 + lambda_l * phi(l) for a single pixel value.
inline double scalar_shrink(double b_i, const EnergyParams& params) {
  params.validate();
  return detail::ShrinkSolver(params).solve(b_i);
}

// Exact per-pixel latent for k = delta; each pixel of each channel is solved
// independently by exhaustive search.
inline GradientImage exact_noblur_latent(const GradientImage& b, const EnergyParams& params) {
  params.validate();
  if (params.lambda_l == 0.0) return b;
  const detail::ShrinkSolver solver(params);
  GradientImage out(b.width(), b.height());
  const int h = b.height(), w = b.width();
  parallel_for(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      out.gx.at(x, y) = solver.solve(b.gx.at(x, y));
      out.gy.at(x, y) = solver.solve(b.gy.at(x, y));
    }
  }, std::max(1, h / 8));
  return out;
}

struct LatentResult {
  GradientImage latent;
  bool converged = true;
};

// Objective minimized by the l-step: interior-crop data term plus the full
// phi prior, summed over both channels.
inline double latent_objective(const BlurKernel& k, const GradientImage& l,
                               const GradientImage& b, const EnergyParams& params,
                               const BoundaryPolicy& bp) {
  return data_term(k, l, b, bp) + params.lambda_l * sparsity_prior(l, params, 0);
}

namespace detail {

// One channel of the IRLS l-step. Returns the best iterate by true objective
// (the initializer l = b included) and whether every inner CG solve converged.
inline std::pair<Image, bool> irls_channel(const BlurKernel& k, const Image& b,
                                           const EnergyParams& p, int margin) {
  const int w = b.width, h = b.height;
  const std::size_t n = b.size();
  const double tau_pow = std::pow(p.tau, p.alpha - 2.0);

  Image masked_b = b;
  zero_margin(masked_b, margin);
  const Image rhs_img = correlate(masked_b, k);

  auto objective = [&](const Image& l) {
    Image conv = convolve(l, k);
    double s = 0.0;
    for (int y = margin; y < h - margin; ++y)
      for (int x = margin; x < w - margin; ++x) {
        const double r = conv.at(x, y) - b.at(x, y);
        s += r * r;
      }
    if (p.lambda_l > 0.0)
      for (double v : l.data) s += p.lambda_l * phi_hoisted(v, p.alpha, p.tau, tau_pow);
    return s;
  };

  Image cur = b;
  Image best = b;
  double best_obj = objective(b);
  bool all_converged = true;

  std::vector<double> weights(n);
  for (int iter = 0; iter < p.irls_iters; ++iter) {
    for (std::size_t i = 0; i < n; ++i)
      weights[i] = std::pow(std::max(std::fabs(cur.data[i]), p.tau), p.alpha - 2.0);

    auto apply = [&](const std::vector<double>& xv) {
      Image x(w, h);
      x.data = xv;
      Image conv = convolve(x, k);
      zero_margin(conv, margin);
      Image corr = correlate(conv, k);
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i)
        out[i] = corr.data[i] + p.lambda_l * weights[i] * xv[i];
      return out;
    };

    std::vector<double> x = cur.data;
    const CgResult cg = conjugate_gradient(apply, rhs_img.data, x, p.cg_tol, p.cg_max_iters);
    all_converged = all_converged && cg.converged;
    cur.data = std::move(x);

    const double obj = objective(cur);
    if (obj < best_obj) {
      best_obj = obj;
      best = cur;
    }
  }
  return {std::move(best), all_converged};
}

}  // namespace detail

// IRLS approximate minimizer of ||k*l - b||^2 + lambda_l * rho_l(l); the two
// channels are solved independently. Weights max(|l|, tau)^(alpha-2) make the
// weighted quadratic agree with phi on both branches at the previous iterate.
inline LatentResult irls_latent(const BlurKernel& k, const GradientImage& b,
                                const EnergyParams& params) {
  params.validate();
  const int margin = k.radius();
  if (2 * margin >= b.width() || 2 * margin >= b.height())
    throw std::invalid_argument("irls_latent: kernel too large for image");
  auto [lx, okx] = detail::irls_channel(k, b.gx, params, margin);
  auto [ly, oky] = detail::irls_channel(k, b.gy, params, margin);
  return LatentResult{GradientImage(std::move(lx), std::move(ly)), okx && oky};
}

}  // namespace deblur
