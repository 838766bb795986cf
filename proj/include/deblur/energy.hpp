#pragma once

#include "deblur/convolve.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"
#include "deblur/latent.hpp"
#include "deblur/params.hpp"
#include "deblur/penalty.hpp"

namespace deblur {

struct EnergyResult {
  EnergyBreakdown breakdown;
  bool converged = true;
};

// Assemble the breakdown of f for a given kernel/latent pair on the interior
// crop of the given margin.
inline EnergyBreakdown compute_breakdown(const BlurKernel& k, const GradientImage& l,
                                         const GradientImage& b, const EnergyParams& params,
                                         int margin) {
  EnergyBreakdown bd;
  bd.data = data_term(k, l, b, BoundaryPolicy{margin});
  bd.sparsity = sparsity_prior(l, params, margin);
  bd.kernel_prior = kernel_prior(k);
  bd.total = bd.data + params.lambda_l * bd.sparsity + params.lambda_k * bd.kernel_prior;
  return bd;
}

// f_IRLS(k): reformulated energy with the latent minimized out by IRLS.
// margin < 0 uses the kernel's own radius; comparisons across kernels must
// pass the largest radius in play.
inline EnergyResult energy(const BlurKernel& k, const GradientImage& b,
                           const EnergyParams& params, int margin = -1) {
  params.validate();
  if (margin < 0) margin = k.radius();
  LatentResult lat = irls_latent(k, b, params);
  return EnergyResult{compute_breakdown(k, lat.latent, b, params, margin), lat.converged};
}

// f_opt(k_delta): exact energy of the no-blur solution via the pixel-wise
// exhaustive search. kernel_prior is 1 by construction.
inline EnergyResult energy_noblur_exact(const GradientImage& b, const EnergyParams& params,
                                        int margin = 0) {
  params.validate();
  GradientImage lat = exact_noblur_latent(b, params);
  return EnergyResult{compute_breakdown(BlurKernel::delta(), lat, b, params, margin), true};
}

// f_IRLS(k) / f_opt(k_delta), both on the interior crop of k's radius.
// Below 1 the energy favors k over the no-blur solution.
inline double energy_ratio(const BlurKernel& k, const GradientImage& b,
                           const EnergyParams& params) {
  const int margin = k.radius();
  const double num = energy(k, b, params, margin).breakdown.total;
  const double den = energy_noblur_exact(b, params, margin).breakdown.total;
  return num / den;
}

// rho_l(l_irls_k) / rho_l(l_opt_delta) on the common interior crop.
inline double prior_ratio(const BlurKernel& k, const GradientImage& b,
                          const EnergyParams& params) {
  const int margin = k.radius();
  const double num = energy(k, b, params, margin).breakdown.sparsity;
  const double den = energy_noblur_exact(b, params, margin).breakdown.sparsity;
  return num / den;
}

}  // namespace deblur
