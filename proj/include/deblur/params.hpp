#pragma once

#include <cmath>
#include <stdexcept>

namespace deblur {

// Scalar hyperparameters of the energy and its solvers. Defaults are the
// recommended operating point (alpha=0.1, tau=0.01, lambda_l=0.00064,
// lambda_k=0.001) plus desk-scale solver controls.
struct EnergyParams {
  double alpha = 0.1;      // sparseness exponent, 0 < alpha <= 2
  double tau = 0.01;       // quadratic-region threshold of phi
  double lambda_l = 0.00064;
  double lambda_k = 0.001;
  int irls_iters = 8;
  double cg_tol = 1e-5;    // relative residual tolerance
  int cg_max_iters = 100;
  int noblur_grid = 2001;  // samples for the exact no-blur exhaustive search

  void validate() const {
    if (!(alpha > 0.0) || alpha > 2.0)
      throw std::invalid_argument("EnergyParams: alpha must be in (0, 2]");
    if (!(tau > 0.0)) throw std::invalid_argument("EnergyParams: tau must be positive");
    if (lambda_l < 0.0 || lambda_k < 0.0)
      throw std::invalid_argument("EnergyParams: prior weights must be nonnegative");
    if (irls_iters < 1) throw std::invalid_argument("EnergyParams: irls_iters must be >= 1");
    if (noblur_grid < 3) throw std::invalid_argument("EnergyParams: noblur_grid must be >= 3");
    if (!(cg_tol > 0.0) || cg_max_iters < 1)
      throw std::invalid_argument("EnergyParams: invalid CG controls");
  }
};

// Components of one evaluation of f(k):
// total = data + lambda_l * sparsity + lambda_k * kernel_prior.
struct EnergyBreakdown {
  double total = 0.0;
  double data = 0.0;
  double sparsity = 0.0;
  double kernel_prior = 0.0;
};

}  // namespace deblur
