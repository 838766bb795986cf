#pragma once

#include <cmath>

#include "deblur/image.hpp"
#include "deblur/params.hpp"

namespace deblur {

// Two-branch sparseness penalty:
//   phi(x) = |x|^alpha        if |x| >= tau
//          = tau^(alpha-2) x^2  otherwise
// Continuous at |x| = tau since tau^(alpha-2) * tau^2 = tau^alpha.
inline double phi(double x, const EnergyParams& p) {
  const double a = std::fabs(x);
  if (a >= p.tau) return std::pow(a, p.alpha);
  return std::pow(p.tau, p.alpha - 2.0) * a * a;
}

namespace detail {

// phi with the quadratic-branch coefficient hoisted out of the loop.
inline double phi_hoisted(double x, double alpha, double tau, double tau_pow) {
  const double a = std::fabs(x);
  if (a >= tau) return std::pow(a, alpha);
  return tau_pow * a * a;
}

inline double phi_sum(const Image& ch, const EnergyParams& p, int margin) {
  const double tau_pow = std::pow(p.tau, p.alpha - 2.0);
  double s = 0.0;
  for (int y = margin; y < ch.height - margin; ++y)
    for (int x = margin; x < ch.width - margin; ++x)
      s += phi_hoisted(ch.at(x, y), p.alpha, p.tau, tau_pow);
  return s;
}

}  // namespace detail

// rho_l(g) = sum over pixels of phi(gx) + phi(gy), optionally restricted to
// the interior crop that excludes `margin` rows/columns on each side.
inline double sparsity_prior(const GradientImage& g, const EnergyParams& p, int margin = 0) {
  if (margin < 0 || 2 * margin >= g.width() || 2 * margin >= g.height())
    throw std::invalid_argument("sparsity_prior: margin leaves no interior");
  return detail::phi_sum(g.gx, p, margin) + detail::phi_sum(g.gy, p, margin);
}

}  // namespace deblur
