#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace deblur {

struct CgResult {
  bool converged = true;
  int iterations = 0;
  double rel_residual = 0.0;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// Conjugate gradient on a symmetric positive (semi)definite operator, warm
// started at x. The quadratic objective is non-increasing across iterations.
// Convergence is |r| <= tol * |r0|.
template <typename ApplyFn>
CgResult conjugate_gradient(ApplyFn&& apply, const std::vector<double>& rhs,
                            std::vector<double>& x, double tol, int max_iters) {
  std::vector<double> r = apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
  double rr = detail::dot(r, r);
  const double rr0 = rr;
  CgResult res;
  if (rr0 == 0.0) return res;
  std::vector<double> p = r;
  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> ap = apply(p);
    const double pap = detail::dot(p, ap);
    if (!(pap > 0.0)) break;  // ran out of positive curvature
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += alpha * p[i];
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * ap[i];
    const double rr_new = detail::dot(r, r);
    res.iterations = it + 1;
    res.rel_residual = std::sqrt(rr_new / rr0);
    if (res.rel_residual <= tol) {
      return res;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
  }
  res.rel_residual = std::sqrt(rr / rr0);
  res.converged = res.rel_residual <= tol;
  return res;
}

}  // namespace deblur
