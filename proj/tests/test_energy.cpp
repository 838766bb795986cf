#include <cmath>

#include <gtest/gtest.h>

#include "deblur/energy.hpp"
#include "deblur/synthetic.hpp"

using namespace deblur;

namespace {

EnergyParams recommended() {
  EnergyParams p;
  p.alpha = 0.1;
  p.tau = 0.01;
  p.lambda_l = 0.00064;
  p.lambda_k = 0.001;
  return p;
}

GradientImage random_gradients(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  GradientImage g(w, h);
  for (double& v : g.gx.data) v = rng.uniform(-1.0, 1.0);
  for (double& v : g.gy.data) v = rng.uniform(-1.0, 1.0);
  return g;
}

// Step-rich scene blurred by a 7-tap kernel, the running example of the
// convergence experiments.
GradientImage step_edge_case(BlurKernel* k_out, std::uint64_t seed = 201) {
  const Image sharp = make_step_texture_image(64, 64, seed);
  const BlurKernel k = box_kernel_1d(7);
  if (k_out) *k_out = k;
  return synthesize_blurred(sharp, k, seed + 1000);
}

}  // namespace

TEST(Energy, DeltaWithLambdaZero) {
  EnergyParams p = recommended();
  p.lambda_l = 0.0;
  const GradientImage b = random_gradients(10, 10, 1);
  const EnergyResult e = energy(BlurKernel::delta(), b, p);
  EXPECT_NEAR(e.breakdown.data, 0.0, 1e-18);
  EXPECT_NEAR(e.breakdown.sparsity, sparsity_prior(b, p), 1e-12);
  EXPECT_DOUBLE_EQ(e.breakdown.kernel_prior, 1.0);
  EXPECT_NEAR(e.breakdown.total, p.lambda_k, 1e-15);
}

TEST(Energy, BreakdownMatchesRecomputationFromLatent) {
  const EnergyParams p = recommended();
  BlurKernel k;
  const GradientImage b = step_edge_case(&k);
  const int margin = k.radius();
  const EnergyResult e = energy(k, b, p, margin);

  const LatentResult lat = irls_latent(k, b, p);
  const double data = data_term(k, lat.latent, b, BoundaryPolicy{margin});
  const double sparsity = sparsity_prior(lat.latent, p, margin);
  const double kp = kernel_prior(k);
  EXPECT_NEAR(e.breakdown.data, data, 1e-10 * std::max(1.0, data));
  EXPECT_NEAR(e.breakdown.sparsity, sparsity, 1e-10 * std::max(1.0, sparsity));
  EXPECT_DOUBLE_EQ(e.breakdown.kernel_prior, kp);
  EXPECT_NEAR(e.breakdown.total, data + p.lambda_l * sparsity + p.lambda_k * kp,
              1e-9 * std::max(1.0, e.breakdown.total));
}

TEST(Energy, BreakdownRecompositionIdentity) {
  const EnergyParams p = recommended();
  for (std::uint64_t seed : {11, 12, 13}) {
    const GradientImage b = random_gradients(16, 16, seed);
    const EnergyResult e = energy(BlurKernel::delta(), b, p);
    const double recomposed =
        e.breakdown.data + p.lambda_l * e.breakdown.sparsity + p.lambda_k * e.breakdown.kernel_prior;
    EXPECT_NEAR(e.breakdown.total, recomposed, 1e-9 * std::max(1.0, e.breakdown.total));
    EXPECT_GE(e.breakdown.data, 0.0);
    EXPECT_GE(e.breakdown.sparsity, 0.0);
    EXPECT_GE(e.breakdown.kernel_prior, 0.0);
  }
}

TEST(EnergyNoblurExact, LambdaZero) {
  EnergyParams p = recommended();
  p.lambda_l = 0.0;
  const GradientImage b = random_gradients(8, 8, 21);
  const EnergyResult e = energy_noblur_exact(b, p);
  EXPECT_NEAR(e.breakdown.data, 0.0, 1e-18);
  EXPECT_NEAR(e.breakdown.total, p.lambda_k, 1e-15);
  EXPECT_DOUBLE_EQ(e.breakdown.kernel_prior, 1.0);
}

TEST(EnergyNoblurExact, LowerBoundsIrlsDelta) {
  const EnergyParams p = recommended();
  for (std::uint64_t seed = 31; seed < 36; ++seed) {
    const GradientImage b = random_gradients(12, 12, seed);
    EXPECT_LE(energy_noblur_exact(b, p).breakdown.total,
              energy(BlurKernel::delta(), b, p).breakdown.total + 1e-9);
  }
}

// Per-pixel dense-grid oracle summed manually on an 8x8 instance.
TEST(EnergyNoblurExact, MatchesDenseGridOracle) {
  const EnergyParams p = recommended();
  const GradientImage b = random_gradients(8, 8, 41);
  const EnergyResult e = energy_noblur_exact(b, p);

  double data = 0.0, sparsity = 0.0;
  auto scan_pixel = [&](double bv) {
    const double R = std::max(1.0, 2.0 * std::fabs(bv));
    double best_e = bv * bv, best_l = 0.0;
    const int n = 200001;
    for (int i = 0; i < n; ++i) {
      const double l = -R + 2.0 * R * i / (n - 1);
      const double cost = (l - bv) * (l - bv) + p.lambda_l * phi(l, p);
      if (cost < best_e) {
        best_e = cost;
        best_l = l;
      }
    }
    data += (best_l - bv) * (best_l - bv);
    sparsity += phi(best_l, p);
  };
  for (double v : b.gx.data) scan_pixel(v);
  for (double v : b.gy.data) scan_pixel(v);
  const double total = data + p.lambda_l * sparsity + p.lambda_k;
  EXPECT_NEAR(e.breakdown.total, total, 1e-5 * std::max(1.0, total));
  EXPECT_LE(e.breakdown.total, total + 1e-9);  // ours refines, never worse
}

TEST(EnergyRatio, DeltaRatioAtLeastOne) {
  const EnergyParams p = recommended();
  for (std::uint64_t seed = 51; seed < 55; ++seed) {
    const GradientImage b = random_gradients(12, 12, seed);
    EXPECT_GE(energy_ratio(BlurKernel::delta(), b, p), 1.0 - 1e-12);
  }
}

// The qualitative convergence condition: the true 7-tap kernel undercuts the
// exact no-blur energy on a step-rich synthetic scene.
TEST(EnergyRatio, TrueKernelBeatsNoBlurOnStepScene) {
  const EnergyParams p = recommended();
  BlurKernel k;
  const GradientImage b = step_edge_case(&k);
  EXPECT_LT(energy_ratio(k, b, p), 1.0);
}

TEST(EnergyRatio, LambdaZeroReducesToDataPlusKernelPrior) {
  EnergyParams p = recommended();
  p.lambda_l = 0.0;
  BlurKernel k;
  const GradientImage b = step_edge_case(&k, 202);
  const int margin = k.radius();
  const EnergyResult num = energy(k, b, p, margin);
  const double expected =
      (num.breakdown.data + p.lambda_k * num.breakdown.kernel_prior) / p.lambda_k;
  EXPECT_NEAR(energy_ratio(k, b, p), expected, 1e-9 * std::max(1.0, expected));
}

TEST(PriorRatio, ExactVsExactIsOne) {
  const EnergyParams p = recommended();
  const GradientImage b = random_gradients(10, 10, 61);
  const double s = energy_noblur_exact(b, p).breakdown.sparsity;
  EXPECT_DOUBLE_EQ(s / s, 1.0);
}

TEST(PriorRatio, BelowOneOnStepScene) {
  const EnergyParams p = recommended();
  BlurKernel k;
  const GradientImage b = step_edge_case(&k);
  EXPECT_LT(prior_ratio(k, b, p), 1.0);
}

// Simultaneous translation of the kernel (within support) and of the blurred
// content leaves the energy unchanged up to interior-crop effects.
TEST(Energy, TranslationInvarianceUpToCrop) {
  const EnergyParams p = recommended();
  const Image sharp = make_step_texture_image(48, 48, 205);

  BlurKernel k(5, 5, 0.0);
  k.at(1, 2) = 0.5;
  k.at(2, 2) = 0.5;  // off-center pair
  BlurKernel ks(5, 5, 0.0);
  ks.at(2, 2) = 0.5;
  ks.at(3, 2) = 0.5;  // same pair shifted by +1 in x

  const GradientImage b = synthesize_blurred(sharp, k, 0, 0.0);
  const GradientImage bs = synthesize_blurred(sharp, ks, 0, 0.0);
  const double e1 = energy(k, b, p).breakdown.total;
  const double e2 = energy(ks, bs, p).breakdown.total;
  EXPECT_NEAR(e1, e2, 0.02 * std::max(e1, e2));
}
