#include <cmath>

#include <gtest/gtest.h>

#include "deblur/convolve.hpp"
#include "deblur/energy.hpp"
#include "deblur/latent.hpp"
#include "deblur/synthetic.hpp"

using namespace deblur;

namespace {

EnergyParams recommended() {
  EnergyParams p;
  p.alpha = 0.1;
  p.tau = 0.01;
  p.lambda_l = 0.00064;
  return p;
}

// Independent dense scan of the per-pixel objective.
double brute_force_shrink(double b, const EnergyParams& p, int samples) {
  const double R = std::max(1.0, 2.0 * std::fabs(b));
  double best_l = 0.0, best_e = b * b;  // l = 0 candidate
  for (int i = 0; i < samples; ++i) {
    const double l = -R + 2.0 * R * i / (samples - 1);
    const double e = (l - b) * (l - b) + p.lambda_l * phi(l, p);
    if (e < best_e) {
      best_e = e;
      best_l = l;
    }
  }
  return best_l;
}

double brute_force_objective(double b, const EnergyParams& p, int samples) {
  const double l = brute_force_shrink(b, p, samples);
  return (l - b) * (l - b) + p.lambda_l * phi(l, p);
}

GradientImage random_gradients(int w, int h, std::uint64_t seed, double amp = 1.0) {
  Rng rng(seed);
  GradientImage g(w, h);
  for (double& v : g.gx.data) v = rng.uniform(-amp, amp);
  for (double& v : g.gy.data) v = rng.uniform(-amp, amp);
  return g;
}

}  // namespace

TEST(ScalarShrink, ZeroMapsToZero) {
  EXPECT_EQ(scalar_shrink(0.0, recommended()), 0.0);
}

TEST(ScalarShrink, LambdaZeroIsIdentity) {
  EnergyParams p = recommended();
  p.lambda_l = 0.0;
  EXPECT_EQ(scalar_shrink(0.3, p), 0.3);
  EXPECT_EQ(scalar_shrink(-0.7, p), -0.7);
}

TEST(ScalarShrink, Odd) {
  const EnergyParams p = recommended();
  for (double x : {0.001, 0.0123, 0.3, 0.77, 1.5})
    EXPECT_EQ(scalar_shrink(-x, p), -scalar_shrink(x, p));
}

TEST(ScalarShrink, MagnitudeNeverExceedsInput) {
  const EnergyParams p = recommended();
  for (int i = 0; i <= 400; ++i) {
    const double x = -1.0 + i * 0.005;
    EXPECT_LE(std::fabs(scalar_shrink(x, p)), std::fabs(x) + 1e-15);
  }
}

TEST(ScalarShrink, MonotoneOnGrid) {
  const EnergyParams p = recommended();
  double prev = scalar_shrink(-1.0, p);
  for (int i = 1; i <= 400; ++i) {
    const double cur = scalar_shrink(-1.0 + i * 0.005, p);
    EXPECT_GE(cur, prev - 1e-12);
    prev = cur;
  }
}

TEST(ScalarShrink, ObjectiveMatchesDenseOracle) {
  const EnergyParams p = recommended();
  for (double b : {0.005, 0.0199, 0.021, 0.05, 0.3, 0.9, 2.4}) {
    const double l = scalar_shrink(b, p);
    const double e = (l - b) * (l - b) + p.lambda_l * phi(l, p);
    const double oracle = brute_force_objective(b, p, 1000001);
    EXPECT_NEAR(e, oracle, 1e-5 * std::max(1.0, oracle));
  }
}

TEST(ExactNoblur, LambdaZeroReturnsInput) {
  EnergyParams p = recommended();
  p.lambda_l = 0.0;
  const GradientImage b = random_gradients(6, 6, 3);
  const GradientImage l = exact_noblur_latent(b, p);
  for (std::size_t i = 0; i < b.gx.data.size(); ++i) {
    EXPECT_EQ(l.gx.data[i], b.gx.data[i]);
    EXPECT_EQ(l.gy.data[i], b.gy.data[i]);
  }
}

TEST(ExactNoblur, ZeroPixelStaysZeroForAnyLambda) {
  EnergyParams p = recommended();
  for (double lambda : {0.0, 1e-4, 1e-2, 1.0, 100.0}) {
    p.lambda_l = lambda;
    EXPECT_EQ(scalar_shrink(0.0, p), 0.0);
  }
}

TEST(ExactNoblur, PointThreeMatchesMillionPointScan) {
  const EnergyParams p = recommended();
  const double l = scalar_shrink(0.3, p);
  const double oracle = brute_force_shrink(0.3, p, 1000001);
  EXPECT_NEAR(l, oracle, 1e-5);
}

TEST(ExactNoblur, CommutesWithChannelSwapAndSignFlip) {
  const EnergyParams p = recommended();
  const GradientImage b = random_gradients(7, 5, 4);
  const GradientImage l = exact_noblur_latent(b, p);

  GradientImage swapped(b.gy, b.gx);
  const GradientImage ls = exact_noblur_latent(swapped, p);
  for (std::size_t i = 0; i < l.gx.data.size(); ++i) {
    EXPECT_EQ(ls.gx.data[i], l.gy.data[i]);
    EXPECT_EQ(ls.gy.data[i], l.gx.data[i]);
  }

  GradientImage flipped = b;
  for (double& v : flipped.gx.data) v = -v;
  for (double& v : flipped.gy.data) v = -v;
  const GradientImage lf = exact_noblur_latent(flipped, p);
  for (std::size_t i = 0; i < l.gx.data.size(); ++i) {
    EXPECT_EQ(lf.gx.data[i], -l.gx.data[i]);
    EXPECT_EQ(lf.gy.data[i], -l.gy.data[i]);
  }
}

TEST(ExactNoblur, SharedTableMatchesScalarPath) {
  const EnergyParams p = recommended();
  const GradientImage b = random_gradients(9, 9, 5);
  const GradientImage l = exact_noblur_latent(b, p);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) {
      EXPECT_EQ(l.gx.at(x, y), scalar_shrink(b.gx.at(x, y), p));
      EXPECT_EQ(l.gy.at(x, y), scalar_shrink(b.gy.at(x, y), p));
    }
}

TEST(IrlsLatent, LambdaZeroDeltaReturnsInput) {
  EnergyParams p = recommended();
  p.lambda_l = 0.0;
  const GradientImage b = random_gradients(8, 8, 6);
  const LatentResult r = irls_latent(BlurKernel::delta(), b, p);
  EXPECT_TRUE(r.converged);
  for (std::size_t i = 0; i < b.gx.data.size(); ++i) {
    EXPECT_EQ(r.latent.gx.data[i], b.gx.data[i]);
    EXPECT_EQ(r.latent.gy.data[i], b.gy.data[i]);
  }
}

TEST(IrlsLatent, HugeLambdaDrivesGradientsToZero) {
  EnergyParams p = recommended();
  p.lambda_l = 1e3;
  const GradientImage b = random_gradients(12, 12, 7, 0.5);
  const LatentResult r = irls_latent(BlurKernel::delta(), b, p);
  for (double v : r.latent.gx.data) EXPECT_LT(std::fabs(v), 1e-3);
  for (double v : r.latent.gy.data) EXPECT_LT(std::fabs(v), 1e-3);
}

// f_IRLS(delta) - f_opt(delta) <= 2% of f_opt on a random 16x16 field.
TEST(IrlsLatent, DeltaGapWithinTwoPercentOfExact) {
  const EnergyParams p = recommended();
  const GradientImage b = random_gradients(16, 16, 8);
  const double f_irls = energy(BlurKernel::delta(), b, p, 0).breakdown.total;
  const double f_opt = energy_noblur_exact(b, p, 0).breakdown.total;
  EXPECT_GE(f_irls, f_opt - 1e-9);
  EXPECT_LE(f_irls - f_opt, 0.02 * f_opt);
}

TEST(IrlsLatent, NeverWorseThanTrivialInitializer) {
  const EnergyParams p = recommended();
  for (std::uint64_t seed = 20; seed < 24; ++seed) {
    const Image sharp = make_step_texture_image(24, 24, seed);
    const BlurKernel k = box_kernel_1d(5);
    const GradientImage b = synthesize_blurred(sharp, k, seed + 50);
    const LatentResult r = irls_latent(k, b, p);
    const BoundaryPolicy bp = BoundaryPolicy::for_kernel(k);
    EXPECT_LE(latent_objective(k, r.latent, b, p, bp),
              latent_objective(k, b, b, p, bp) + 1e-9);
  }
}

TEST(IrlsLatent, ExactLowerBoundsIrlsForDelta) {
  const EnergyParams p = recommended();
  for (std::uint64_t seed = 30; seed < 34; ++seed) {
    const GradientImage b = random_gradients(10, 10, seed);
    const double f_irls = energy(BlurKernel::delta(), b, p, 0).breakdown.total;
    const double f_opt = energy_noblur_exact(b, p, 0).breakdown.total;
    EXPECT_GE(f_irls, f_opt - 1e-9);
  }
}

TEST(IrlsLatent, Deterministic) {
  const EnergyParams p = recommended();
  const Image sharp = make_step_texture_image(20, 20, 99);
  const BlurKernel k = box_kernel_1d(5);
  const GradientImage b = synthesize_blurred(sharp, k, 100);
  const LatentResult a = irls_latent(k, b, p);
  const LatentResult c = irls_latent(k, b, p);
  for (std::size_t i = 0; i < a.latent.gx.data.size(); ++i) {
    EXPECT_EQ(a.latent.gx.data[i], c.latent.gx.data[i]);
    EXPECT_EQ(a.latent.gy.data[i], c.latent.gy.data[i]);
  }
}
