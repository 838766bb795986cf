#include <cmath>

#include <gtest/gtest.h>

#include "deblur/apps.hpp"
#include "deblur/synthetic.hpp"

using namespace deblur;

namespace {

EnergyParams recommended() {
  EnergyParams p;
  p.alpha = 0.1;
  p.lambda_l = 0.00064;
  p.lambda_k = 0.001;
  return p;
}

// Render a kernel as a bright streak patch on a dark background, the form in
// which light-streak candidates arrive.
Image render_patch(const BlurKernel& k, double gain = 0.8, double background = 0.1) {
  double peak = 0.0;
  for (double t : k.taps) peak = std::max(peak, t);
  Image patch(k.width, k.height, background);
  for (int j = 0; j < k.height; ++j)
    for (int i = 0; i < k.width; ++i) patch.at(i, j) += gain * k.at(i, j) / peak;
  return patch;
}

}  // namespace

TEST(PatchToKernel, SubtractsBackgroundAndNormalizes) {
  const BlurKernel k_true = trajectory_kernel(7, 3);
  const Image patch = render_patch(k_true);
  const BlurKernel k = patch_to_kernel(patch);
  EXPECT_NEAR(k.sum(), 1.0, 1e-12);
  EXPECT_GE(kernel_similarity(k, k_true), 0.999);
}

TEST(PatchToKernel, RejectsConstantPatch) {
  EXPECT_THROW(patch_to_kernel(Image(7, 7, 0.3)), std::invalid_argument);
}

TEST(PatchToKernel, PadsEvenPatchesToOdd) {
  Image patch(6, 6, 0.1);
  patch.at(3, 3) = 0.9;
  const BlurKernel k = patch_to_kernel(patch);
  EXPECT_EQ(k.width, 7);
  EXPECT_EQ(k.height, 7);
  EXPECT_NEAR(k.sum(), 1.0, 1e-12);
}

TEST(StreakRanking, TrueRenderingRanksFirst) {
  const Image sharp = make_step_texture_image(64, 64, 21);
  const BlurKernel k_true = trajectory_kernel(9, 22);
  const GradientImage b = synthesize_blurred(sharp, k_true, 5021);

  Rng rng(23);
  std::vector<Image> patches;
  patches.push_back(render_patch(k_true));           // id 0: the real streak
  Image noisy = render_patch(k_true);
  for (double& v : noisy.data) v += rng.uniform(-0.25, 0.25);
  patches.push_back(noisy);                          // id 1: corrupted copy
  Image uniform(9, 9, 0.4);
  uniform.at(4, 4) = 0.45;
  patches.push_back(uniform);                        // id 2: featureless blob
  patches.push_back(render_patch(trajectory_kernel(9, 77)));  // id 3: wrong kernel

  const StreakRanking ranking = rank_light_streak_patches(b, patches, recommended());
  ASSERT_EQ(ranking.ranked.size(), 4u);
  EXPECT_EQ(ranking.ranked.front().id, 0);
}

TEST(StreakRanking, InvariantToPositiveRescaling) {
  const Image sharp = make_step_texture_image(48, 48, 24);
  const BlurKernel k_true = trajectory_kernel(7, 25);
  const GradientImage b = synthesize_blurred(sharp, k_true, 5024);

  Image patch = render_patch(k_true);
  Image scaled = patch;
  for (double& v : scaled.data) v *= 3.7;

  const StreakRanking r = rank_light_streak_patches(b, {patch, scaled}, recommended());
  ASSERT_EQ(r.ranked.size(), 2u);
  // Rescaling perturbs the converted kernel at the ulp level and the CG
  // stopping point amplifies that, so the energies agree to solver noise.
  EXPECT_NEAR(r.ranked[0].breakdown.total, r.ranked[1].breakdown.total,
              1e-7 * std::max(1.0, r.ranked[0].breakdown.total));
}

TEST(StreakRanking, DuplicatesKeepStableIdOrder) {
  const Image sharp = make_step_texture_image(48, 48, 26);
  const BlurKernel k_true = trajectory_kernel(7, 27);
  const GradientImage b = synthesize_blurred(sharp, k_true, 5026);
  const Image patch = render_patch(k_true);
  const StreakRanking r = rank_light_streak_patches(b, {patch, patch, patch}, recommended());
  ASSERT_EQ(r.ranked.size(), 3u);
  EXPECT_EQ(r.ranked[0].id, 0);
  EXPECT_EQ(r.ranked[1].id, 1);
  EXPECT_EQ(r.ranked[2].id, 2);
  EXPECT_NEAR(r.ranked[0].breakdown.total, r.ranked[2].breakdown.total, 1e-12);
}

TEST(StreakRanking, ExcludesZeroMassPatches) {
  const Image sharp = make_step_texture_image(48, 48, 28);
  const GradientImage b = synthesize_blurred(sharp, trajectory_kernel(7, 29), 5028);
  const StreakRanking r =
      rank_light_streak_patches(b, {Image(7, 7, 0.2), render_patch(trajectory_kernel(7, 29))},
                                recommended());
  ASSERT_EQ(r.excluded_ids.size(), 1u);
  EXPECT_EQ(r.excluded_ids[0], 0);
  ASSERT_EQ(r.ranked.size(), 1u);
  EXPECT_EQ(r.ranked[0].id, 1);
}

TEST(StreakRanking, SinglePatchReturnsListOfOne) {
  const Image sharp = make_step_texture_image(48, 48, 30);
  const BlurKernel k = trajectory_kernel(7, 31);
  const GradientImage b = synthesize_blurred(sharp, k, 5030);
  const StreakRanking r = rank_light_streak_patches(b, {render_patch(k)}, recommended());
  EXPECT_EQ(r.ranked.size(), 1u);
}

TEST(SelectKernelSize, SizeOneTrivially) {
  const GradientImage b = gradients(make_step_texture_image(32, 32, 32));
  const KernelSizeSelection sel = select_kernel_size(b, {1}, recommended());
  EXPECT_EQ(sel.best_size, 1);
}

TEST(SelectKernelSize, InvariantToSizeOrder) {
  const Image sharp = make_step_texture_image(48, 48, 33);
  const GradientImage b = synthesize_blurred(sharp, tent_kernel_1d(5), 5033);
  DeconvSettings settings;
  settings.multiscale = false;
  settings.iters = 4;
  const KernelSizeSelection a = select_kernel_size(b, {3, 7, 5}, recommended(), settings);
  const KernelSizeSelection c = select_kernel_size(b, {7, 5, 3}, recommended(), settings);
  EXPECT_EQ(a.best_size, c.best_size);
  ASSERT_EQ(a.per_size.size(), c.per_size.size());
  for (std::size_t i = 0; i < a.per_size.size(); ++i) {
    EXPECT_EQ(a.per_size[i].size, c.per_size[i].size);
    EXPECT_EQ(a.per_size[i].breakdown.total, c.per_size[i].breakdown.total);
  }
}

TEST(SelectKernelSize, RejectsEvenSizesAndEmptyList) {
  const GradientImage b = gradients(make_step_texture_image(24, 24, 34));
  EXPECT_THROW(select_kernel_size(b, {}, recommended()), std::invalid_argument);
  EXPECT_THROW(select_kernel_size(b, {4}, recommended()), std::invalid_argument);
}
