#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "deblur/deconv.hpp"
#include "deblur/energy.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"
#include "deblur/parallel.hpp"
#include "deblur/params.hpp"

namespace deblur {

struct DeconvSettings {
  bool multiscale = true;
  int iters = 8;                       // per level when multiscale
  double ratio = 0.7071067811865476;   // 1/sqrt(2)
};

struct SizeEnergy {
  int size = 0;
  EnergyBreakdown breakdown;
  bool converged = true;
  bool failed = false;
  std::string error;
};

struct KernelSizeSelection {
  int best_size = 0;
  std::vector<SizeEnergy> per_size;  // sorted by size
};

// Estimate a kernel per candidate size, then pick the size whose estimated
// kernel has the smallest f_IRLS on the common crop of the largest size.
// Ties break toward the smaller size.
inline KernelSizeSelection select_kernel_size(const GradientImage& b, std::vector<int> sizes,
                                              const EnergyParams& params,
                                              const DeconvSettings& settings = {}) {
  if (sizes.empty()) throw std::invalid_argument("select_kernel_size: no sizes");
  for (int s : sizes)
    if (s < 1 || s % 2 == 0)
      throw std::invalid_argument("select_kernel_size: sizes must be odd and >= 1");
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  const int margin = sizes.back() / 2;

  KernelSizeSelection out;
  out.per_size.resize(sizes.size());
  parallel_for(0, static_cast<int>(sizes.size()), [&](int i) {
    SizeEnergy entry;
    entry.size = sizes[i];
    try {
      BlurKernel k;
      if (sizes[i] == 1) {
        k = BlurKernel::delta();
      } else if (settings.multiscale) {
        k = blind_deconv_multiscale(b, sizes[i], sizes[i], params, settings.iters, settings.ratio)
                .kernel;
      } else {
        k = blind_deconv_single_scale(b, sizes[i], sizes[i], params, settings.iters).kernel;
      }
      const EnergyResult e = energy(k, b, params, margin);
      entry.breakdown = e.breakdown;
      entry.converged = e.converged;
    } catch (const std::exception& ex) {
      entry.failed = true;
      entry.error = ex.what();
    }
    out.per_size[i] = entry;
  }, 1);

  // per_size is sorted by size, so a strict comparison breaks ties toward
  // the smaller size.
  const SizeEnergy* best = nullptr;
  for (const SizeEnergy& e : out.per_size) {
    if (e.failed) continue;
    if (!best || e.breakdown.total < best->breakdown.total) best = &e;
  }
  if (!best) throw std::runtime_error("select_kernel_size: every candidate size failed");
  out.best_size = best->size;
  return out;
}

struct PatchRank {
  int id = 0;
  EnergyBreakdown breakdown;
  bool converged = true;
};

struct StreakRanking {
  std::vector<PatchRank> ranked;   // ascending by total, stable by id
  std::vector<int> excluded_ids;   // zero-mass patches
};

// Convert a light-streak patch to a kernel: subtract the patch minimum as
// background, pad to odd tap counts, normalize.
inline BlurKernel patch_to_kernel(const Image& patch) {
  const int kw = patch.width % 2 ? patch.width : patch.width + 1;
  const int kh = patch.height % 2 ? patch.height : patch.height + 1;
  double lo = patch.data[0];
  for (double v : patch.data) lo = std::min(lo, v);
  BlurKernel k(kw, kh, 0.0);
  double mass = 0.0;
  for (int y = 0; y < patch.height; ++y)
    for (int x = 0; x < patch.width; ++x) {
      const double v = std::max(0.0, patch.at(x, y) - lo);
      k.at(x, y) = v;
      mass += v;
    }
  if (mass <= 0.0) throw std::invalid_argument("patch_to_kernel: zero mass after subtraction");
  for (double& t : k.taps) t /= mass;
  return k;
}

// Rank candidate light-streak patches as kernels by f_IRLS over b.
inline StreakRanking rank_light_streak_patches(const GradientImage& b,
                                               const std::vector<Image>& patches,
                                               const EnergyParams& params) {
  if (patches.empty())
    throw std::invalid_argument("rank_light_streak_patches: no patches");
  StreakRanking out;
  std::vector<std::pair<int, BlurKernel>> kernels;
  int margin = 0;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    try {
      kernels.emplace_back(static_cast<int>(i), patch_to_kernel(patches[i]));
      margin = std::max(margin, kernels.back().second.radius());
    } catch (const std::invalid_argument&) {
      out.excluded_ids.push_back(static_cast<int>(i));
    }
  }
  std::vector<PatchRank> ranks(kernels.size());
  parallel_for(0, static_cast<int>(kernels.size()), [&](int i) {
    const EnergyResult e = energy(kernels[i].second, b, params, margin);
    ranks[i] = PatchRank{kernels[i].first, e.breakdown, e.converged};
  }, 1);
  std::stable_sort(ranks.begin(), ranks.end(), [](const PatchRank& a, const PatchRank& c) {
    return a.breakdown.total < c.breakdown.total;
  });
  out.ranked = std::move(ranks);
  return out;
}

}  // namespace deblur
