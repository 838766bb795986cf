#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "deblur/deconv.hpp"
#include "deblur/energy.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"
#include "deblur/parallel.hpp"
#include "deblur/params.hpp"
#include "deblur/synthetic.hpp"

namespace deblur {

// One sweep point: the two energies that enter the convergence conditions
// plus their ratios.
struct SweepRecord {
  std::string image_id;
  std::string kernel_id;
  double alpha = 0.0;
  double lambda_l = 0.0;
  double f_irls_gt = 0.0;
  double f_opt_delta = 0.0;
  double f_irls_delta = 0.0;
  double ratio = 0.0;        // f_irls_gt / f_opt_delta
  double prior_ratio = 0.0;  // rho_l(l_irls_gt) / rho_l(l_opt_delta)
  bool converged_gt = true;
  bool converged_delta = true;
};

// Evaluate one (image, kernel) pair at one parameter point. All three
// energies share the interior crop of the ground-truth kernel's radius.
inline SweepRecord evaluate_pair(const std::string& image_id, const std::string& kernel_id,
                                 const GradientImage& b, const BlurKernel& k_gt,
                                 const EnergyParams& params) {
  const int margin = k_gt.radius();
  const EnergyResult gt = energy(k_gt, b, params, margin);
  const EnergyResult opt = energy_noblur_exact(b, params, margin);
  const EnergyResult del = energy(BlurKernel::delta(), b, params, margin);
  SweepRecord r;
  r.image_id = image_id;
  r.kernel_id = kernel_id;
  r.alpha = params.alpha;
  r.lambda_l = params.lambda_l;
  r.f_irls_gt = gt.breakdown.total;
  r.f_opt_delta = opt.breakdown.total;
  r.f_irls_delta = del.breakdown.total;
  r.ratio = r.f_irls_gt / r.f_opt_delta;
  r.prior_ratio = gt.breakdown.sparsity / opt.breakdown.sparsity;
  r.converged_gt = gt.converged;
  r.converged_delta = del.converged;
  return r;
}

// One record per (alpha, lambda_l); ratios are stored unclipped.
inline std::vector<SweepRecord> alpha_lambda_grid(const GradientImage& b, const BlurKernel& k_gt,
                                                  const std::vector<double>& alphas,
                                                  const std::vector<double>& lambdas,
                                                  const EnergyParams& params) {
  if (alphas.empty() || lambdas.empty())
    throw std::invalid_argument("alpha_lambda_grid: empty grid");
  std::vector<SweepRecord> records(alphas.size() * lambdas.size());
  parallel_for(0, static_cast<int>(records.size()), [&](int idx) {
    EnergyParams p = params;
    p.alpha = alphas[idx / lambdas.size()];
    p.lambda_l = lambdas[idx % lambdas.size()];
    records[idx] = evaluate_pair("img", "kernel", b, k_gt, p);
  }, 1);
  return records;
}

// Per-item lambda sweep over a dataset; item failures are recorded as
// non-converged rather than aborting the sweep.
inline std::vector<SweepRecord> lambda_sweep_dataset(const std::vector<DatasetItem>& dataset,
                                                     const std::vector<double>& lambdas,
                                                     double alpha, const EnergyParams& params) {
  if (dataset.empty()) throw std::invalid_argument("lambda_sweep_dataset: empty dataset");
  if (lambdas.empty()) throw std::invalid_argument("lambda_sweep_dataset: empty lambda grid");
  std::vector<SweepRecord> records(dataset.size() * lambdas.size());
  parallel_for(0, static_cast<int>(records.size()), [&](int idx) {
    const DatasetItem& item = dataset[idx / lambdas.size()];
    EnergyParams p = params;
    p.alpha = alpha;
    p.lambda_l = lambdas[idx % lambdas.size()];
    try {
      records[idx] = evaluate_pair(item.image_id, item.kernel_id, item.blurred, item.kernel, p);
    } catch (const std::exception&) {
      SweepRecord r;
      r.image_id = item.image_id;
      r.kernel_id = item.kernel_id;
      r.alpha = alpha;
      r.lambda_l = p.lambda_l;
      r.converged_gt = r.converged_delta = false;
      records[idx] = r;
    }
  }, 1);
  return records;
}

struct HistogramBin {
  double lambda_l = 0.0;
  double percent = 0.0;  // of images with ratio < 1
};

struct RatioHistogram {
  std::vector<HistogramBin> bins;  // sorted by lambda_l
  double best_lambda = 0.0;        // argmax percent, first on ties
};

// Success-rate curve over lambda_l. All records must share one alpha.
inline RatioHistogram ratio_histogram(const std::vector<SweepRecord>& records) {
  if (records.empty()) throw std::invalid_argument("ratio_histogram: no records");
  const double alpha = records.front().alpha;
  for (const SweepRecord& r : records)
    if (r.alpha != alpha)
      throw std::invalid_argument("ratio_histogram: records mix different alphas");
  std::map<double, std::pair<int, int>> buckets;  // lambda -> (successes, count)
  for (const SweepRecord& r : records) {
    auto& [succ, count] = buckets[r.lambda_l];
    if (r.ratio < 1.0) ++succ;
    ++count;
  }
  RatioHistogram out;
  for (const auto& [lambda, sc] : buckets)
    out.bins.push_back(HistogramBin{lambda, 100.0 * sc.first / sc.second});
  out.best_lambda = out.bins.front().lambda_l;
  double best = out.bins.front().percent;
  for (const HistogramBin& bin : out.bins)
    if (bin.percent > best) {
      best = bin.percent;
      out.best_lambda = bin.lambda_l;
    }
  return out;
}

struct LengthEnergy {
  int length = 0;
  EnergyBreakdown breakdown;
  bool converged = true;
};

struct LengthSweepResult {
  std::vector<LengthEnergy> entries;     // per requested length
  EnergyBreakdown opt_delta_baseline;    // f_opt(k_delta) on the common crop
};

struct LengthSweepOptions {
  int iters = 8;  // alternations used to estimate each per-length kernel
};

// f_IRLS(k) across horizontal 1D kernels of the given lengths, each kernel
// estimated by single-scale blind deconvolution (length 1 is the delta
// kernel). All energies share the crop of the longest kernel.
inline LengthSweepResult kernel_length_sweep(const GradientImage& b,
                                             const std::vector<int>& lengths,
                                             const EnergyParams& params,
                                             const LengthSweepOptions& opts = {}) {
  if (lengths.empty()) throw std::invalid_argument("kernel_length_sweep: no lengths");
  int max_len = 1;
  for (int len : lengths) {
    if (len < 1 || len % 2 == 0)
      throw std::invalid_argument("kernel_length_sweep: lengths must be odd and >= 1");
    max_len = std::max(max_len, len);
  }
  const int margin = max_len / 2;

  LengthSweepResult out;
  out.entries.resize(lengths.size());
  parallel_for(0, static_cast<int>(lengths.size()), [&](int i) {
    const int len = lengths[i];
    BlurKernel k = BlurKernel::delta(len, 1);
    if (len > 1) k = blind_deconv_single_scale(b, len, 1, params, opts.iters).kernel;
    const EnergyResult e = energy(k, b, params, margin);
    out.entries[i] = LengthEnergy{len, e.breakdown, e.converged};
  }, 1);
  out.opt_delta_baseline = energy_noblur_exact(b, params, margin).breakdown;
  return out;
}

// Variant that evaluates caller-provided kernels instead of estimating them.
inline LengthSweepResult kernel_length_sweep(const GradientImage& b,
                                             const std::vector<BlurKernel>& kernels,
                                             const EnergyParams& params) {
  if (kernels.empty()) throw std::invalid_argument("kernel_length_sweep: no kernels");
  int margin = 0;
  for (const BlurKernel& k : kernels) margin = std::max(margin, k.radius());
  LengthSweepResult out;
  out.entries.resize(kernels.size());
  parallel_for(0, static_cast<int>(kernels.size()), [&](int i) {
    const EnergyResult e = energy(kernels[i], b, params, margin);
    out.entries[i] = LengthEnergy{std::max(kernels[i].width, kernels[i].height), e.breakdown,
                                  e.converged};
  }, 1);
  out.opt_delta_baseline = energy_noblur_exact(b, params, margin).breakdown;
  return out;
}

namespace detail {

inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace detail

inline const char* sweep_csv_header() {
  return "image_id,kernel_id,alpha,lambda_l,f_irls_gt,f_opt_delta,f_irls_delta,ratio,"
         "prior_ratio,converged_gt,converged_delta";
}

inline std::string to_csv_row(const SweepRecord& r) {
  std::string row = r.image_id + "," + r.kernel_id;
  for (double v : {r.alpha, r.lambda_l, r.f_irls_gt, r.f_opt_delta, r.f_irls_delta, r.ratio,
                   r.prior_ratio})
    row += "," + detail::format_g9(v);
  row += r.converged_gt ? ",1" : ",0";
  row += r.converged_delta ? ",1" : ",0";
  return row;
}

inline std::string to_csv(const std::vector<SweepRecord>& records) {
  std::string out = sweep_csv_header();
  out += "\n";
  for (const SweepRecord& r : records) {
    out += to_csv_row(r);
    out += "\n";
  }
  return out;
}

}  // namespace deblur
