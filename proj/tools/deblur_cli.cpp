// Command-line surface of the toolkit. Exit codes: 0 success, 1 usage error,
// 2 data error, 3 solver non-convergence under --strict.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deblur/deblur.hpp"

namespace {

struct GlobalOpts {
  deblur::EnergyParams params;
  bool strict = false;
};

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void add_param_flags(CLI::App* cmd, GlobalOpts& g) {
  cmd->add_option("--alpha", g.params.alpha, "sparseness exponent");
  cmd->add_option("--tau", g.params.tau, "quadratic-region threshold of phi");
  cmd->add_option("--lambda-l", g.params.lambda_l, "latent prior weight");
  cmd->add_option("--lambda-k", g.params.lambda_k, "kernel prior weight");
  cmd->add_option("--irls-iters", g.params.irls_iters, "IRLS outer iterations");
  cmd->add_option("--cg-tol", g.params.cg_tol, "CG relative residual tolerance");
  cmd->add_option("--cg-max-iters", g.params.cg_max_iters, "CG iteration cap");
  cmd->add_option("--noblur-grid", g.params.noblur_grid, "exhaustive-search samples");
  cmd->add_flag("--strict", g.strict, "exit 3 when any solver fails to converge");
}

std::vector<double> default_lambdas() {
  return {1e-5, 3.1622776601683794e-5, 1e-4, 3.1622776601683794e-4, 1e-3,
          3.1622776601683794e-3, 1e-2, 3.1622776601683794e-2, 1e-1};
}

std::string phase_name(deblur::TracePhase p) {
  return p == deblur::TracePhase::LatentStep ? "latent" : "kernel";
}

std::string trace_csv(const deblur::DeconvTrace& trace) {
  std::string out = "level,iteration,phase,total,data,sparsity,kernel_prior,converged\n";
  for (const deblur::TraceEntry& e : trace.entries) {
    out += std::to_string(e.level) + "," + std::to_string(e.iteration) + "," +
           phase_name(e.phase) + "," + g9(e.breakdown.total) + "," + g9(e.breakdown.data) + "," +
           g9(e.breakdown.sparsity) + "," + g9(e.breakdown.kernel_prior) + "," +
           (e.converged ? "1" : "0") + "\n";
  }
  return out;
}

int check_strict(const GlobalOpts& g, bool converged) {
  if (g.strict && !converged) {
    std::cerr << "solver did not reach tolerance (--strict)\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-domain blind-deconvolution energy toolkit"};
  app.require_subcommand(1);

  // ------------------------------------------------------------------ gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic test image / blurred pair");
  std::string gen_kind = "step";
  std::uint64_t gen_seed = 1;
  int gen_size = 64;
  double gen_noise = 0.001;
  std::string gen_out, gen_out_kernel, gen_out_blurred, gen_kernel_kind = "box7h";
  gen->add_option("--kind", gen_kind, "step|flat")->capture_default_str();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("--size", gen_size, "image side length")->capture_default_str();
  gen->add_option("--noise", gen_noise, "sensor noise sigma")->capture_default_str();
  gen->add_option("--kernel", gen_kernel_kind, "box<L>h|box<L>v|gauss<S>|traj<S>:<seed>|disk<R>")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "sharp image output (png/pgm)")->required();
  gen->add_option("--out-kernel", gen_out_kernel, "kernel file output");
  gen->add_option("--out-blurred", gen_out_blurred, "blurred image output");

  // ---------------------------------------------------------------- deblur
  GlobalOpts dg;
  auto* deb = app.add_subcommand("deblur", "blind deconvolution of a blurred image");
  std::string deb_input, deb_out_kernel = "kernel.txt", deb_out_latent = "latent.png",
              deb_out_trace = "trace.csv";
  int deb_size = 15, deb_iters = 10;
  bool deb_multiscale = false;
  double deb_ratio = 0.7071067811865476;
  deb->add_option("input", deb_input, "blurred image (png/pgm)")->required();
  deb->add_option("--kernel-size", deb_size, "odd kernel size")->capture_default_str();
  deb->add_flag("--multiscale", deb_multiscale, "coarse-to-fine estimation");
  deb->add_option("--iters", deb_iters, "alternations (per level when multiscale)")
      ->capture_default_str();
  deb->add_option("--ratio", deb_ratio, "pyramid scale ratio")->capture_default_str();
  deb->add_option("--out-kernel", deb_out_kernel, "kernel file")->capture_default_str();
  deb->add_option("--out-latent", deb_out_latent, "latent visualization")->capture_default_str();
  deb->add_option("--out-trace", deb_out_trace, "trace CSV")->capture_default_str();
  add_param_flags(deb, dg);

  // ---------------------------------------------------------------- energy
  GlobalOpts eg;
  auto* ene = app.add_subcommand("energy", "evaluate f(k) for an image/kernel pair");
  std::string ene_input, ene_kernel, ene_csv;
  bool ene_exact = false;
  int ene_margin = -1;
  ene->add_option("input", ene_input, "blurred image (png/pgm)")->required();
  ene->add_option("--kernel", ene_kernel, "kernel file (omit for delta)");
  ene->add_flag("--exact-noblur", ene_exact, "also report f_opt(k_delta)");
  ene->add_option("--margin", ene_margin, "interior-crop margin (default: kernel radius)");
  ene->add_option("--csv", ene_csv, "append breakdown rows to this CSV file");
  add_param_flags(ene, eg);

  // ----------------------------------------------------------- sweep-lambda
  GlobalOpts slg;
  auto* swl = app.add_subcommand("sweep-lambda", "ratio sweep over lambda_l");
  std::string swl_input, swl_kernel, swl_out;
  std::vector<double> swl_lambdas;
  double swl_alpha = 0.1;
  bool swl_bundled = false;
  swl->add_flag("--bundled", swl_bundled, "run on the bundled synthetic set");
  swl->add_option("--input", swl_input, "blurred image (png/pgm)");
  swl->add_option("--kernel", swl_kernel, "ground-truth kernel file");
  swl->add_option("--lambdas", swl_lambdas, "lambda_l grid")->delimiter(',');
  swl->add_option("--sweep-alpha", swl_alpha, "alpha used for the sweep")->capture_default_str();
  swl->add_option("--out", swl_out, "output CSV (default stdout)");
  add_param_flags(swl, slg);

  // ------------------------------------------------------------- sweep-grid
  GlobalOpts sgg;
  auto* swg = app.add_subcommand("sweep-grid", "ratio grid over (alpha, lambda_l)");
  std::string swg_input, swg_kernel, swg_out;
  std::vector<double> swg_alphas{0.1, 0.5, 1.0}, swg_lambdas;
  swg->add_option("--input", swg_input, "blurred image (png/pgm)")->required();
  swg->add_option("--kernel", swg_kernel, "ground-truth kernel file")->required();
  swg->add_option("--alphas", swg_alphas, "alpha grid")->delimiter(',');
  swg->add_option("--lambdas", swg_lambdas, "lambda_l grid")->delimiter(',');
  swg->add_option("--out", swg_out, "output CSV (default stdout)");
  add_param_flags(swg, sgg);

  // ----------------------------------------------------------- sweep-length
  GlobalOpts slng;
  auto* swn = app.add_subcommand("sweep-length", "f_IRLS across 1D kernel lengths");
  std::string swn_input, swn_out;
  std::vector<int> swn_lengths{1, 3, 5, 7, 9, 11, 13, 15};
  int swn_iters = 8;
  swn->add_option("--input", swn_input, "blurred image (png/pgm)")->required();
  swn->add_option("--lengths", swn_lengths, "odd lengths")->delimiter(',');
  swn->add_option("--iters", swn_iters, "alternations per length")->capture_default_str();
  swn->add_option("--out", swn_out, "output CSV (default stdout)");
  add_param_flags(swn, slng);

  // ------------------------------------------------------------------ hist
  auto* his = app.add_subcommand("hist", "success-rate histogram from a sweep CSV");
  std::string his_csv;
  his->add_option("csv", his_csv, "sweep CSV produced by sweep-lambda")->required();

  // ----------------------------------------------------------- kernel-size
  GlobalOpts ksg;
  auto* ksz = app.add_subcommand("kernel-size", "automatic kernel-size selection");
  std::string ksz_input, ksz_out;
  std::vector<int> ksz_sizes{5, 11, 21};
  int ksz_iters = 8;
  double ksz_ratio = 0.7071067811865476;
  bool ksz_single = false;
  ksz->add_option("--input", ksz_input, "blurred image (png/pgm)")->required();
  ksz->add_option("--sizes", ksz_sizes, "candidate odd sizes")->delimiter(',');
  ksz->add_option("--iters", ksz_iters, "alternations per level")->capture_default_str();
  ksz->add_option("--ratio", ksz_ratio, "pyramid scale ratio")->capture_default_str();
  ksz->add_flag("--single-scale", ksz_single, "disable the pyramid");
  ksz->add_option("--out", ksz_out, "per-size CSV (default stdout)");
  add_param_flags(ksz, ksg);

  // --------------------------------------------------------------- streaks
  GlobalOpts stg;
  auto* str = app.add_subcommand("streaks", "rank light-streak patches as kernels");
  std::string str_input, str_out;
  std::vector<std::string> str_patches;
  str->add_option("--input", str_input, "blurred image (png/pgm)")->required();
  str->add_option("--patch", str_patches, "candidate patch image (repeatable)")
      ->required()
      ->take_all();
  str->add_option("--out", str_out, "ranking CSV (default stdout)");
  add_param_flags(str, stg);

  // --------------------------------------------------------------- defocus
  GlobalOpts dfg;
  auto* dfo = app.add_subcommand("defocus", "sparse + dense defocus map estimation");
  std::string dfo_input, dfo_sparse = "defocus_sparse.csv", dfo_map = "defocus_map.png";
  std::vector<double> dfo_radii{0, 1, 2, 3, 4};
  int dfo_window = 41;
  double dfo_low = 0.03, dfo_high = 0.10, dfo_prop = 0.05, dfo_eps = 1e-5;
  dfo->add_option("--input", dfo_input, "defocused image (png/pgm)")->required();
  dfo->add_option("--radii", dfo_radii, "candidate disk radii")->delimiter(',');
  dfo->add_option("--window", dfo_window, "local window size")->capture_default_str();
  dfo->add_option("--canny-low", dfo_low, "Canny low threshold")->capture_default_str();
  dfo->add_option("--canny-high", dfo_high, "Canny high threshold")->capture_default_str();
  dfo->add_option("--prop-lambda", dfo_prop, "propagation data weight")->capture_default_str();
  dfo->add_option("--ml-epsilon", dfo_eps, "matting regularizer")->capture_default_str();
  dfo->add_option("--out-sparse", dfo_sparse, "sparse map CSV")->capture_default_str();
  dfo->add_option("--out-map", dfo_map,
                  "dense map image, intensity = radius / max radius")
      ->capture_default_str();
  add_param_flags(dfo, dfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    using namespace deblur;

    if (*gen) {
      Image img = gen_kind == "flat" ? make_near_flat_image(gen_size, gen_size, gen_seed)
                                     : make_step_texture_image(gen_size, gen_size, gen_seed);
      write_image(img, gen_out);
      BlurKernel k;
      if (gen_kernel_kind.rfind("box", 0) == 0) {
        const char axis = gen_kernel_kind.back();
        const int len = std::stoi(gen_kernel_kind.substr(3, gen_kernel_kind.size() - 4));
        k = box_kernel_1d(len, axis != 'v');
      } else if (gen_kernel_kind.rfind("gauss", 0) == 0) {
        const int size = std::stoi(gen_kernel_kind.substr(5));
        k = gaussian_kernel(size, 0.2 * size);
      } else if (gen_kernel_kind.rfind("traj", 0) == 0) {
        const auto colon = gen_kernel_kind.find(':');
        const int size = std::stoi(gen_kernel_kind.substr(4, colon - 4));
        const std::uint64_t seed = colon == std::string::npos
                                       ? gen_seed
                                       : std::stoull(gen_kernel_kind.substr(colon + 1));
        k = trajectory_kernel(size, seed);
      } else if (gen_kernel_kind.rfind("disk", 0) == 0) {
        k = disk_kernel(std::stod(gen_kernel_kind.substr(4)));
      } else {
        std::cerr << "unknown kernel kind: " << gen_kernel_kind << "\n";
        return 1;
      }
      if (!gen_out_kernel.empty()) write_kernel(k, gen_out_kernel);
      if (!gen_out_blurred.empty()) {
        Image blurred = convolve(img, k);
        if (gen_noise > 0.0) {
          Rng rng(gen_seed + 77);
          for (double& v : blurred.data) v += gen_noise * rng.gaussian();
        }
        for (double& v : blurred.data) v = std::clamp(v, 0.0, 1.0);
        write_image(blurred, gen_out_blurred);
      }
      return 0;
    }

    if (*deb) {
      dg.params.validate();
      const GradientImage b = gradients(read_image(deb_input));
      const DeconvResult res =
          deb_multiscale
              ? blind_deconv_multiscale(b, deb_size, deb_size, dg.params, deb_iters, deb_ratio)
              : blind_deconv_single_scale(b, deb_size, deb_size, dg.params, deb_iters);
      write_kernel(res.kernel, deb_out_kernel);
      write_image(poisson_reconstruct(res.latent), deb_out_latent);
      write_text_file(deb_out_trace, trace_csv(res.trace));
      const bool converged =
          res.trace.entries.empty() || res.trace.entries.back().converged;
      std::cout << "kernel: " << deb_out_kernel << "\nlatent: " << deb_out_latent
                << "\ntrace: " << deb_out_trace << "\nfinal_total: "
                << g9(res.trace.entries.back().breakdown.total) << "\n";
      return check_strict(dg, converged);
    }

    if (*ene) {
      eg.params.validate();
      const GradientImage b = gradients(read_image(ene_input));
      const BlurKernel k =
          ene_kernel.empty() ? BlurKernel::delta() : read_kernel(ene_kernel);
      const int margin = ene_margin >= 0 ? ene_margin : k.radius();
      const EnergyResult e = energy(k, b, eg.params, margin);
      std::string csv = "kind,total,data,sparsity,kernel_prior,converged\n";
      auto line = [&](const char* kind, const EnergyBreakdown& bd, bool conv) {
        std::cout << kind << ": total=" << g9(bd.total) << " data=" << g9(bd.data)
                  << " sparsity=" << g9(bd.sparsity) << " kernel_prior=" << g9(bd.kernel_prior)
                  << " converged=" << (conv ? 1 : 0) << "\n";
        csv += std::string(kind) + "," + g9(bd.total) + "," + g9(bd.data) + "," +
               g9(bd.sparsity) + "," + g9(bd.kernel_prior) + "," + (conv ? "1" : "0") + "\n";
      };
      line("f_irls", e.breakdown, e.converged);
      bool conv = e.converged;
      if (ene_exact) {
        const EnergyResult opt = energy_noblur_exact(b, eg.params, margin);
        line("f_opt_delta", opt.breakdown, true);
        std::cout << "ratio: " << g9(e.breakdown.total / opt.breakdown.total) << "\n";
      }
      if (!ene_csv.empty()) write_text_file(ene_csv, csv);
      return check_strict(eg, conv);
    }

    if (*swl) {
      slg.params.validate();
      if (swl_lambdas.empty()) swl_lambdas = default_lambdas();
      std::vector<SweepRecord> records;
      if (swl_bundled) {
        records = lambda_sweep_dataset(bundled_dataset(), swl_lambdas, swl_alpha, slg.params);
      } else {
        if (swl_input.empty() || swl_kernel.empty()) {
          std::cerr << "sweep-lambda: need --bundled or both --input and --kernel\n";
          return 1;
        }
        std::vector<DatasetItem> one(1);
        one[0].image_id = swl_input;
        one[0].kernel_id = swl_kernel;
        one[0].blurred = gradients(read_image(swl_input));
        one[0].kernel = read_kernel(swl_kernel);
        records = lambda_sweep_dataset(one, swl_lambdas, swl_alpha, slg.params);
      }
      const std::string csv = to_csv(records);
      if (swl_out.empty())
        std::cout << csv;
      else
        write_text_file(swl_out, csv);
      bool conv = true;
      for (const SweepRecord& r : records) conv = conv && r.converged_gt && r.converged_delta;
      return check_strict(slg, conv);
    }

    if (*swg) {
      sgg.params.validate();
      if (swg_lambdas.empty()) swg_lambdas = default_lambdas();
      const GradientImage b = gradients(read_image(swg_input));
      const BlurKernel k = read_kernel(swg_kernel);
      const std::vector<SweepRecord> records =
          alpha_lambda_grid(b, k, swg_alphas, swg_lambdas, sgg.params);
      const std::string csv = to_csv(records);
      if (swg_out.empty())
        std::cout << csv;
      else
        write_text_file(swg_out, csv);
      return 0;
    }

    if (*swn) {
      slng.params.validate();
      const GradientImage b = gradients(read_image(swn_input));
      LengthSweepOptions opts;
      opts.iters = swn_iters;
      const LengthSweepResult res = kernel_length_sweep(b, swn_lengths, slng.params, opts);
      std::string csv = "kind,length,total,data,sparsity,kernel_prior,converged\n";
      int best_len = res.entries.front().length;
      double best_total = res.entries.front().breakdown.total;
      for (const LengthEnergy& e : res.entries) {
        csv += "irls," + std::to_string(e.length) + "," + g9(e.breakdown.total) + "," +
               g9(e.breakdown.data) + "," + g9(e.breakdown.sparsity) + "," +
               g9(e.breakdown.kernel_prior) + "," + (e.converged ? "1" : "0") + "\n";
        if (e.breakdown.total < best_total) {
          best_total = e.breakdown.total;
          best_len = e.length;
        }
      }
      const EnergyBreakdown& o = res.opt_delta_baseline;
      csv += "opt_delta,1," + g9(o.total) + "," + g9(o.data) + "," + g9(o.sparsity) + "," +
             g9(o.kernel_prior) + ",1\n";
      if (swn_out.empty())
        std::cout << csv;
      else
        write_text_file(swn_out, csv);
      std::cout << "best_length: " << best_len << "\n";
      return 0;
    }

    if (*his) {
      std::ifstream in(his_csv);
      if (!in) throw std::runtime_error("hist: cannot open " + his_csv);
      std::string header;
      std::getline(in, header);
      if (header != sweep_csv_header())
        throw std::runtime_error("hist: unrecognized CSV schema in " + his_csv);
      std::vector<SweepRecord> records;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        SweepRecord r;
        std::getline(ss, r.image_id, ',');
        std::getline(ss, r.kernel_id, ',');
        auto num = [&]() {
          std::getline(ss, field, ',');
          return std::stod(field);
        };
        r.alpha = num();
        r.lambda_l = num();
        r.f_irls_gt = num();
        r.f_opt_delta = num();
        r.f_irls_delta = num();
        r.ratio = num();
        r.prior_ratio = num();
        records.push_back(r);
      }
      const RatioHistogram hist = ratio_histogram(records);
      for (const HistogramBin& bin : hist.bins)
        std::cout << g9(bin.lambda_l) << " " << g9(bin.percent) << "\n";
      std::cout << "best_lambda: " << g9(hist.best_lambda) << "\n";
      return 0;
    }

    if (*ksz) {
      ksg.params.validate();
      const GradientImage b = gradients(read_image(ksz_input));
      DeconvSettings settings;
      settings.multiscale = !ksz_single;
      settings.iters = ksz_iters;
      settings.ratio = ksz_ratio;
      const KernelSizeSelection sel = select_kernel_size(b, ksz_sizes, ksg.params, settings);
      std::string csv = "size,total,data,sparsity,kernel_prior,converged,failed\n";
      for (const SizeEnergy& e : sel.per_size)
        csv += std::to_string(e.size) + "," + g9(e.breakdown.total) + "," +
               g9(e.breakdown.data) + "," + g9(e.breakdown.sparsity) + "," +
               g9(e.breakdown.kernel_prior) + "," + (e.converged ? "1" : "0") + "," +
               (e.failed ? "1" : "0") + "\n";
      if (ksz_out.empty())
        std::cout << csv;
      else
        write_text_file(ksz_out, csv);
      std::cout << "best_size: " << sel.best_size << "\n";
      return 0;
    }

    if (*str) {
      stg.params.validate();
      const GradientImage b = gradients(read_image(str_input));
      std::vector<Image> patches;
      for (const std::string& p : str_patches) patches.push_back(read_image(p));
      const StreakRanking ranking = rank_light_streak_patches(b, patches, stg.params);
      std::string csv = "rank,patch_id,total,data,sparsity,kernel_prior,converged\n";
      for (std::size_t i = 0; i < ranking.ranked.size(); ++i) {
        const PatchRank& r = ranking.ranked[i];
        csv += std::to_string(i) + "," + std::to_string(r.id) + "," + g9(r.breakdown.total) +
               "," + g9(r.breakdown.data) + "," + g9(r.breakdown.sparsity) + "," +
               g9(r.breakdown.kernel_prior) + "," + (r.converged ? "1" : "0") + "\n";
      }
      for (int id : ranking.excluded_ids)
        std::cerr << "patch " << id << " excluded: zero mass after background subtraction\n";
      if (str_out.empty())
        std::cout << csv;
      else
        write_text_file(str_out, csv);
      if (!ranking.ranked.empty())
        std::cout << "best_patch: " << ranking.ranked.front().id << "\n";
      return 0;
    }

    if (*dfo) {
      dfg.params.validate();
      const Image img = read_image(dfo_input);
      DefocusParams dp;
      dp.radii = dfo_radii;
      dp.window = dfo_window;
      dp.canny_low = dfo_low;
      dp.canny_high = dfo_high;
      dp.prop_lambda = dfo_prop;
      dp.ml_epsilon = dfo_eps;
      const SparseDefocusMap sparse = estimate_defocus_sparse(img, dp, dfg.params);
      std::string csv = "x,y,radius,energy\n";
      for (const SparseDefocusSample& s : sparse.samples)
        csv += std::to_string(s.x) + "," + std::to_string(s.y) + "," + g9(s.radius) + "," +
               g9(s.energy) + "\n";
      write_text_file(dfo_sparse, csv);
      const Image dense = propagate_defocus(sparse, img, dp);
      Image scaled = dense;
      const double maxr = dp.radii.back() > 0 ? dp.radii.back() : 1.0;
      for (double& v : scaled.data) v /= maxr;
      write_image(scaled, dfo_map);
      std::cout << "edge_samples: " << sparse.samples.size() << "\nskipped: " << sparse.skipped
                << "\nsparse: " << dfo_sparse << "\nmap: " << dfo_map << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
