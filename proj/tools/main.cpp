// Copyright 2026 The l0dl Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "l0dl/dict_learn.hpp"
#include "l0dl/experiment.hpp"
#include "l0dl/imaging.hpp"
#include "l0dl/lp_export.hpp"
#include "l0dl/miqp.hpp"
#include "l0dl/oracle.hpp"
#include "l0dl/prox.hpp"
#include "l0dl/report.hpp"
#include "l0dl/rng.hpp"

namespace {

using namespace l0dl;

struct DenoiseArgs {
  std::string config_file;
  std::string profile = "desk";
  std::vector<std::string> images;
  int crop = -1;
  std::vector<double> sigmas;
  std::vector<std::string> coders;
  std::string updater;
  int atoms = -1;
  int budget = -1;
  int iterations = -1;
  double alpha = -1.0;
  int patch_size = -1;
  int stride = -1;
  long long subsample = -1;
  std::string lambda_rec;
  bool remove_dc = false;
  double time_limit = -1.0;
  long long node_limit = -1;
  double gap_tolerance = -1.0;
  double relative_gap_limit = -1.0;
  int iht_iterations = -1;
  std::string relaxation;
  int workers = -1;
  long long seed = -1;
  std::string out;
};

ExperimentConfig build_experiment_config(const DenoiseArgs& args) {
  ExperimentConfig config;
  if (args.profile == "desk") {
    config = desk_profile();
  } else if (args.profile == "paper") {
    config = paper_profile();
    std::cerr << "warning: the paper profile runs tens of thousands of exact "
                 "solves per iteration for 30 iterations with a 50 s "
                 "per-column budget; expect a very long run\n";
  } else if (args.profile != "none") {
    throw CLI::ValidationError("--profile must be desk, paper, or none");
  }
  if (!args.config_file.empty()) apply_config_file(config, args.config_file);

  if (!args.images.empty()) config.images = args.images;
  if (args.crop >= 0) config.crop = args.crop;
  if (!args.sigmas.empty()) config.sigmas = args.sigmas;
  if (!args.coders.empty()) {
    config.coders.clear();
    for (const std::string& c : args.coders) {
      if (c == "miqp") config.coders.push_back(Coder::kMiqp);
      else if (c == "iht") config.coders.push_back(Coder::kIht);
      else if (c == "omp") config.coders.push_back(Coder::kOmp);
      else throw CLI::ValidationError("unknown coder '" + c + "'");
    }
  }
  if (!args.updater.empty()) {
    if (args.updater == "auto") config.updater = UpdaterPolicy::kAuto;
    else if (args.updater == "least-squares") config.updater = UpdaterPolicy::kLeastSquares;
    else if (args.updater == "ksvd") config.updater = UpdaterPolicy::kKsvd;
    else throw CLI::ValidationError("unknown updater '" + args.updater + "'");
  }
  if (args.atoms > 0) config.atom_count = args.atoms;
  if (args.budget > 0) config.budget = args.budget;
  if (args.iterations > 0) config.outer_iterations = args.iterations;
  if (args.alpha > 0.0) config.alpha = args.alpha;
  if (args.patch_size > 0) config.patch_size = args.patch_size;
  if (args.stride > 0) config.stride = args.stride;
  if (args.subsample >= 0) config.subsample = args.subsample;
  if (!args.lambda_rec.empty()) {
    config.lambda_rec = args.lambda_rec == "auto" ? -1.0 : std::stod(args.lambda_rec);
  }
  if (args.remove_dc) config.remove_dc = true;
  if (args.time_limit > 0.0) config.column_limits.time_limit_seconds = args.time_limit;
  if (args.node_limit > 0) config.column_limits.node_limit = args.node_limit;
  if (args.gap_tolerance > 0.0) config.column_limits.gap_tolerance = args.gap_tolerance;
  if (args.relative_gap_limit >= 0.0) {
    config.column_limits.relative_gap_limit = args.relative_gap_limit;
  }
  if (args.iht_iterations > 0) config.iht_max_iterations = args.iht_iterations;
  if (!args.relaxation.empty()) {
    if (args.relaxation == "hull") config.relaxation = RelaxationMode::kHull;
    else if (args.relaxation == "box") config.relaxation = RelaxationMode::kBox;
    else throw CLI::ValidationError("unknown relaxation '" + args.relaxation + "'");
  }
  if (args.workers >= 0) config.workers = args.workers;
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
  if (!args.out.empty()) config.out_dir = args.out;
  return config;
}

void add_denoise_flags(CLI::App* cmd, DenoiseArgs& args) {
  cmd->add_option("--config", args.config_file, "flat key = value config file");
  cmd->add_option("--profile", args.profile, "parameter preset: desk, paper, none")
      ->capture_default_str();
  cmd->add_option("--images", args.images, "input PGM images")->delimiter(',');
  cmd->add_option("--crop", args.crop, "top-left square crop size (0 = full)");
  cmd->add_option("--sigmas", args.sigmas, "noise standard deviations")->delimiter(',');
  cmd->add_option("--coders", args.coders, "coders to run: miqp, iht, omp")->delimiter(',');
  cmd->add_option("--updater", args.updater, "auto, least-squares, or ksvd");
  cmd->add_option("--atoms", args.atoms, "dictionary atom count p");
  cmd->add_option("--budget", args.budget, "sparsity budget T");
  cmd->add_option("--iterations", args.iterations, "outer alternations");
  cmd->add_option("--alpha", args.alpha, "big-M inflation factor");
  cmd->add_option("--patch-size", args.patch_size, "patch edge length");
  cmd->add_option("--stride", args.stride, "patch stride");
  cmd->add_option("--subsample", args.subsample, "training patch count (0 = all)");
  cmd->add_option("--lambda-rec", args.lambda_rec,
                  "weighted-reconstruction blend weight, or 'auto' (30/sigma)");
  cmd->add_flag("--remove-dc", args.remove_dc, "subtract patch means before coding");
  cmd->add_option("--time-limit", args.time_limit, "per-column seconds");
  cmd->add_option("--node-limit", args.node_limit, "per-column node cap");
  cmd->add_option("--gap-tolerance", args.gap_tolerance, "absolute optimality gap");
  cmd->add_option("--relative-gap-limit", args.relative_gap_limit,
                  "early-stop relative gap (0 = off)");
  cmd->add_option("--iht-iterations", args.iht_iterations, "IHT iteration cap");
  cmd->add_option("--relaxation", args.relaxation, "node relaxation: hull or box");
  cmd->add_option("--workers", args.workers,
                  "worker pool size (default: L0DL_WORKERS env or hardware)");
  cmd->add_option("--seed", args.seed, "master seed");
  cmd->add_option("--out", args.out, "output directory");
}

int run_report(const std::vector<std::string>& inputs, const std::string& out_prefix,
               const std::string& reference) {
  std::vector<PsnrRecord> records;
  for (const std::string& path : inputs) {
    std::vector<PsnrRecord> part = read_psnr_table_file(path);
    records.insert(records.end(), part.begin(), part.end());
  }
  const CompareReport report = compare_report(std::move(records), reference);
  const std::string md = to_markdown(report);
  const std::string tsv = to_tsv(report);
  {
    std::ofstream out(out_prefix + ".md", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + out_prefix + ".md");
    out << md;
  }
  {
    std::ofstream out(out_prefix + ".tsv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + out_prefix + ".tsv");
    out << tsv;
  }
  std::cout << md;
  return 0;
}

int run_export_lp(const std::string& image, int patch_index, double sigma,
                  int atoms, int budget, double alpha, long long seed,
                  bool tighten, int crop, const std::string& out_path) {
  GrayImage clean = load_pgm(image);
  if (crop > 0) {
    if (clean.height() < crop || clean.width() < crop) {
      std::cerr << "image smaller than the requested crop\n";
      return 1;
    }
    clean = GrayImage(clean.pixels().topLeftCorner(crop, crop));
  }
  const GrayImage noisy =
      add_gaussian_noise(clean, sigma, static_cast<std::uint64_t>(seed));
  const PatchGrid grid = extract_patches(noisy);
  if (patch_index < 0 || patch_index >= grid.patches.column_count()) {
    std::cerr << "patch index out of range (have " << grid.patches.column_count()
              << " patches)\n";
    return 1;
  }
  const Dictionary dict = init_dictionary(grid.patches, atoms,
                                          static_cast<std::uint64_t>(seed));
  const Vector y = grid.patches.signals().col(patch_index);
  const IhtResult warm = iht_solve(y, dict, budget);
  const MiqpProblem problem = build_problem(y, dict, budget, warm.x, alpha);
  export_lp_file(problem, tighten, out_path);
  std::cout << "wrote " << out_path << " (p=" << atoms << ", T=" << budget
            << ", M=" << problem.big_m() << ")\n";
  return 0;
}

int run_oracle(int n, int p, int budget, long long seed, double big_m_scale) {
  SeededRng rng(static_cast<std::uint64_t>(seed));
  Matrix d(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) d(i, j) = rng.normal();
  }
  const Dictionary dict = project_dictionary(d);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = rng.normal();

  const double big_m =
      big_m_scale * (dict.atoms().transpose() * y).lpNorm<Eigen::Infinity>();
  const OracleResult oracle = best_subset_oracle(y, dict, budget, big_m);
  const MiqpProblem problem(y, dict, budget, big_m);
  const MiqpSolution solution = solve_miqp(problem);

  std::printf("oracle objective:  %.12g\n", oracle.objective);
  std::printf("solver objective:  %.12g (status %s, gap %.3g, %lld nodes)\n",
              solution.objective, to_string(solution.status), solution.gap,
              static_cast<long long>(solution.stats.nodes_explored));
  const bool match = std::abs(oracle.objective - solution.objective) <= 1e-6;
  std::printf("match within 1e-6: %s\n", match ? "yes" : "NO");
  return match ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact l0 sparse coding, dictionary learning, and patch denoising"};
  app.require_subcommand(1);

  DenoiseArgs denoise_args;
  CLI::App* denoise = app.add_subcommand("denoise", "run a denoising experiment");
  add_denoise_flags(denoise, denoise_args);

  std::vector<std::string> report_inputs;
  std::string report_out = "summary";
  std::string report_reference = "miqp";
  CLI::App* report = app.add_subcommand("report", "merge psnr tables into a summary");
  report->add_option("--inputs", report_inputs, "psnr.tsv files")
      ->required()
      ->delimiter(',');
  report->add_option("--out", report_out, "output prefix")->capture_default_str();
  report->add_option("--reference", report_reference, "reference method name")
      ->capture_default_str();

  std::string lp_image;
  int lp_patch = 0;
  double lp_sigma = 50.0;
  int lp_atoms = 32;
  int lp_budget = 5;
  double lp_alpha = 1.5;
  long long lp_seed = 0;
  bool lp_tighten = false;
  int lp_crop = 128;
  std::string lp_out = "instance.lp";
  CLI::App* export_lp_cmd =
      app.add_subcommand("export-lp", "dump one patch's exact-coding instance");
  export_lp_cmd->add_option("--image", lp_image, "input PGM")->required();
  export_lp_cmd->add_option("--patch-index", lp_patch, "which patch")->capture_default_str();
  export_lp_cmd->add_option("--sigma", lp_sigma, "noise level")->capture_default_str();
  export_lp_cmd->add_option("--atoms", lp_atoms, "dictionary atoms")->capture_default_str();
  export_lp_cmd->add_option("--budget", lp_budget, "sparsity budget")->capture_default_str();
  export_lp_cmd->add_option("--alpha", lp_alpha, "big-M inflation")->capture_default_str();
  export_lp_cmd->add_option("--seed", lp_seed, "seed")->capture_default_str();
  export_lp_cmd->add_flag("--tighten", lp_tighten, "emit the l1/box tightening rows");
  export_lp_cmd->add_option("--crop", lp_crop, "crop size (0 = full)")->capture_default_str();
  export_lp_cmd->add_option("--out", lp_out, "output path")->capture_default_str();

  int oracle_n = 10;
  int oracle_p = 8;
  int oracle_budget = 3;
  long long oracle_seed = 0;
  double oracle_scale = 10.0;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "brute-force subset oracle vs the exact solver on a random instance");
  oracle_cmd->add_option("--n", oracle_n, "signal dimension")->capture_default_str();
  oracle_cmd->add_option("--p", oracle_p, "atom count")->capture_default_str();
  oracle_cmd->add_option("--budget", oracle_budget, "sparsity budget")->capture_default_str();
  oracle_cmd->add_option("--seed", oracle_seed, "seed")->capture_default_str();
  oracle_cmd->add_option("--big-m-scale", oracle_scale, "M = scale * ||D'y||_inf")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (denoise->parsed()) {
      const ExperimentConfig config = build_experiment_config(denoise_args);
      const RunOutcome outcome = run_denoise(config);
      std::cout << "wrote " << config.out_dir << "/psnr.tsv with "
                << outcome.records.size() << " rows\n";
      if (!outcome.failures.empty()) {
        std::cerr << outcome.failures.size() << " run(s) failed\n";
        return 1;
      }
      return 0;
    }
    if (report->parsed()) {
      return run_report(report_inputs, report_out, report_reference);
    }
    if (export_lp_cmd->parsed()) {
      return run_export_lp(lp_image, lp_patch, lp_sigma, lp_atoms, lp_budget,
                           lp_alpha, lp_seed, lp_tighten, lp_crop, lp_out);
    }
    if (oracle_cmd->parsed()) {
      return run_oracle(oracle_n, oracle_p, oracle_budget, oracle_seed, oracle_scale);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
