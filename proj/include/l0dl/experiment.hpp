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

#ifndef L0DL_EXPERIMENT_HPP
#define L0DL_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "l0dl/dict_learn.hpp"
#include "l0dl/report.hpp"

namespace l0dl {

enum class UpdaterPolicy {
  kAuto,          // omp -> ksvd, iht/miqp -> least-squares
  kLeastSquares,
  kKsvd,
};

struct ExperimentConfig {
  std::vector<std::string> images;          // PGM paths
  int crop = 0;                             // 0 = whole image, else top-left crop
  std::vector<double> sigmas = {10.0, 20.0, 50.0};
  std::vector<Coder> coders = {Coder::kMiqp, Coder::kIht, Coder::kOmp};
  UpdaterPolicy updater = UpdaterPolicy::kAuto;
  int atom_count = 100;
  int budget = 20;
  int outer_iterations = 30;
  double alpha = 1.5;
  int patch_size = 8;
  int stride = 1;
  std::int64_t subsample = 0;               // training patches; 0 = all
  double lambda_rec = -1.0;                 // < 0: auto = 30/sigma (1e9 at 0)
  bool remove_dc = false;                   // subtract patch means before coding
  SolverLimits column_limits;
  int iht_max_iterations = 200;
  RelaxationMode relaxation = RelaxationMode::kHull;
  int workers = 0;
  std::uint64_t seed = 0;
  std::string out_dir = "l0dl-out";

  void validate() const;  // throws std::invalid_argument with the bad key
};

/// Desk-scale preset: 128x128 crops, p = 32, T = 5, 10 iterations, 1500
/// training patches, deterministic node-limited column solves.
ExperimentConfig desk_profile();

/// Full-scale preset (p = 100, T = 20, 30 iterations, 50 s/column). Orders of
/// magnitude more expensive than desk runs.
ExperimentConfig paper_profile();

/// Reads `key = value` lines (# comments allowed) into the config. Unknown
/// keys throw. Keys mirror the CLI flag names.
void apply_config_file(ExperimentConfig& config, const std::string& path);

struct RunFailure {
  std::string image;
  double sigma = 0.0;
  std::string method;
  std::string error;
};

struct RunOutcome {
  std::vector<PsnrRecord> records;
  std::vector<RunFailure> failures;
};

/// For each (image, sigma, coder): add noise, extract patches, learn on the
/// (optionally subsampled) noisy patches, code every patch with the final
/// dictionary, reconstruct both ways, and score PSNR against the clean
/// original. Writes psnr.tsv, per-run trace logs, and reconstructed PGMs into
/// config.out_dir. Failures are recorded and remaining runs continue.
RunOutcome run_denoise(const ExperimentConfig& config);

}  // namespace l0dl

#endif  // L0DL_EXPERIMENT_HPP
