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

#ifndef L0DL_DICT_LEARN_HPP
#define L0DL_DICT_LEARN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "l0dl/miqp.hpp"
#include "l0dl/prox.hpp"
#include "l0dl/types.hpp"

namespace l0dl {

enum class Coder { kMiqp, kIht, kOmp };
enum class Updater { kLeastSquares, kKsvd };

const char* to_string(Coder coder);
const char* to_string(Updater updater);

struct CoderOptions {
  Coder coder = Coder::kMiqp;
  SolverLimits limits;                       // per-column MIQP limits
  double alpha = 1.5;                        // big-M inflation
  IhtSettings iht;                           // IHT / warm-start settings
  RelaxationMode relaxation = RelaxationMode::kHull;
  int workers = 0;  // 0: L0DL_WORKERS env var, else hardware_concurrency
};

struct CodeStats {
  double mean_gap = 0.0;    // MIQP only; 0 for the other coders
  double mean_nodes = 0.0;  // MIQP only
  int timeouts = 0;         // columns stopped by node or time limit
};

struct BatchResult {
  SparseCode codes;
  CodeStats stats;
};

/// Codes every column of Y against the fixed dictionary. With coder = kMiqp a
/// column is warm-started from warm_codes (when given and nonzero) or from a
/// fresh IHT solve. Columns are independent; execution may fan out over a
/// worker pool, results are gathered positionally so parallelism never
/// changes the output.
BatchResult sparse_code_batch(const SignalBatch& batch, const Dictionary& dict,
                              int budget, const CoderOptions& options,
                              const Matrix* warm_codes = nullptr);

/// Orthogonal matching pursuit: greedily picks the atom with the largest
/// |d_j'r| (lower index on ties), refits by least squares on the support,
/// stops early once ||r|| <= 1e-10.
Vector omp(const Vector& y, const Dictionary& dict, int budget);

/// p columns sampled from Y (without replacement when possible), normalized
/// to unit norm; zero columns become seeded random unit vectors.
Dictionary init_dictionary(const SignalBatch& batch, int atom_count,
                           std::uint64_t seed);

/// MOD update D = Y X' (X X' + ridge I)^-1 followed by projection onto the
/// unit-ball constraint set.
Dictionary update_dictionary_least_squares(const SignalBatch& batch,
                                           const SparseCode& code,
                                           double ridge = 1e-8);

struct KsvdResult {
  Dictionary dict;
  SparseCode codes;
  int replaced_atoms = 0;
};

/// K-SVD sweep: per atom, rank-1 SVD refit of the residual restricted to the
/// columns using that atom; code supports are preserved. Unused atoms are
/// replaced by the worst-reconstructed signal column (normalized).
KsvdResult update_dictionary_ksvd(const SignalBatch& batch,
                                  const SparseCode& code,
                                  const Dictionary& dict,
                                  std::uint64_t seed = 0);

struct LearnConfig {
  int atom_count = 100;
  int budget = 20;
  int outer_iterations = 30;
  Coder coder = Coder::kMiqp;
  Updater updater = Updater::kLeastSquares;
  CoderOptions coder_options;
  int dead_atom_usage_threshold = 1;  // replace atoms used by fewer columns
  std::uint64_t seed = 0;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;  // sum_i 0.5||y_i - D x_i||^2 after the update phase
  double mean_gap = 0.0;
  double mean_nodes = 0.0;
  int timeouts = 0;
  int replaced_atoms = 0;
  double wall_seconds = 0.0;  // in-memory only; not serialized
};

struct LearnTrace {
  std::vector<IterationRecord> iterations;
};

/// One line per iteration; wall time is deliberately left out so logs are
/// byte-identical across reruns of the same seed.
std::string serialize_trace(const LearnTrace& trace);

struct LearnResult {
  Dictionary dict;
  SparseCode codes;
  LearnTrace trace;
};

/// Alternating two-phase learning: seeded column-sample init, then
/// outer_iterations rounds of (sparse coding; dictionary update; dead-atom
/// replacement). Iteration k's codes warm-start iteration k+1's MIQP solves.
LearnResult learn(const SignalBatch& batch, const LearnConfig& config);

}  // namespace l0dl

#endif  // L0DL_DICT_LEARN_HPP
