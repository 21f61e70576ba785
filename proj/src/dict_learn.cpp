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

#include "l0dl/dict_learn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "l0dl/rng.hpp"

namespace l0dl {

namespace {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("L0DL_WORKERS")) {
    const int parsed = std::atoi(env);
    if (parsed >= 1) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

Vector unit_random(SeededRng& rng, Index n) {
  Vector v(n);
  double norm = 0.0;
  while (norm <= 1e-12) {
    for (Index i = 0; i < n; ++i) v[i] = rng.normal();
    norm = v.norm();
  }
  return v / norm;
}

// Residual norms ||y_i - D x_i|| for every column.
Vector column_residuals(const SignalBatch& batch, const Matrix& atoms,
                        const Matrix& codes) {
  Matrix residual = batch.signals() - atoms * codes;
  return residual.colwise().norm();
}

// Replaces each listed atom with the (normalized) worst-reconstructed signal
// column, never reusing a column within one sweep.
int replace_atoms_with_worst(Matrix& atoms, const std::vector<int>& dead,
                             const SignalBatch& batch, const Matrix& codes,
                             SeededRng& rng) {
  if (dead.empty()) return 0;
  Vector errors = column_residuals(batch, atoms, codes);
  std::vector<bool> used(static_cast<std::size_t>(batch.column_count()), false);
  for (int j : dead) {
    Index worst = -1;
    double worst_err = -1.0;
    for (Index i = 0; i < errors.size(); ++i) {
      if (!used[static_cast<std::size_t>(i)] && errors[i] > worst_err) {
        worst = i;
        worst_err = errors[i];
      }
    }
    Vector atom;
    if (worst >= 0 && batch.signals().col(worst).norm() > 1e-12) {
      used[static_cast<std::size_t>(worst)] = true;
      atom = batch.signals().col(worst).normalized();
    } else {
      atom = unit_random(rng, atoms.rows());
    }
    atoms.col(j) = atom;
  }
  return static_cast<int>(dead.size());
}

}  // namespace

const char* to_string(Coder coder) {
  switch (coder) {
    case Coder::kMiqp: return "miqp";
    case Coder::kIht: return "iht";
    case Coder::kOmp: return "omp";
  }
  return "unknown";
}

const char* to_string(Updater updater) {
  switch (updater) {
    case Updater::kLeastSquares: return "least-squares";
    case Updater::kKsvd: return "ksvd";
  }
  return "unknown";
}

Vector omp(const Vector& y, const Dictionary& dict, int budget) {
  const Index n = dict.signal_dim();
  const Index p = dict.atom_count();
  if (y.size() != n) {
    throw std::invalid_argument("omp: dimension mismatch");
  }
  if (budget < 1 || budget > std::min(n, p)) {
    throw std::invalid_argument("omp: budget must satisfy 1 <= T <= min(n, p)");
  }
  const Matrix& d = dict.atoms();
  Vector x = Vector::Zero(p);
  Vector residual = y;
  std::vector<Index> support;
  for (int step = 0; step < budget; ++step) {
    if (residual.norm() <= 1e-10) break;
    const Vector scores = d.transpose() * residual;
    Index pick = -1;
    double best = -1.0;
    for (Index j = 0; j < p; ++j) {
      const double score = std::abs(scores[j]);
      if (score > best) {
        best = score;
        pick = j;
      }
    }
    if (best <= 0.0) break;
    support.push_back(pick);

    Matrix d_support(n, static_cast<Index>(support.size()));
    for (std::size_t c = 0; c < support.size(); ++c) {
      d_support.col(static_cast<Index>(c)) = d.col(support[c]);
    }
    // Minimum-norm solve handles rank-deficient supports.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(d_support);
    const Vector coefs = cod.solve(y);
    x.setZero();
    for (std::size_t c = 0; c < support.size(); ++c) {
      x[support[c]] = coefs[static_cast<Index>(c)];
    }
    residual = y - d_support * coefs;
  }
  return x;
}

Dictionary init_dictionary(const SignalBatch& batch, int atom_count,
                           std::uint64_t seed) {
  if (atom_count < 1) {
    throw std::invalid_argument("init_dictionary: atom_count must be >= 1");
  }
  const Index n = batch.signal_dim();
  const Index l = batch.column_count();
  SeededRng rng(seed);

  std::vector<Index> picks;
  picks.reserve(static_cast<std::size_t>(atom_count));
  if (l >= atom_count) {
    // Partial Fisher-Yates: first atom_count entries of a seeded shuffle.
    std::vector<Index> pool(static_cast<std::size_t>(l));
    std::iota(pool.begin(), pool.end(), Index{0});
    for (int k = 0; k < atom_count; ++k) {
      const std::size_t j =
          static_cast<std::size_t>(k) +
          static_cast<std::size_t>(rng.next_index(static_cast<std::uint64_t>(l - k)));
      std::swap(pool[static_cast<std::size_t>(k)], pool[j]);
      picks.push_back(pool[static_cast<std::size_t>(k)]);
    }
  } else {
    for (int k = 0; k < atom_count; ++k) {
      picks.push_back(static_cast<Index>(rng.next_index(static_cast<std::uint64_t>(l))));
    }
  }

  Matrix atoms(n, atom_count);
  for (int k = 0; k < atom_count; ++k) {
    const Vector col = batch.signals().col(picks[static_cast<std::size_t>(k)]);
    const double norm = col.norm();
    if (norm > 1e-12) {
      atoms.col(k) = col / norm;
    } else {
      atoms.col(k) = unit_random(rng, n);
    }
  }
  return Dictionary(std::move(atoms));
}

BatchResult sparse_code_batch(const SignalBatch& batch, const Dictionary& dict,
                              int budget, const CoderOptions& options,
                              const Matrix* warm_codes) {
  const Index p = dict.atom_count();
  const Index l = batch.column_count();
  if (batch.signal_dim() != dict.signal_dim()) {
    throw std::invalid_argument("sparse_code_batch: dimension mismatch");
  }
  if (warm_codes != nullptr &&
      (warm_codes->rows() != p || warm_codes->cols() != l)) {
    throw std::invalid_argument("sparse_code_batch: warm_codes shape mismatch");
  }

  // One power iteration per dictionary, shared across columns.
  IhtSettings iht_settings = options.iht;
  iht_settings.step_policy = StepPolicy::kFixed;
  iht_settings.fixed_step = lipschitz_step(dict);

  Matrix codes(p, l);
  std::vector<double> gaps(static_cast<std::size_t>(l), 0.0);
  std::vector<double> nodes(static_cast<std::size_t>(l), 0.0);
  std::vector<std::uint8_t> limited(static_cast<std::size_t>(l), 0);
  std::vector<std::string> errors(static_cast<std::size_t>(l));
  std::atomic<Index> cursor{0};
  std::atomic<bool> failed{false};

  auto code_column = [&](Index i) {
    const Vector y = batch.signals().col(i);
    switch (options.coder) {
      case Coder::kIht: {
        codes.col(i) = iht_solve(y, dict, budget, iht_settings).x;
        break;
      }
      case Coder::kOmp: {
        codes.col(i) = omp(y, dict, budget);
        break;
      }
      case Coder::kMiqp: {
        std::optional<Vector> warm;
        if (warm_codes != nullptr &&
            warm_codes->col(i).lpNorm<Eigen::Infinity>() > 0.0) {
          warm = warm_codes->col(i);
        } else {
          warm = iht_solve(y, dict, budget, iht_settings).x;
        }
        const MiqpProblem problem = build_problem(y, dict, budget, warm, options.alpha);
        SolveOptions solve_options;
        solve_options.relaxation = options.relaxation;
        const MiqpSolution sol = solve_miqp(problem, options.limits, solve_options);
        codes.col(i) = sol.x;
        gaps[static_cast<std::size_t>(i)] = sol.gap;
        nodes[static_cast<std::size_t>(i)] =
            static_cast<double>(sol.stats.nodes_explored);
        limited[static_cast<std::size_t>(i)] =
            (sol.status == SolveStatus::kNodeLimit ||
             sol.status == SolveStatus::kTimeLimit)
                ? 1
                : 0;
        break;
      }
    }
  };

  auto worker = [&]() {
    for (;;) {
      const Index i = cursor.fetch_add(1);
      if (i >= l) return;
      try {
        code_column(i);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
        failed.store(true);
        codes.col(i).setZero();
      }
    }
  };

  const int workers = std::min<int>(resolve_workers(options.workers),
                                    static_cast<int>(l));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (failed.load()) {
    for (Index i = 0; i < l; ++i) {
      if (!errors[static_cast<std::size_t>(i)].empty()) {
        throw std::runtime_error("sparse_code_batch: column " + std::to_string(i) +
                                 ": " + errors[static_cast<std::size_t>(i)]);
      }
    }
  }

  CodeStats stats;
  for (Index i = 0; i < l; ++i) {
    stats.mean_gap += gaps[static_cast<std::size_t>(i)];
    stats.mean_nodes += nodes[static_cast<std::size_t>(i)];
    stats.timeouts += limited[static_cast<std::size_t>(i)];
  }
  stats.mean_gap /= static_cast<double>(l);
  stats.mean_nodes /= static_cast<double>(l);
  return BatchResult{SparseCode(std::move(codes), budget), stats};
}

Dictionary update_dictionary_least_squares(const SignalBatch& batch,
                                           const SparseCode& code,
                                           double ridge) {
  if (code.column_count() != batch.column_count()) {
    throw std::invalid_argument("update_dictionary_least_squares: shape mismatch");
  }
  if (ridge < 0.0) {
    throw std::invalid_argument("update_dictionary_least_squares: ridge must be >= 0");
  }
  const Matrix& x = code.codes();
  Matrix gram = x * x.transpose();
  gram.diagonal().array() += ridge;
  // D = Y X' (X X' + ridge I)^-1, solved as gram * D' = X Y'.
  Matrix d_t = gram.ldlt().solve(x * batch.signals().transpose());
  return project_dictionary(d_t.transpose());
}

KsvdResult update_dictionary_ksvd(const SignalBatch& batch,
                                  const SparseCode& code,
                                  const Dictionary& dict, std::uint64_t seed) {
  const Index p = dict.atom_count();
  const Index l = batch.column_count();
  if (code.atom_count() != p || code.column_count() != l ||
      batch.signal_dim() != dict.signal_dim()) {
    throw std::invalid_argument("update_dictionary_ksvd: shape mismatch");
  }

  Matrix atoms = dict.atoms();
  Matrix codes = code.codes();
  SeededRng rng(mix_seed(seed, 0x6b73));
  int replaced = 0;

  Matrix residual = batch.signals() - atoms * codes;
  std::vector<int> dead;
  for (Index j = 0; j < p; ++j) {
    std::vector<Index> users;
    for (Index i = 0; i < l; ++i) {
      if (std::abs(codes(j, i)) > code.zero_tolerance()) users.push_back(i);
    }
    if (users.empty()) {
      dead.push_back(static_cast<int>(j));
      continue;
    }

    // Residual with atom j's contribution added back, restricted to users.
    Matrix e(atoms.rows(), static_cast<Index>(users.size()));
    for (std::size_t c = 0; c < users.size(); ++c) {
      e.col(static_cast<Index>(c)) =
          residual.col(users[c]) + atoms.col(j) * codes(j, users[c]);
    }
    Eigen::BDCSVD<Matrix> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sigma = svd.singularValues()[0];
    if (!(sigma > 1e-12)) {
      // Degenerate restricted residual: keep the atom, zero the row.
      for (std::size_t c = 0; c < users.size(); ++c) {
        residual.col(users[c]) += atoms.col(j) * codes(j, users[c]);
        codes(j, users[c]) = 0.0;
      }
      continue;
    }
    const Vector new_atom = svd.matrixU().col(0);
    for (std::size_t c = 0; c < users.size(); ++c) {
      const double coef = sigma * svd.matrixV()(static_cast<Index>(c), 0);
      residual.col(users[c]) =
          e.col(static_cast<Index>(c)) - new_atom * coef;
      codes(j, users[c]) = coef;
    }
    atoms.col(j) = new_atom;
  }

  replaced = replace_atoms_with_worst(atoms, dead, batch, codes, rng);
  return KsvdResult{Dictionary(std::move(atoms)),
                    SparseCode(std::move(codes), code.budget(),
                               code.zero_tolerance()),
                    replaced};
}

std::string serialize_trace(const LearnTrace& trace) {
  std::ostringstream out;
  char buf[64];
  for (const IterationRecord& rec : trace.iterations) {
    out << "iter=" << rec.iteration;
    std::snprintf(buf, sizeof buf, "%.17g", rec.objective);
    out << " objective=" << buf;
    std::snprintf(buf, sizeof buf, "%.17g", rec.mean_gap);
    out << " mean_gap=" << buf;
    std::snprintf(buf, sizeof buf, "%.17g", rec.mean_nodes);
    out << " mean_nodes=" << buf;
    out << " timeouts=" << rec.timeouts
        << " replaced_atoms=" << rec.replaced_atoms << "\n";
  }
  return out.str();
}

LearnResult learn(const SignalBatch& batch, const LearnConfig& config) {
  if (config.atom_count < 1 || config.budget < 1 ||
      config.budget > config.atom_count || config.outer_iterations < 1) {
    throw std::invalid_argument("learn: invalid configuration");
  }
  if (config.coder == Coder::kOmp &&
      config.budget > std::min<Index>(batch.signal_dim(), config.atom_count)) {
    throw std::invalid_argument("learn: omp needs T <= min(n, p)");
  }

  Dictionary dict = init_dictionary(batch, config.atom_count, config.seed);
  SeededRng dead_rng(mix_seed(config.seed, 0xdead));
  Matrix codes;  // empty until the first coding pass
  LearnTrace trace;

  for (int iter = 0; iter < config.outer_iterations; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    BatchResult coded = sparse_code_batch(
        batch, dict, config.budget, config.coder_options,
        codes.size() > 0 ? &codes : nullptr);

    int replaced = 0;
    if (config.updater == Updater::kKsvd) {
      KsvdResult updated = update_dictionary_ksvd(
          batch, coded.codes, dict, mix_seed(config.seed, 1000 + iter));
      dict = std::move(updated.dict);
      codes = updated.codes.codes();
      replaced = updated.replaced_atoms;
    } else {
      dict = update_dictionary_least_squares(batch, coded.codes);
      codes = coded.codes.codes();
      // Replace atoms used by fewer columns than the usage threshold.
      std::vector<int> dead;
      for (Index j = 0; j < dict.atom_count(); ++j) {
        int usage = 0;
        for (Index i = 0; i < codes.cols(); ++i) {
          if (std::abs(codes(j, i)) > kZeroTolerance) ++usage;
        }
        if (usage < config.dead_atom_usage_threshold) dead.push_back(static_cast<int>(j));
      }
      if (!dead.empty()) {
        Matrix atoms = dict.atoms();
        replaced = replace_atoms_with_worst(atoms, dead, batch, codes, dead_rng);
        dict = Dictionary(std::move(atoms));
      }
    }

    IterationRecord rec;
    rec.iteration = iter + 1;
    rec.objective = 0.5 * (batch.signals() - dict.atoms() * codes).squaredNorm();
    rec.mean_gap = coded.stats.mean_gap;
    rec.mean_nodes = coded.stats.mean_nodes;
    rec.timeouts = coded.stats.timeouts;
    rec.replaced_atoms = replaced;
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.iterations.push_back(rec);
  }

  return LearnResult{std::move(dict),
                     SparseCode(std::move(codes), config.budget), trace};
}

}  // namespace l0dl
