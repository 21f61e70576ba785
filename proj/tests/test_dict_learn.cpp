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

#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <set>

#include "l0dl/dict_learn.hpp"
#include "test_support.hpp"

using namespace l0dl;

namespace {

double batch_objective(const SignalBatch& batch, const Dictionary& dict,
                       const Matrix& codes) {
  return 0.5 * (batch.signals() - dict.atoms() * codes).squaredNorm();
}

// Sparse synthetic batch Y = D0 X0 with ||x||_0 <= budget.
SignalBatch planted_batch(SeededRng& rng, Index n, Index p, int budget, Index l,
                          double noise) {
  const Dictionary d0 = testing::random_dictionary(rng, n, p);
  Matrix y(n, l);
  for (Index i = 0; i < l; ++i) {
    Vector x = Vector::Zero(p);
    for (int k = 0; k < budget; ++k) {
      x[static_cast<Index>(rng.next_index(static_cast<std::uint64_t>(p)))] =
          3.0 * (2.0 * rng.uniform01() - 1.0);
    }
    y.col(i) = d0.atoms() * x;
    for (Index r = 0; r < n; ++r) y(r, i) += noise * rng.normal();
  }
  return SignalBatch(std::move(y));
}

}  // namespace

TEST_CASE("init_dictionary permutes unit columns when l == p") {
  Matrix y = Matrix::Zero(4, 4);
  for (int j = 0; j < 4; ++j) y(j, j) = 1.0;  // distinct unit columns
  const Dictionary dict = init_dictionary(SignalBatch(y), 4, 5);
  std::set<int> seen;
  for (Index j = 0; j < 4; ++j) {
    Index hit = -1;
    for (Index i = 0; i < 4; ++i) {
      if (dict.atoms()(i, j) == 1.0) hit = i;
    }
    REQUIRE(hit >= 0);
    seen.insert(static_cast<int>(hit));
  }
  CHECK(seen.size() == 4);  // a permutation, nothing repeated
}

TEST_CASE("init_dictionary is deterministic and in the constraint set") {
  SeededRng rng(9);
  const SignalBatch batch(testing::random_matrix(rng, 6, 30));
  const Dictionary a = init_dictionary(batch, 10, 42);
  const Dictionary b = init_dictionary(batch, 10, 42);
  CHECK(a.atoms() == b.atoms());
  for (Index j = 0; j < a.atom_count(); ++j) {
    CHECK(a.atoms().col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // More atoms than signals: sampling with replacement still fills p columns.
  const Dictionary wide = init_dictionary(batch, 40, 7);
  CHECK(wide.atom_count() == 40);
}

TEST_CASE("omp on an orthonormal dictionary equals hard thresholding") {
  SeededRng rng(12);
  Matrix q = Eigen::HouseholderQR<Matrix>(testing::random_matrix(rng, 6, 6))
                 .householderQ();
  const Dictionary dict = Dictionary(q);
  const Vector y = testing::random_vector(rng, 6);
  const Vector via_omp = omp(y, dict, 3);
  const Vector via_prox = hard_threshold(q.transpose() * y, 3);
  CHECK((via_omp - via_prox).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("omp recovers a single atom exactly") {
  SeededRng rng(13);
  const Dictionary dict = testing::random_dictionary(rng, 8, 5);
  const Vector y = dict.atoms().col(3);
  const Vector x = omp(y, dict, 2);
  CHECK(x[3] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(l0_count(x) == 1);  // stopped early at zero residual
}

TEST_CASE("omp residual is orthogonal to the selected atoms") {
  SeededRng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const Dictionary dict = testing::random_dictionary(rng, 10, 16);
    const Vector y = testing::random_vector(rng, 10);
    const Vector x = omp(y, dict, 4);
    const Vector residual = y - dict.atoms() * x;
    for (Index j = 0; j < 16; ++j) {
      if (std::abs(x[j]) > kZeroTolerance) {
        CHECK(std::abs(dict.atoms().col(j).dot(residual)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("omp validates the budget") {
  const Dictionary dict = Dictionary(Matrix::Identity(3, 3));
  CHECK_THROWS_AS(omp(Vector::Zero(3), dict, 4), std::invalid_argument);
}

TEST_CASE("all coders reduce to hard thresholding on the identity") {
  Matrix y(4, 3);
  y << 3.0, 0.5, 1.0,
      -1.0, 2.0, 1.0,
      2.0, -0.5, -4.0,
      0.1, 0.2, 0.0;
  const SignalBatch batch(y);
  const Dictionary eye = Dictionary(Matrix::Identity(4, 4));
  for (Coder coder : {Coder::kMiqp, Coder::kIht, Coder::kOmp}) {
    CoderOptions options;
    options.coder = coder;
    options.workers = 1;
    const BatchResult result = sparse_code_batch(batch, eye, 2, options);
    for (Index i = 0; i < 3; ++i) {
      const Vector expected = hard_threshold(y.col(i), 2);
      CHECK((result.codes.codes().col(i) - expected).lpNorm<Eigen::Infinity>() <=
            1e-7);
    }
  }
}

TEST_CASE("exact coding dominates the greedy and proximal coders") {
  SeededRng rng(15);
  const Dictionary dict = testing::random_dictionary(rng, 10, 8);
  Matrix y(10, 20);
  for (Index i = 0; i < 20; ++i) {
    y.col(i) = testing::planted_signal(rng, dict, 2, 0.5);
  }
  const SignalBatch batch(y);

  std::map<Coder, Matrix> codes;
  for (Coder coder : {Coder::kMiqp, Coder::kIht, Coder::kOmp}) {
    CoderOptions options;
    options.coder = coder;
    options.workers = 1;
    codes[coder] = sparse_code_batch(batch, dict, 2, options).codes.codes();
  }
  for (Index i = 0; i < 20; ++i) {
    const double exact =
        half_squared_residual(y.col(i), dict, codes[Coder::kMiqp].col(i));
    const double iht =
        half_squared_residual(y.col(i), dict, codes[Coder::kIht].col(i));
    const double greedy =
        half_squared_residual(y.col(i), dict, codes[Coder::kOmp].col(i));
    CHECK(exact <= iht + 1e-6);
    CHECK(exact <= greedy + 1e-6);
  }
}

TEST_CASE("worker fan-out does not change the result") {
  SeededRng rng(16);
  const Dictionary dict = testing::random_dictionary(rng, 8, 10);
  const SignalBatch batch(testing::random_matrix(rng, 8, 12));
  CoderOptions serial;
  serial.coder = Coder::kMiqp;
  serial.workers = 1;
  CoderOptions parallel = serial;
  parallel.workers = 4;
  const BatchResult a = sparse_code_batch(batch, dict, 3, serial);
  const BatchResult b = sparse_code_batch(batch, dict, 3, parallel);
  CHECK(a.codes.codes() == b.codes.codes());
  CHECK(a.stats.mean_nodes == b.stats.mean_nodes);
}

TEST_CASE("least-squares update recovers the projected signals for X = I") {
  SeededRng rng(17);
  Matrix y = 0.8 * testing::random_matrix(rng, 5, 5);  // columns already small
  const SignalBatch batch(y);
  const SparseCode code(Matrix::Identity(5, 5), 5);
  const Dictionary updated = update_dictionary_least_squares(batch, code, 1e-12);
  const Dictionary expected = project_dictionary(y);
  CHECK((updated.atoms() - expected.atoms()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("least-squares update recovers an exact factorization") {
  SeededRng rng(18);
  const Dictionary d_true = testing::random_dictionary(rng, 6, 4);
  Matrix x = testing::random_matrix(rng, 4, 12);
  const SignalBatch batch(d_true.atoms() * x);
  const Dictionary updated =
      update_dictionary_least_squares(batch, SparseCode(x, 4), 1e-12);
  CHECK((updated.atoms() - d_true.atoms()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("least-squares update does not increase the objective when inactive") {
  SeededRng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const Dictionary d_old = testing::random_dictionary(rng, 6, 5);
    const Matrix x = testing::random_matrix(rng, 5, 15);
    const SignalBatch batch(testing::random_matrix(rng, 6, 15));
    const Dictionary d_new =
        update_dictionary_least_squares(batch, SparseCode(x, 5), 1e-10);
    // Only assert when the unit-ball projection stayed inactive.
    const Matrix unprojected =
        (x * x.transpose() + 1e-10 * Matrix::Identity(5, 5))
            .ldlt()
            .solve(x * batch.signals().transpose())
            .transpose();
    bool projection_active = false;
    for (Index j = 0; j < 5; ++j) {
      if (unprojected.col(j).norm() > 1.0) projection_active = true;
    }
    if (projection_active) continue;
    const double before = batch_objective(batch, d_old, x);
    const double after = batch_objective(batch, d_new, x);
    CHECK(after <= before + 1e-6);
  }
}

TEST_CASE("ksvd with a single atom takes the leading singular direction") {
  SeededRng rng(20);
  const Matrix y = testing::random_matrix(rng, 5, 8);
  const SignalBatch batch(y);
  const SparseCode ones(Matrix::Ones(1, 8), 1);
  const Dictionary d0 = Dictionary(testing::random_dictionary(rng, 5, 1).atoms());
  const KsvdResult result = update_dictionary_ksvd(batch, ones, d0);
  Eigen::BDCSVD<Matrix> svd(y, Eigen::ComputeThinU);
  const Vector leading = svd.matrixU().col(0);
  // Sign is arbitrary; compare up to sign.
  CHECK(std::abs(std::abs(result.dict.atoms().col(0).dot(leading)) - 1.0) <= 1e-9);
}

TEST_CASE("ksvd keeps an exact factorization at zero objective") {
  SeededRng rng(21);
  const Dictionary d_true = testing::random_dictionary(rng, 6, 4);
  Matrix x = Matrix::Zero(4, 10);
  for (Index i = 0; i < 10; ++i) {
    x(static_cast<Index>(rng.next_index(4)), i) = 1.0 + rng.uniform01();
    x(static_cast<Index>(rng.next_index(4)), i) = -0.5;
  }
  const SignalBatch batch(d_true.atoms() * x);
  const KsvdResult result =
      update_dictionary_ksvd(batch, SparseCode(x, 2), d_true);
  CHECK(batch_objective(batch, result.dict, result.codes.codes()) <= 1e-12);
}

TEST_CASE("a ksvd sweep never increases the objective") {
  SeededRng rng(22);
  for (int trial = 0; trial < 8; ++trial) {
    const Dictionary dict = testing::random_dictionary(rng, 8, 6);
    const SignalBatch batch(testing::random_matrix(rng, 8, 20));
    // Codes from a greedy pass so supports are meaningful.
    CoderOptions options;
    options.coder = Coder::kOmp;
    options.workers = 1;
    const BatchResult coded = sparse_code_batch(batch, dict, 2, options);
    const double before = batch_objective(batch, dict, coded.codes.codes());
    const KsvdResult result = update_dictionary_ksvd(batch, coded.codes, dict);
    const double after = batch_objective(batch, result.dict, result.codes.codes());
    CHECK(after <= before + 1e-8);
    // Supports are preserved.
    for (Index i = 0; i < 20; ++i) {
      for (Index j = 0; j < 6; ++j) {
        if (std::abs(coded.codes.codes()(j, i)) <= kZeroTolerance) {
          CHECK(std::abs(result.codes.codes()(j, i)) <= kZeroTolerance);
        }
      }
    }
  }
}

TEST_CASE("learn runs one coding and one update per iteration") {
  SeededRng rng(23);
  const SignalBatch batch = planted_batch(rng, 8, 6, 2, 30, 0.1);
  LearnConfig config;
  config.atom_count = 6;
  config.budget = 2;
  config.outer_iterations = 1;
  config.coder = Coder::kIht;
  config.coder_options.coder = Coder::kIht;
  config.coder_options.workers = 1;
  const LearnResult result = learn(batch, config);
  CHECK(result.trace.iterations.size() == 1);
  CHECK(result.codes.column_count() == 30);
}

TEST_CASE("learn is deterministic for a fixed seed") {
  SeededRng rng(24);
  const SignalBatch batch = planted_batch(rng, 8, 6, 2, 25, 0.2);
  LearnConfig config;
  config.atom_count = 6;
  config.budget = 2;
  config.outer_iterations = 3;
  config.coder = Coder::kMiqp;
  config.coder_options.coder = Coder::kMiqp;
  config.coder_options.workers = 1;
  config.seed = 77;
  const LearnResult a = learn(batch, config);
  const LearnResult b = learn(batch, config);
  CHECK(a.dict.atoms() == b.dict.atoms());
  CHECK(a.codes.codes() == b.codes.codes());
  REQUIRE(a.trace.iterations.size() == b.trace.iterations.size());
  for (std::size_t k = 0; k < a.trace.iterations.size(); ++k) {
    CHECK(a.trace.iterations[k].objective == b.trace.iterations[k].objective);
  }
  CHECK(serialize_trace(a.trace) == serialize_trace(b.trace));
}

TEST_CASE("learn with the exact coder decreases the objective on synthetic data") {
  SeededRng rng(25);
  const SignalBatch batch = planted_batch(rng, 12, 10, 3, 60, 0.05);
  LearnConfig config;
  config.atom_count = 10;
  config.budget = 3;
  config.outer_iterations = 5;
  config.coder = Coder::kMiqp;
  config.updater = Updater::kLeastSquares;
  config.coder_options.coder = Coder::kMiqp;
  config.coder_options.workers = 1;
  const LearnResult result = learn(batch, config);
  CHECK(result.trace.iterations.back().objective <=
        result.trace.iterations.front().objective + 1e-9);
  for (Index j = 0; j < result.dict.atom_count(); ++j) {
    CHECK(result.dict.atoms().col(j).squaredNorm() <= 1.0 + 1e-9);
  }
}

TEST_CASE("trace serialization omits wall time and is line-delimited") {
  LearnTrace trace;
  IterationRecord rec;
  rec.iteration = 1;
  rec.objective = 2.5;
  rec.mean_gap = 1e-7;
  rec.mean_nodes = 12.5;
  rec.timeouts = 0;
  rec.replaced_atoms = 2;
  rec.wall_seconds = 123.456;  // must not appear
  trace.iterations.push_back(rec);
  const std::string text = serialize_trace(trace);
  CHECK(text ==
        "iter=1 objective=2.5 mean_gap=9.9999999999999995e-08 mean_nodes=12.5 "
        "timeouts=0 replaced_atoms=2\n");
}
