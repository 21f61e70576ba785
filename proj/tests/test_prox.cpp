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

#include <Eigen/Eigenvalues>
#include <vector>

#include "l0dl/prox.hpp"
#include "test_support.hpp"

using namespace l0dl;

namespace {

// Reference prox: best objective over every support of the given size.
double brute_force_prox_value(const Vector& x, int budget) {
  const int p = static_cast<int>(x.size());
  double best = x.squaredNorm();  // empty support
  std::vector<int> support;
  const auto recurse = [&](auto&& self, int start) -> void {
    if (static_cast<int>(support.size()) == budget) return;
    for (int i = start; i < p; ++i) {
      support.push_back(i);
      double value = 0.0;
      std::vector<bool> kept(static_cast<std::size_t>(p), false);
      for (int k : support) kept[static_cast<std::size_t>(k)] = true;
      for (int k = 0; k < p; ++k) {
        if (!kept[static_cast<std::size_t>(k)]) value += x[k] * x[k];
      }
      best = std::min(best, value);
      self(self, i + 1);
      support.pop_back();
    }
  };
  recurse(recurse, 0);
  return 0.5 * best;
}

}  // namespace

TEST_CASE("hard_threshold keeps the largest magnitudes") {
  Vector x(3);
  x << 3.0, -1.0, 2.0;
  Vector expected(3);
  expected << 3.0, 0.0, 2.0;
  CHECK(hard_threshold(x, 2) == expected);
}

TEST_CASE("hard_threshold leaves feasible vectors unchanged") {
  Vector x(5);
  x << 0.0, 4.0, 0.0, 0.0, -1.0;
  CHECK(hard_threshold(x, 2) == x);
  CHECK(hard_threshold(x, 7) == x);  // budget >= p
}

TEST_CASE("hard_threshold breaks magnitude ties toward the lower index") {
  Vector x(3);
  x << 1.0, -1.0, 0.0;
  Vector expected(3);
  expected << 1.0, 0.0, 0.0;
  CHECK(hard_threshold(x, 1) == expected);
}

TEST_CASE("hard_threshold rejects nonpositive budgets") {
  CHECK_THROWS_AS(hard_threshold(Vector::Zero(3), 0), std::invalid_argument);
}

TEST_CASE("hard_threshold matches the brute-force prox for small sizes") {
  SeededRng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const int p = 2 + static_cast<int>(rng.next_index(7));
    const int budget = 1 + static_cast<int>(rng.next_index(static_cast<std::uint64_t>(p)));
    const Vector x = testing::random_vector(rng, p);
    const Vector kept = hard_threshold(x, budget);
    const double value = 0.5 * (kept - x).squaredNorm();
    CHECK(value == doctest::Approx(brute_force_prox_value(x, budget)).epsilon(1e-12));
  }
}

TEST_CASE("lipschitz_step on orthonormal dictionaries") {
  const Dictionary eye = Dictionary(Matrix::Identity(4, 4));
  CHECK(lipschitz_step(eye) == doctest::Approx(0.99).epsilon(1e-9));

  // Columns scaled out of the ball get projected back to unit norm first.
  const Dictionary projected = project_dictionary(2.0 * Matrix::Identity(4, 4));
  CHECK(lipschitz_step(projected) == doctest::Approx(0.99).epsilon(1e-9));
}

TEST_CASE("lipschitz_step rejects the all-zero dictionary") {
  CHECK_THROWS_AS(lipschitz_step(Dictionary(Matrix::Zero(3, 2))),
                  std::invalid_argument);
}

TEST_CASE("power iteration tracks the dense eigensolver") {
  SeededRng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const Dictionary dict = testing::random_dictionary(rng, 10, 20);
    const Matrix gram = dict.atoms().transpose() * dict.atoms();
    Eigen::SelfAdjointEigenSolver<Matrix> eigen(gram);
    const double lmax = eigen.eigenvalues().maxCoeff();
    const double rho = lipschitz_step(dict);
    CHECK(rho * lmax >= 0.98);
    CHECK(rho * lmax <= 1.0);
  }
}

TEST_CASE("iht_solve on the identity converges in one step") {
  Vector y(3);
  y << 3.0, -1.0, 2.0;
  IhtSettings settings;
  settings.step_policy = StepPolicy::kFixed;
  settings.fixed_step = 1.0;
  const IhtResult result = iht_solve(y, Dictionary(Matrix::Identity(3, 3)), 2, settings);
  Vector expected(3);
  expected << 3.0, 0.0, 2.0;
  CHECK(result.x == expected);
  CHECK(result.objective_trace.front() == doctest::Approx(0.5 * y.squaredNorm()));
  CHECK(result.objective_trace.back() == doctest::Approx(0.5));
}

TEST_CASE("iht_solve keeps the zero fixed point") {
  SeededRng rng(8);
  const Dictionary dict = testing::random_dictionary(rng, 6, 10);
  const IhtResult result = iht_solve(Vector::Zero(6), dict, 3);
  CHECK(result.x.isZero(0.0));
  CHECK(result.objective_trace.back() == 0.0);
}

TEST_CASE("iht_solve objective trace is non-increasing with the default step") {
  SeededRng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Dictionary dict = testing::random_dictionary(rng, 10, 15);
    const Vector y = testing::planted_signal(rng, dict, 3, 0.3);
    const IhtResult result = iht_solve(y, dict, 3);
    for (std::size_t k = 1; k < result.objective_trace.size(); ++k) {
      CHECK(result.objective_trace[k] <= result.objective_trace[k - 1] + 1e-10);
    }
    CHECK(l0_count(result.x) <= 3);
    CHECK(result.objective_trace.back() <= result.objective_trace.front() + 1e-12);
  }
}

TEST_CASE("iht_solve is deterministic") {
  SeededRng rng(123);
  const Dictionary dict = testing::random_dictionary(rng, 8, 12);
  const Vector y = testing::random_vector(rng, 8);
  const IhtResult a = iht_solve(y, dict, 4);
  const IhtResult b = iht_solve(y, dict, 4);
  CHECK(a.x == b.x);
  CHECK(a.objective_trace == b.objective_trace);
}

TEST_CASE("iht_solve validates inputs") {
  const Dictionary dict = Dictionary(Matrix::Identity(3, 3));
  CHECK_THROWS_AS(iht_solve(Vector::Zero(2), dict, 1), std::invalid_argument);
  IhtSettings bad;
  bad.max_iterations = 0;
  CHECK_THROWS_AS(iht_solve(Vector::Zero(3), dict, 1, bad), std::invalid_argument);
  IhtSettings fixed;
  fixed.step_policy = StepPolicy::kFixed;
  fixed.fixed_step = 0.0;
  CHECK_THROWS_AS(iht_solve(Vector::Zero(3), dict, 1, fixed), std::invalid_argument);
}
