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

#ifndef L0DL_PROX_HPP
#define L0DL_PROX_HPP

#include <vector>

#include "l0dl/types.hpp"

namespace l0dl {

enum class StepPolicy {
  kReciprocalLipschitz,  // 0.99 / lambda_max(D'D), estimated by power iteration
  kFixed,
};

struct IhtSettings {
  int max_iterations = 200;
  StepPolicy step_policy = StepPolicy::kReciprocalLipschitz;
  double fixed_step = 0.0;       // required > 0 when step_policy == kFixed
  double stop_tolerance = 1e-8;  // relative objective decrease
};

/// Keeps the `budget` entries of largest magnitude and zeroes the rest.
/// Ties on equal magnitude keep the lower index. budget >= size(x) returns x.
Vector hard_threshold(const Vector& x, int budget);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double largest_eigenvalue(const Matrix& sym, double rel_tol = 1e-6,
                          int max_steps = 1000);

/// Step 0.99 / lambda_max(D'D). Throws on an all-zero dictionary.
double lipschitz_step(const Dictionary& dict);

struct IhtResult {
  Vector x;
  std::vector<double> objective_trace;  // 0.5||y - Dx_k||^2, starting at x0
  int iterations = 0;
};

/// Iterative hard thresholding: x <- hard_threshold(x - rho D'(Dx - y), T).
/// Stops after max_iterations or when the relative objective decrease drops
/// below stop_tolerance. x0 == nullptr starts from the zero vector.
IhtResult iht_solve(const Vector& y, const Dictionary& dict, int budget,
                    const IhtSettings& settings = {},
                    const Vector* x0 = nullptr);

}  // namespace l0dl

#endif  // L0DL_PROX_HPP
