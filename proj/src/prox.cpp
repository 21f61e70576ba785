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

#include "l0dl/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace l0dl {

Vector hard_threshold(const Vector& x, int budget) {
  if (budget < 1) {
    throw std::invalid_argument("hard_threshold: budget must be >= 1");
  }
  const Index p = x.size();
  if (budget >= p) return x;

  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  // Largest magnitude first; equal magnitudes keep the lower index.
  std::nth_element(order.begin(), order.begin() + budget, order.end(),
                   [&x](Index a, Index b) {
                     const double fa = std::abs(x[a]);
                     const double fb = std::abs(x[b]);
                     if (fa != fb) return fa > fb;
                     return a < b;
                   });
  Vector out = Vector::Zero(p);
  for (int k = 0; k < budget; ++k) {
    out[order[static_cast<std::size_t>(k)]] = x[order[static_cast<std::size_t>(k)]];
  }
  return out;
}

double largest_eigenvalue(const Matrix& sym, double rel_tol, int max_steps) {
  const Index n = sym.rows();
  if (n != sym.cols() || n < 1) {
    throw std::invalid_argument("largest_eigenvalue: matrix must be square");
  }
  // Deterministic start with uneven entries so it is unlikely to be
  // orthogonal to the dominant eigenvector.
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    v[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
  }
  v /= v.norm();

  double lambda = 0.0;
  for (int step = 0; step < max_steps; ++step) {
    Vector w = sym * v;
    const double norm = w.norm();
    if (norm <= 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / norm;
    if (step > 0 && std::abs(next - lambda) <= rel_tol * std::max(std::abs(next), 1e-300)) {
      return next;
    }
    lambda = next;
  }
  return lambda;
}

double lipschitz_step(const Dictionary& dict) {
  const Matrix& d = dict.atoms();
  // lambda_max(D'D) == lambda_max(DD'); use the smaller Gram matrix.
  Matrix gram;
  if (d.rows() <= d.cols()) {
    gram.noalias() = d * d.transpose();
  } else {
    gram.noalias() = d.transpose() * d;
  }
  const double lmax = largest_eigenvalue(gram);
  if (lmax <= 0.0) {
    throw std::invalid_argument("lipschitz_step: all-zero dictionary");
  }
  return 0.99 / lmax;
}

IhtResult iht_solve(const Vector& y, const Dictionary& dict, int budget,
                    const IhtSettings& settings, const Vector* x0) {
  if (y.size() != dict.signal_dim()) {
    throw std::invalid_argument("iht_solve: signal dimension mismatch");
  }
  if (budget < 1) {
    throw std::invalid_argument("iht_solve: budget must be >= 1");
  }
  if (settings.max_iterations < 1) {
    throw std::invalid_argument("iht_solve: max_iterations must be >= 1");
  }
  if (settings.stop_tolerance < 0.0) {
    throw std::invalid_argument("iht_solve: stop_tolerance must be >= 0");
  }
  double step = 0.0;
  if (settings.step_policy == StepPolicy::kFixed) {
    if (settings.fixed_step <= 0.0) {
      throw std::invalid_argument("iht_solve: fixed step must be positive");
    }
    step = settings.fixed_step;
  } else {
    step = lipschitz_step(dict);
  }

  const Index p = dict.atom_count();
  Vector x;
  if (x0 != nullptr) {
    if (x0->size() != p) {
      throw std::invalid_argument("iht_solve: x0 dimension mismatch");
    }
    x = *x0;
  } else {
    x = Vector::Zero(p);
  }

  const Matrix& d = dict.atoms();
  IhtResult result;
  Vector residual = d * x - y;
  double objective = 0.5 * residual.squaredNorm();
  result.objective_trace.push_back(objective);

  for (int k = 0; k < settings.max_iterations; ++k) {
    const Vector grad = d.transpose() * residual;
    x = hard_threshold(x - step * grad, budget);
    residual.noalias() = d * x - y;
    const double next = 0.5 * residual.squaredNorm();
    result.objective_trace.push_back(next);
    ++result.iterations;
    const double decrease = objective - next;
    if (decrease <= settings.stop_tolerance * std::max(objective, 1e-300)) {
      objective = next;
      break;
    }
    objective = next;
  }

  result.x = std::move(x);
  return result;
}

}  // namespace l0dl
