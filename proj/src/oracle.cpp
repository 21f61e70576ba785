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

#include "l0dl/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace l0dl {

namespace {

// Exact box-constrained least squares min 0.5||y - D_S u||^2, |u_i| <= M, by
// enumerating every active-set pattern: each support variable is either free,
// pinned at +M, or pinned at -M. The optimum satisfies one of these patterns
// with the free block solved by (min-norm) least squares, so the best
// feasible candidate over all 3^|S| patterns is the exact optimum.
double box_least_squares(const Vector& y, const Matrix& d_support, double big_m,
                         Vector& best_u) {
  const Index k = d_support.cols();
  best_u = Vector::Zero(k);
  double best = 0.5 * y.squaredNorm();  // all-zero fallback, always feasible
  if (k == 0) return best;

  std::vector<int> pattern(static_cast<std::size_t>(k), 0);  // 0 free, 1 +M, 2 -M
  const long total = static_cast<long>(std::pow(3.0, static_cast<double>(k)));
  for (long code = 0; code < total; ++code) {
    long rest = code;
    for (Index i = 0; i < k; ++i) {
      pattern[static_cast<std::size_t>(i)] = static_cast<int>(rest % 3);
      rest /= 3;
    }
    Vector u = Vector::Zero(k);
    Vector residual_rhs = y;
    std::vector<Index> free_idx;
    for (Index i = 0; i < k; ++i) {
      if (pattern[static_cast<std::size_t>(i)] == 1) {
        u[i] = big_m;
        residual_rhs -= big_m * d_support.col(i);
      } else if (pattern[static_cast<std::size_t>(i)] == 2) {
        u[i] = -big_m;
        residual_rhs += big_m * d_support.col(i);
      } else {
        free_idx.push_back(i);
      }
    }
    if (!free_idx.empty()) {
      Matrix d_free(d_support.rows(), static_cast<Index>(free_idx.size()));
      for (std::size_t c = 0; c < free_idx.size(); ++c) {
        d_free.col(static_cast<Index>(c)) = d_support.col(free_idx[c]);
      }
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(d_free);
      Vector u_free = cod.solve(residual_rhs);
      bool feasible = true;
      for (Index c = 0; c < u_free.size(); ++c) {
        feasible = feasible && std::abs(u_free[c]) <= big_m;
      }
      if (!feasible) continue;
      for (std::size_t c = 0; c < free_idx.size(); ++c) {
        u[free_idx[c]] = u_free[static_cast<Index>(c)];
      }
    }
    const double value = 0.5 * (y - d_support * u).squaredNorm();
    if (value < best) {
      best = value;
      best_u = u;
    }
  }
  return best;
}

void enumerate_supports(int p, int budget, std::vector<int>& current, int start,
                        const std::function<void(const std::vector<int>&)>& visit) {
  visit(current);
  if (static_cast<int>(current.size()) == budget) return;
  for (int i = start; i < p; ++i) {
    current.push_back(i);
    enumerate_supports(p, budget, current, i + 1, visit);
    current.pop_back();
  }
}

double binomial_total(int p, int budget) {
  double total = 0.0;
  double c = 1.0;
  total += c;  // empty support
  for (int k = 1; k <= budget; ++k) {
    c = c * static_cast<double>(p - k + 1) / static_cast<double>(k);
    total += c * std::pow(3.0, k);
  }
  return total;
}

}  // namespace

OracleResult best_subset_oracle(const Vector& y, const Dictionary& dict,
                                int budget, double big_m) {
  const int p = static_cast<int>(dict.atom_count());
  if (y.size() != dict.signal_dim()) {
    throw std::invalid_argument("best_subset_oracle: dimension mismatch");
  }
  if (budget < 1 || budget > p) {
    throw std::invalid_argument("best_subset_oracle: bad budget");
  }
  if (!(big_m > 0.0)) {
    throw std::invalid_argument("best_subset_oracle: big_m must be positive");
  }
  if (binomial_total(p, budget) > 1e7) {
    throw std::invalid_argument("best_subset_oracle: instance too large to enumerate");
  }

  OracleResult result;
  result.x = Vector::Zero(p);
  result.objective = 0.5 * y.squaredNorm();

  const Matrix& d = dict.atoms();
  std::vector<int> current;
  enumerate_supports(p, budget, current, 0, [&](const std::vector<int>& support) {
    if (support.empty()) return;  // the all-zero candidate seeds `result`
    Matrix d_support(d.rows(), static_cast<Index>(support.size()));
    for (std::size_t c = 0; c < support.size(); ++c) {
      d_support.col(static_cast<Index>(c)) = d.col(support[c]);
    }
    Vector u;
    const double value = box_least_squares(y, d_support, big_m, u);
    if (value < result.objective) {
      result.objective = value;
      result.x.setZero();
      for (std::size_t c = 0; c < support.size(); ++c) {
        result.x[support[c]] = u[static_cast<Index>(c)];
      }
      result.support = support;
    }
  });
  return result;
}

}  // namespace l0dl
