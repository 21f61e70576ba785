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

#include "l0dl/types.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace l0dl {

Dictionary::Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {
  if (atoms_.rows() < 1 || atoms_.cols() < 1) {
    throw std::invalid_argument("Dictionary: needs at least one row and one column");
  }
  if (!atoms_.allFinite()) {
    throw std::invalid_argument("Dictionary: non-finite entries");
  }
  for (Index j = 0; j < atoms_.cols(); ++j) {
    if (atoms_.col(j).squaredNorm() > 1.0 + kUnitBallSlack) {
      throw std::invalid_argument("Dictionary: column outside the unit ball");
    }
  }
}

SignalBatch::SignalBatch(Matrix signals, std::string source_id)
    : signals_(std::move(signals)), source_id_(std::move(source_id)) {
  if (signals_.rows() < 1 || signals_.cols() < 1) {
    throw std::invalid_argument("SignalBatch: empty batch");
  }
  if (!signals_.allFinite()) {
    throw std::invalid_argument("SignalBatch: non-finite entries");
  }
}

SparseCode::SparseCode(Matrix codes, int budget, double zero_tolerance)
    : codes_(std::move(codes)), budget_(budget), zero_tolerance_(zero_tolerance) {
  if (budget_ < 1) {
    throw std::invalid_argument("SparseCode: budget must be positive");
  }
  if (zero_tolerance_ <= 0.0) {
    throw std::invalid_argument("SparseCode: zero_tolerance must be positive");
  }
  if (!codes_.allFinite()) {
    throw std::invalid_argument("SparseCode: non-finite entries");
  }
  for (Index i = 0; i < codes_.cols(); ++i) {
    if (l0_count(codes_.col(i), zero_tolerance_) > budget_) {
      throw std::invalid_argument("SparseCode: column exceeds the sparsity budget");
    }
  }
}

Dictionary project_dictionary(const Matrix& raw) {
  if (!raw.allFinite()) {
    throw std::invalid_argument("project_dictionary: non-finite entries");
  }
  Matrix atoms = raw;
  for (Index j = 0; j < atoms.cols(); ++j) {
    const double norm = atoms.col(j).norm();
    if (norm > 1.0) {
      atoms.col(j) /= norm;
    }
  }
  return Dictionary(std::move(atoms));
}

double half_squared_residual(const Vector& y, const Dictionary& dict,
                             const Vector& x) {
  if (y.size() != dict.signal_dim() || x.size() != dict.atom_count()) {
    throw std::invalid_argument("half_squared_residual: dimension mismatch");
  }
  return 0.5 * (y - dict.atoms() * x).squaredNorm();
}

int l0_count(const Vector& x, double zero_tolerance) {
  if (zero_tolerance < 0.0) {
    throw std::invalid_argument("l0_count: zero_tolerance must be >= 0");
  }
  int count = 0;
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > zero_tolerance) ++count;
  }
  return count;
}

}  // namespace l0dl
