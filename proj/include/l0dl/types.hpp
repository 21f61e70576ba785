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

#ifndef L0DL_TYPES_HPP
#define L0DL_TYPES_HPP

#include <Eigen/Core>
#include <string>

namespace l0dl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Entries with magnitude <= kZeroTolerance count as zero when measuring
// sparsity. The exact solver returns hard zeros; the iterative paths leave
// tiny residual magnitudes behind, so l0 counting uses this fixed absolute
// tolerance to stay deterministic.
inline constexpr double kZeroTolerance = 1e-8;

// Slack allowed on the unit-ball invariant d_j'd_j <= 1.
inline constexpr double kUnitBallSlack = 1e-9;

/// A dictionary of p atoms (columns) in R^n, every column inside the unit
/// Euclidean ball. Immutable after construction.
class Dictionary {
 public:
  explicit Dictionary(Matrix atoms);

  Index signal_dim() const { return atoms_.rows(); }
  Index atom_count() const { return atoms_.cols(); }
  const Matrix& atoms() const { return atoms_; }

 private:
  Matrix atoms_;
};

/// A batch of column signals y_1..y_l, optionally tagged with its origin.
class SignalBatch {
 public:
  explicit SignalBatch(Matrix signals, std::string source_id = {});

  Index signal_dim() const { return signals_.rows(); }
  Index column_count() const { return signals_.cols(); }
  const Matrix& signals() const { return signals_; }
  const std::string& source_id() const { return source_id_; }

 private:
  Matrix signals_;
  std::string source_id_;
};

/// Sparse codes: a p x l matrix with at most `budget` entries of magnitude
/// above `zero_tolerance` per column.
class SparseCode {
 public:
  SparseCode(Matrix codes, int budget, double zero_tolerance = kZeroTolerance);

  Index atom_count() const { return codes_.rows(); }
  Index column_count() const { return codes_.cols(); }
  const Matrix& codes() const { return codes_; }
  int budget() const { return budget_; }
  double zero_tolerance() const { return zero_tolerance_; }

 private:
  Matrix codes_;
  int budget_;
  double zero_tolerance_;
};

/// Scales every column with norm > 1 back to norm exactly 1; columns already
/// inside the ball (including zero columns) are left untouched.
Dictionary project_dictionary(const Matrix& raw);

/// 0.5 * ||y - D x||_2^2.
double half_squared_residual(const Vector& y, const Dictionary& dict,
                             const Vector& x);

/// Number of entries with |x_i| strictly greater than zero_tolerance.
int l0_count(const Vector& x, double zero_tolerance = kZeroTolerance);

}  // namespace l0dl

#endif  // L0DL_TYPES_HPP
