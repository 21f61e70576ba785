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

#ifndef L0DL_ORACLE_HPP
#define L0DL_ORACLE_HPP

#include <vector>

#include "l0dl/types.hpp"

namespace l0dl {

// Brute-force reference for the exact solver. Enumerates every support of
// size <= budget and solves the box-constrained least squares on each support
// exactly by enumerating active sets (each support variable free, at +M, or
// at -M), so the result is correct to machine precision and shares no code
// path with the branch-and-bound solver. Intended for small p only.

struct OracleResult {
  Vector x;
  double objective = 0.0;
  std::vector<int> support;
};

/// Throws std::invalid_argument when the enumeration would exceed roughly
/// 10^7 subproblems.
OracleResult best_subset_oracle(const Vector& y, const Dictionary& dict,
                                int budget, double big_m);

}  // namespace l0dl

#endif  // L0DL_ORACLE_HPP
