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

#ifndef L0DL_PROJECTION_HPP
#define L0DL_PROJECTION_HPP

#include "l0dl/types.hpp"

namespace l0dl {

/// Euclidean projection of w onto { v : |v_i| <= box, sum_i |v_i| <= l1_budget }.
/// Exact: the threshold of the inner l1 projection is solved on the correct
/// breakpoint segment, not approximated. box must be positive; l1_budget >= 0.
Vector project_box_l1(const Vector& w, double box, double l1_budget);

/// Euclidean projection onto the box { |v_i| <= box } alone.
Vector project_box(const Vector& w, double box);

}  // namespace l0dl

#endif  // L0DL_PROJECTION_HPP
