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

#ifndef L0DL_LP_EXPORT_HPP
#define L0DL_LP_EXPORT_HPP

#include <string>

#include "l0dl/miqp.hpp"

namespace l0dl {

// Emits the instance in CPLEX LP text format so it can be cross-checked with
// an external MIQP solver. The objective is 0.5 x'(D'D)x - (D'y)'x; the
// constant 0.5 y'y cannot be expressed in the format and is noted in a
// comment. With tightening enabled, auxiliary variables u_i >= |x_i| carry
// the l1 row sum(u) <= T*M and x gets explicit bounds |x_i| <= M.
// Output is deterministic: fixed variable naming (x0.., z0.., u0..) and
// fixed float formatting, suitable for byte-exact golden tests.
std::string export_lp(const MiqpProblem& problem, bool with_tightening);

/// export_lp written to a file. Throws std::runtime_error on write failure.
void export_lp_file(const MiqpProblem& problem, bool with_tightening,
                    const std::string& path);

}  // namespace l0dl

#endif  // L0DL_LP_EXPORT_HPP
