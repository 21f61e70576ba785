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

#ifndef L0DL_MIQP_HPP
#define L0DL_MIQP_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "l0dl/types.hpp"

namespace l0dl {

// Exact solver for the big-M form of T-sparse least squares:
//
//   min 0.5 ||y - D x||^2   s.t.  -M z <= x <= M z,  sum(z) <= T,  z binary,
//
// by best-first branch and bound on z. Nodes fix index sets to zero / active;
// the continuous relaxation at a node is solved in x-space (z projected out)
// by accelerated projected gradient, and every node bound carries a
// Frank-Wolfe-gap certificate so it stays a valid lower bound no matter how
// early the inner solver stopped.

/// One sparse-coding instance. Immutable after construction.
class MiqpProblem {
 public:
  MiqpProblem(Vector y, Dictionary dict, int budget, double big_m,
              std::optional<Vector> warm_x = std::nullopt,
              std::optional<std::vector<std::uint8_t>> warm_z = std::nullopt);

  const Vector& y() const { return y_; }
  const Dictionary& dict() const { return dict_; }
  int budget() const { return budget_; }
  double big_m() const { return big_m_; }
  const std::optional<Vector>& warm_x() const { return warm_x_; }
  const std::optional<std::vector<std::uint8_t>>& warm_z() const {
    return warm_z_;
  }

  /// Same instance with the warm-start data stripped (cold incumbent = +inf).
  MiqpProblem without_warm_start() const;

 private:
  Vector y_;
  Dictionary dict_;
  int budget_;
  double big_m_;
  std::optional<Vector> warm_x_;
  std::optional<std::vector<std::uint8_t>> warm_z_;
};

/// Builds a problem with M = (1 + alpha) * ||warm_x||_inf when a nonzero warm
/// start is given, falling back to (1 + alpha) * ||D'y||_inf otherwise. warm_z
/// is derived from warm_x with threshold kZeroTolerance.
MiqpProblem build_problem(const Vector& y, const Dictionary& dict, int budget,
                          const std::optional<Vector>& warm_x, double alpha);

enum class RelaxationMode {
  kHull,  // per-node box intersect scaled-l1 budget on free coordinates
  kBox,   // big-M box only; the cardinality budget acts through branching
};

enum class SolveStatus { kOptimal, kGapLimit, kNodeLimit, kTimeLimit };

const char* to_string(SolveStatus status);

struct SolverLimits {
  double time_limit_seconds = 50.0;
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  double gap_tolerance = 1e-6;     // absolute optimality proof tolerance
  double relative_gap_limit = 0.0;  // early stop at gap <= r*(1+|upper|); 0 = off
};

struct SolveOptions {
  RelaxationMode relaxation = RelaxationMode::kHull;
  bool trace_bounds = false;  // record the global lower bound at each pop
};

struct SolveStats {
  std::int64_t nodes_explored = 0;
  std::int64_t relaxations_solved = 0;
  double wall_seconds = 0.0;
  bool box_truncated = false;  // ||x||_inf within 1e-6 of big_m at the optimum
  std::vector<double> bound_trace;
};

struct MiqpSolution {
  Vector x;
  std::vector<std::uint8_t> z;
  double objective = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::kTimeLimit;
  SolveStats stats;
};

enum class VarState : std::uint8_t { kFree = 0, kZero = 1, kActive = 2 };

/// A branch-and-bound subproblem: per-variable fixing state plus the cached
/// relaxation point used to warm-start the children.
struct BnbNode {
  std::vector<VarState> state;
  int active_count = 0;  // |S1|
  int depth = 0;
  std::uint64_t seq = 0;  // creation order; deterministic tie-break
  double lower_bound = -std::numeric_limits<double>::infinity();
  Vector relaxation_x;

  static BnbNode root(int p) {
    BnbNode node;
    node.state.assign(static_cast<std::size_t>(p), VarState::kFree);
    return node;
  }

  std::vector<int> forced_zero() const;
  std::vector<int> forced_active() const;
};

struct Relaxation {
  Vector x;
  Vector z;  // z_i = min(|x_i|/M, 1) on free, 1 on S1, 0 on S0
  double bound = -std::numeric_limits<double>::infinity();
  bool infeasible = false;  // |S1| > T: pruned by infeasibility
  int iterations = 0;
};

/// Solves the node's continuous relaxation. In hull mode the feasible set is
/// x_{S0} = 0, |x_i| <= M, sum over free of |x_i| <= (T - |S1|) M; box mode
/// drops the l1 budget. The returned bound is certified valid.
Relaxation node_relaxation(const MiqpProblem& problem, const BnbNode& node,
                           RelaxationMode mode = RelaxationMode::kHull);

struct Incumbent {
  Vector x;
  std::vector<std::uint8_t> z;
  double objective = std::numeric_limits<double>::infinity();
};

/// Rounds a relaxation point to a feasible incumbent: support = S1 plus the
/// (T - |S1|) largest-magnitude free coordinates (lower index on ties), then
/// box-constrained least squares on that support.
Incumbent extract_incumbent(const MiqpProblem& problem, const BnbNode& node,
                            const Vector& x_relax);

/// Splits on the free index maximizing z(1-z), ties by larger |x_relax|, then
/// lower index. Throws std::logic_error when every free coordinate is
/// integral.
std::pair<BnbNode, BnbNode> branch_node(const BnbNode& node,
                                        const Vector& x_relax,
                                        const Vector& z_relax);

MiqpSolution solve_miqp(const MiqpProblem& problem,
                        const SolverLimits& limits = {},
                        const SolveOptions& options = {});

}  // namespace l0dl

#endif  // L0DL_MIQP_HPP
