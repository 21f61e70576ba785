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

#include "l0dl/miqp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "l0dl/projection.hpp"
#include "l0dl/prox.hpp"

namespace l0dl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// z within this of {0,1} is treated as integral by the search.
constexpr double kIntegralTol = 1e-9;

// Problem data in x-space: f(x) = 0.5 x'Qx - b'x + c with Q = D'D, b = D'y.
struct QuadContext {
  Matrix q;
  Vector b;
  double c = 0.0;
  double lipschitz = 1.0;
  double big_m = 1.0;
  int budget = 0;
  RelaxationMode mode = RelaxationMode::kHull;
};

QuadContext make_context(const MiqpProblem& problem, RelaxationMode mode) {
  QuadContext ctx;
  const Matrix& d = problem.dict().atoms();
  ctx.q.noalias() = d.transpose() * d;
  ctx.b.noalias() = d.transpose() * problem.y();
  ctx.c = 0.5 * problem.y().squaredNorm();
  // Power iteration approaches lambda_max from below; inflate a little so the
  // 1/L gradient step stays safe.
  ctx.lipschitz = std::max(1.05 * largest_eigenvalue(ctx.q, 1e-5, 300), 1e-12);
  ctx.big_m = problem.big_m();
  ctx.budget = problem.budget();
  ctx.mode = mode;
  return ctx;
}

struct NodeSets {
  std::vector<int> free_idx;
  std::vector<int> active_idx;
  int slots = 0;  // T - |S1|, clamped at 0
};

NodeSets node_sets(const QuadContext& ctx, const BnbNode& node) {
  NodeSets sets;
  for (int i = 0; i < static_cast<int>(node.state.size()); ++i) {
    if (node.state[static_cast<std::size_t>(i)] == VarState::kFree) {
      sets.free_idx.push_back(i);
    } else if (node.state[static_cast<std::size_t>(i)] == VarState::kActive) {
      sets.active_idx.push_back(i);
    }
  }
  sets.slots = std::max(0, ctx.budget - static_cast<int>(sets.active_idx.size()));
  return sets;
}

// Projects v onto the node's feasible set, in place. Free coordinates live in
// the box (box mode) or in box intersect scaled-l1 (hull mode); once the
// cardinality budget is exhausted they are fixed to zero in either mode.
void project_node(const QuadContext& ctx, const BnbNode& node,
                  const NodeSets& sets, Vector& v) {
  const double m = ctx.big_m;
  for (int i = 0; i < static_cast<int>(node.state.size()); ++i) {
    if (node.state[static_cast<std::size_t>(i)] == VarState::kZero) v[i] = 0.0;
  }
  for (int i : sets.active_idx) v[i] = std::clamp(v[i], -m, m);
  if (sets.free_idx.empty()) return;
  if (sets.slots == 0) {
    for (int i : sets.free_idx) v[i] = 0.0;
    return;
  }
  if (ctx.mode == RelaxationMode::kBox) {
    for (int i : sets.free_idx) v[i] = std::clamp(v[i], -m, m);
    return;
  }
  Vector sub(static_cast<Index>(sets.free_idx.size()));
  for (std::size_t k = 0; k < sets.free_idx.size(); ++k) {
    sub[static_cast<Index>(k)] = v[sets.free_idx[k]];
  }
  sub = project_box_l1(sub, m, static_cast<double>(sets.slots) * m);
  for (std::size_t k = 0; k < sets.free_idx.size(); ++k) {
    v[sets.free_idx[k]] = sub[static_cast<Index>(k)];
  }
}

// min over the node's feasible set of grad'v, in closed form. Used for the
// Frank-Wolfe gap: f(x) - (grad'x - linmin) is a valid lower bound on the
// relaxation optimum for any feasible x.
double linear_minimum(const QuadContext& ctx, const NodeSets& sets,
                      const Vector& grad) {
  const double m = ctx.big_m;
  double lin = 0.0;
  for (int i : sets.active_idx) lin -= m * std::abs(grad[i]);
  if (sets.free_idx.empty() || sets.slots == 0) return lin;
  if (ctx.mode == RelaxationMode::kBox) {
    for (int i : sets.free_idx) lin -= m * std::abs(grad[i]);
    return lin;
  }
  // hull: the linear minimizer puts |v| = M on the `slots` largest |grad_i|.
  std::vector<double> mags;
  mags.reserve(sets.free_idx.size());
  for (int i : sets.free_idx) mags.push_back(std::abs(grad[i]));
  const std::size_t take = std::min<std::size_t>(
      static_cast<std::size_t>(sets.slots), mags.size());
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(take),
                   mags.end(), std::greater<double>());
  for (std::size_t k = 0; k < take; ++k) lin -= m * mags[k];
  return lin;
}

struct RelaxOutcome {
  Vector x;
  double objective = kInf;
  double bound = -kInf;
  int iterations = 0;
};

// Unconstrained (min-norm) least squares restricted to the index set. The
// value is always a valid node bound; when the point is feasible it is the
// exact relaxation optimum. LDLT first; the min-norm orthogonal solve only
// when the normal equations come back inconsistent (rank-deficient support).
Vector restricted_least_squares(const QuadContext& ctx,
                                const std::vector<int>& support) {
  const Index k = static_cast<Index>(support.size());
  Matrix qss(k, k);
  Vector bs(k);
  for (Index r = 0; r < k; ++r) {
    bs[r] = ctx.b[support[static_cast<std::size_t>(r)]];
    for (Index s = 0; s < k; ++s) {
      qss(r, s) = ctx.q(support[static_cast<std::size_t>(r)],
                        support[static_cast<std::size_t>(s)]);
    }
  }
  Eigen::LDLT<Matrix> ldlt(qss);
  if (ldlt.info() == Eigen::Success) {
    Vector u = ldlt.solve(bs);
    if ((qss * u - bs).lpNorm<Eigen::Infinity>() <=
        1e-10 * (1.0 + bs.lpNorm<Eigen::Infinity>())) {
      return u;
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(qss);
  return cod.solve(bs);
}

double quad_value(const QuadContext& ctx, const Vector& x, Vector* qx_out) {
  Vector qx = ctx.q * x;
  if (qx_out != nullptr) *qx_out = qx;
  return 0.5 * x.dot(qx) - ctx.b.dot(x) + ctx.c;
}

// Accelerated projected gradient on the node relaxation, with adaptive
// restart and Frank-Wolfe stopping. `warm` may be empty. The solve also ends
// as soon as the certified bound clears `prune_target`: past that point the
// node is dead and extra precision is wasted.
RelaxOutcome solve_relaxation(const QuadContext& ctx, const BnbNode& node,
                              const NodeSets& sets, const Vector& warm,
                              double gap_target, int max_iterations,
                              double prune_target = kInf) {
  const Index p = ctx.b.size();
  RelaxOutcome out;

  std::vector<int> support = sets.active_idx;
  if (sets.slots > 0) {
    support.insert(support.end(), sets.free_idx.begin(), sets.free_idx.end());
    std::sort(support.begin(), support.end());
  }
  if (support.empty()) {
    out.x = Vector::Zero(p);
    out.objective = ctx.c;
    out.bound = ctx.c;
    return out;
  }

  // Fast path: the unconstrained least squares value bounds the node from
  // below; if the point is feasible it solves the relaxation outright.
  Vector ls = restricted_least_squares(ctx, support);
  Vector candidate = Vector::Zero(p);
  for (std::size_t k = 0; k < support.size(); ++k) {
    candidate[support[k]] = ls[static_cast<Index>(k)];
  }
  const double ls_value = quad_value(ctx, candidate, nullptr);
  out.bound = ls_value;
  if (out.bound >= prune_target) {
    out.x = std::move(candidate);
    out.objective = kInf;  // point not validated; the bound alone suffices
    return out;
  }

  const double m = ctx.big_m;
  bool feasible = true;
  for (std::size_t k = 0; k < support.size() && feasible; ++k) {
    feasible = std::abs(ls[static_cast<Index>(k)]) <= m * (1.0 + 1e-12);
  }
  if (feasible && ctx.mode == RelaxationMode::kHull && sets.slots > 0) {
    double free_mass = 0.0;
    for (int i : sets.free_idx) free_mass += std::abs(candidate[i]);
    feasible = free_mass <= static_cast<double>(sets.slots) * m * (1.0 + 1e-12);
  }
  if (feasible) {
    out.x = std::move(candidate);
    out.objective = ls_value;
    return out;
  }

  Vector x = (warm.size() == p) ? warm : candidate;
  project_node(ctx, node, sets, x);

  double lipschitz = ctx.lipschitz;
  Vector qx;
  double f_x = quad_value(ctx, x, &qx);
  Vector grad = qx - ctx.b;
  double h = grad.dot(x) - linear_minimum(ctx, sets, grad);
  out.bound = std::max(out.bound, f_x - h);

  Vector x_prev = x;
  Vector y(p);
  Vector grad_y(p);
  Vector x_new(p);
  double t = 1.0;
  int since_check = 0;
  for (int iter = 0;
       iter < max_iterations && h > gap_target && out.bound < prune_target;
       ++iter) {
    ++out.iterations;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    y = x + beta * (x - x_prev);
    grad_y.noalias() = ctx.q * y;
    grad_y -= ctx.b;
    x_new = y - grad_y / lipschitz;
    project_node(ctx, node, sets, x_new);
    double f_new = quad_value(ctx, x_new, &qx);
    if (f_new > f_x) {
      // Momentum overshoot: restart from the plain projected-gradient step,
      // backing the step off if the Lipschitz estimate was optimistic.
      t = 1.0;
      for (int attempt = 0; attempt < 30; ++attempt) {
        x_new = x - grad / lipschitz;
        project_node(ctx, node, sets, x_new);
        f_new = quad_value(ctx, x_new, &qx);
        if (f_new <= f_x) break;
        lipschitz *= 2.0;
      }
      if (f_new > f_x) {
        x_new = x;
        f_new = quad_value(ctx, x_new, &qx);
      }
    } else {
      t = t_next;
    }
    std::swap(x_prev, x);
    std::swap(x, x_new);
    f_x = f_new;
    grad = qx - ctx.b;
    if (++since_check >= 4 || iter + 1 == max_iterations) {
      since_check = 0;
      h = grad.dot(x) - linear_minimum(ctx, sets, grad);
      out.bound = std::max(out.bound, f_x - h);
    }
  }
  if (since_check != 0) {
    h = grad.dot(x) - linear_minimum(ctx, sets, grad);
    out.bound = std::max(out.bound, f_x - h);
  }
  out.x = std::move(x);
  out.objective = f_x;
  return out;
}

// Feasible rounding: support = S1 plus the top-(slots) free magnitudes, then
// box-constrained least squares on that support.
Incumbent round_to_incumbent(const QuadContext& ctx, const NodeSets& sets,
                             const Vector& x_relax) {
  const Index p = ctx.b.size();
  std::vector<int> support = sets.active_idx;
  if (sets.slots > 0 && !sets.free_idx.empty()) {
    std::vector<int> order = sets.free_idx;
    std::stable_sort(order.begin(), order.end(), [&x_relax](int a, int b) {
      const double fa = std::abs(x_relax[a]);
      const double fb = std::abs(x_relax[b]);
      if (fa != fb) return fa > fb;
      return a < b;
    });
    const std::size_t take =
        std::min<std::size_t>(static_cast<std::size_t>(sets.slots), order.size());
    support.insert(support.end(), order.begin(),
                   order.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(support.begin(), support.end());

  Incumbent inc;
  inc.z.assign(static_cast<std::size_t>(p), 0);
  if (support.empty()) {
    inc.x = Vector::Zero(p);
    inc.objective = ctx.c;
    return inc;
  }
  for (int i : support) inc.z[static_cast<std::size_t>(i)] = 1;

  const double m = ctx.big_m;
  Vector ls = restricted_least_squares(ctx, support);
  bool inside = true;
  for (Index k = 0; k < ls.size(); ++k) {
    inside = inside && std::abs(ls[k]) <= m;
  }
  Vector x = Vector::Zero(p);
  for (std::size_t k = 0; k < support.size(); ++k) {
    x[support[k]] = ls[static_cast<Index>(k)];
  }
  if (!inside) {
    // Box-constrained polish on the fixed support: reuse the relaxation
    // machinery with every support coordinate active.
    BnbNode leaf;
    leaf.state.assign(static_cast<std::size_t>(p), VarState::kZero);
    for (int i : support) leaf.state[static_cast<std::size_t>(i)] = VarState::kActive;
    leaf.active_count = static_cast<int>(support.size());
    NodeSets leaf_sets;
    leaf_sets.active_idx = support;
    leaf_sets.slots = 0;
    for (Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], -m, m);
    RelaxOutcome polished =
        solve_relaxation(ctx, leaf, leaf_sets, x, 1e-10, 4000);
    x = std::move(polished.x);
  }
  inc.x = std::move(x);
  inc.objective = quad_value(ctx, inc.x, nullptr);
  return inc;
}

Vector relaxed_z(const QuadContext& ctx, const BnbNode& node, const Vector& x) {
  const Index p = ctx.b.size();
  Vector z = Vector::Zero(p);
  for (Index i = 0; i < p; ++i) {
    switch (node.state[static_cast<std::size_t>(i)]) {
      case VarState::kZero:
        break;
      case VarState::kActive:
        z[i] = 1.0;
        break;
      case VarState::kFree:
        z[i] = std::min(std::abs(x[i]) / ctx.big_m, 1.0);
        break;
    }
  }
  return z;
}

struct NodeOrder {
  // Pop order: smallest bound, then deepest, then most recently created.
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.lower_bound != b.lower_bound) return a.lower_bound > b.lower_bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq < b.seq;
  }
};

}  // namespace

MiqpProblem::MiqpProblem(Vector y, Dictionary dict, int budget, double big_m,
                         std::optional<Vector> warm_x,
                         std::optional<std::vector<std::uint8_t>> warm_z)
    : y_(std::move(y)),
      dict_(std::move(dict)),
      budget_(budget),
      big_m_(big_m),
      warm_x_(std::move(warm_x)),
      warm_z_(std::move(warm_z)) {
  if (y_.size() != dict_.signal_dim()) {
    throw std::invalid_argument("MiqpProblem: signal dimension mismatch");
  }
  if (!y_.allFinite()) {
    throw std::invalid_argument("MiqpProblem: non-finite signal");
  }
  if (budget_ < 1 || budget_ > dict_.atom_count()) {
    throw std::invalid_argument("MiqpProblem: budget must satisfy 1 <= T <= p");
  }
  if (!(big_m_ > 0.0) || !std::isfinite(big_m_)) {
    throw std::invalid_argument("MiqpProblem: big_m must be positive and finite");
  }
  if (warm_z_.has_value() && !warm_x_.has_value()) {
    throw std::invalid_argument("MiqpProblem: warm_z without warm_x");
  }
  if (warm_x_.has_value()) {
    if (warm_x_->size() != dict_.atom_count() || !warm_x_->allFinite()) {
      throw std::invalid_argument("MiqpProblem: bad warm_x");
    }
    if (l0_count(*warm_x_) > budget_) {
      throw std::invalid_argument("MiqpProblem: warm_x exceeds the budget");
    }
    if (warm_x_->lpNorm<Eigen::Infinity>() > big_m_ * (1.0 + 1e-12)) {
      throw std::invalid_argument("MiqpProblem: warm_x outside the big-M box");
    }
    if (!warm_z_.has_value()) {
      std::vector<std::uint8_t> z(static_cast<std::size_t>(warm_x_->size()), 0);
      for (Index i = 0; i < warm_x_->size(); ++i) {
        z[static_cast<std::size_t>(i)] =
            std::abs((*warm_x_)[i]) > kZeroTolerance ? 1 : 0;
      }
      warm_z_ = std::move(z);
    } else if (warm_z_->size() != static_cast<std::size_t>(warm_x_->size())) {
      throw std::invalid_argument("MiqpProblem: warm_z size mismatch");
    }
  }
}

MiqpProblem MiqpProblem::without_warm_start() const {
  return MiqpProblem(y_, dict_, budget_, big_m_);
}

MiqpProblem build_problem(const Vector& y, const Dictionary& dict, int budget,
                          const std::optional<Vector>& warm_x, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("build_problem: alpha must be positive");
  }
  double big_m = 0.0;
  if (warm_x.has_value() && warm_x->lpNorm<Eigen::Infinity>() > 0.0) {
    big_m = (1.0 + alpha) * warm_x->lpNorm<Eigen::Infinity>();
  } else {
    big_m = (1.0 + alpha) * (dict.atoms().transpose() * y).lpNorm<Eigen::Infinity>();
    if (big_m <= 0.0) {
      // y is orthogonal to the dictionary range; x = 0 is optimal on every
      // support so any positive box works.
      big_m = 1.0;
    }
  }
  return MiqpProblem(y, dict, budget, big_m, warm_x);
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kGapLimit: return "gap-limit";
    case SolveStatus::kNodeLimit: return "node-limit";
    case SolveStatus::kTimeLimit: return "time-limit";
  }
  return "unknown";
}

std::vector<int> BnbNode::forced_zero() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(state.size()); ++i) {
    if (state[static_cast<std::size_t>(i)] == VarState::kZero) out.push_back(i);
  }
  return out;
}

std::vector<int> BnbNode::forced_active() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(state.size()); ++i) {
    if (state[static_cast<std::size_t>(i)] == VarState::kActive) out.push_back(i);
  }
  return out;
}

Relaxation node_relaxation(const MiqpProblem& problem, const BnbNode& node,
                           RelaxationMode mode) {
  if (node.state.size() != static_cast<std::size_t>(problem.dict().atom_count())) {
    throw std::invalid_argument("node_relaxation: node size mismatch");
  }
  const QuadContext ctx = make_context(problem, mode);
  Relaxation rel;
  const NodeSets sets = node_sets(ctx, node);
  if (static_cast<int>(sets.active_idx.size()) > ctx.budget) {
    rel.infeasible = true;
    rel.bound = kInf;
    rel.x = Vector::Zero(ctx.b.size());
    rel.z = Vector::Zero(ctx.b.size());
    return rel;
  }
  RelaxOutcome outcome = solve_relaxation(
      ctx, node, sets, node.relaxation_x, 0.25 * 1e-6,
      400 + 2 * static_cast<int>(ctx.b.size()));
  rel.x = std::move(outcome.x);
  rel.z = relaxed_z(ctx, node, rel.x);
  rel.bound = outcome.bound;
  rel.iterations = outcome.iterations;
  return rel;
}

Incumbent extract_incumbent(const MiqpProblem& problem, const BnbNode& node,
                            const Vector& x_relax) {
  const QuadContext ctx = make_context(problem, RelaxationMode::kHull);
  const NodeSets sets = node_sets(ctx, node);
  return round_to_incumbent(ctx, sets, x_relax);
}

std::pair<BnbNode, BnbNode> branch_node(const BnbNode& node,
                                        const Vector& x_relax,
                                        const Vector& z_relax) {
  int pick = -1;
  double best_score = 0.0;
  double best_mag = -1.0;
  for (int i = 0; i < static_cast<int>(node.state.size()); ++i) {
    if (node.state[static_cast<std::size_t>(i)] != VarState::kFree) continue;
    const double z = z_relax[i];
    const double score = z * (1.0 - z);
    const double mag = std::abs(x_relax[i]);
    if (score > best_score || (score == best_score && score > 0.0 && mag > best_mag)) {
      pick = i;
      best_score = score;
      best_mag = mag;
    }
  }
  if (pick < 0) {
    throw std::logic_error("branch_node: node is integral");
  }
  BnbNode child_zero = node;
  child_zero.state[static_cast<std::size_t>(pick)] = VarState::kZero;
  child_zero.depth = node.depth + 1;
  if (child_zero.relaxation_x.size() > 0) child_zero.relaxation_x[pick] = 0.0;
  BnbNode child_one = node;
  child_one.state[static_cast<std::size_t>(pick)] = VarState::kActive;
  child_one.active_count = node.active_count + 1;
  child_one.depth = node.depth + 1;
  return {std::move(child_zero), std::move(child_one)};
}

MiqpSolution solve_miqp(const MiqpProblem& problem, const SolverLimits& limits,
                        const SolveOptions& options) {
  if (!(limits.time_limit_seconds > 0.0) || limits.node_limit < 1 ||
      !(limits.gap_tolerance > 0.0) || limits.relative_gap_limit < 0.0) {
    throw std::invalid_argument("solve_miqp: invalid limits");
  }
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&started]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         started)
        .count();
  };

  const QuadContext ctx = make_context(problem, options.relaxation);
  const int p = static_cast<int>(problem.dict().atom_count());

  MiqpSolution solution;
  solution.x = Vector::Zero(p);
  solution.z.assign(static_cast<std::size_t>(p), 0);

  double best_upper = kInf;
  auto consider = [&](Incumbent&& inc) {
    if (inc.objective < best_upper) {
      best_upper = inc.objective;
      solution.x = std::move(inc.x);
      solution.z = std::move(inc.z);
    }
  };

  if (problem.warm_x().has_value()) {
    // Polish the warm start with a support least squares; the result can only
    // improve on f(warm_x), preserving warm-start dominance.
    BnbNode warm_node = BnbNode::root(p);
    NodeSets warm_sets = node_sets(ctx, warm_node);
    consider(round_to_incumbent(ctx, warm_sets, *problem.warm_x()));
    const double warm_value = quad_value(ctx, *problem.warm_x(), nullptr);
    if (warm_value < best_upper) {
      Incumbent raw;
      raw.x = *problem.warm_x();
      raw.z = *problem.warm_z();
      raw.objective = warm_value;
      consider(std::move(raw));
    }
  }

  auto prune_slack = [&]() {
    double slack = limits.gap_tolerance;
    if (limits.relative_gap_limit > 0.0 && std::isfinite(best_upper)) {
      slack = std::max(slack,
                       limits.relative_gap_limit * (1.0 + std::abs(best_upper)));
    }
    return slack;
  };

  double proof_lower = kInf;  // min bound over nodes pruned by bound
  std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
  std::uint64_t next_seq = 0;

  auto admit = [&](BnbNode&& node, double parent_bound) {
    if (node.active_count > ctx.budget) return;  // pruned by infeasibility
    const double slack = prune_slack();
    if (parent_bound >= best_upper - slack) {
      // The inherited bound already kills the child; skip the relaxation.
      proof_lower = std::min(proof_lower, parent_bound);
      return;
    }
    NodeSets sets = node_sets(ctx, node);
    const double h_target =
        std::max(1e-12, 0.25 * (std::isfinite(best_upper)
                                    ? slack
                                    : limits.gap_tolerance));
    const double prune_target =
        std::isfinite(best_upper) ? best_upper - slack : kInf;
    RelaxOutcome outcome =
        solve_relaxation(ctx, node, sets, node.relaxation_x, h_target,
                         400 + 2 * p, prune_target);
    ++solution.stats.relaxations_solved;
    node.lower_bound = std::max(outcome.bound, parent_bound);
    node.relaxation_x = std::move(outcome.x);
    consider(round_to_incumbent(ctx, sets, node.relaxation_x));
    if (node.lower_bound >= best_upper - prune_slack()) {
      proof_lower = std::min(proof_lower, node.lower_bound);
      return;
    }
    node.seq = next_seq++;
    open.push(std::move(node));
  };

  admit(BnbNode::root(p), -kInf);

  bool stopped_on_nodes = false;
  bool stopped_on_time = false;
  double open_floor = kInf;  // valid lower bound for everything left open

  while (!open.empty()) {
    if (solution.stats.nodes_explored >= limits.node_limit) {
      stopped_on_nodes = true;
      open_floor = open.top().lower_bound;
      break;
    }
    if (elapsed() > limits.time_limit_seconds) {
      stopped_on_time = true;
      open_floor = open.top().lower_bound;
      break;
    }
    BnbNode node = open.top();
    open.pop();
    ++solution.stats.nodes_explored;
    if (options.trace_bounds) {
      solution.stats.bound_trace.push_back(std::min(proof_lower, node.lower_bound));
    }
    if (node.lower_bound >= best_upper - prune_slack()) {
      // Best-first: every remaining open node is at least as high.
      proof_lower = std::min(proof_lower, node.lower_bound);
      break;
    }

    const Vector z = relaxed_z(ctx, node, node.relaxation_x);
    int pick = -1;
    double best_score = kIntegralTol;
    double best_mag = -1.0;
    int over_one = 0;
    for (int i = 0; i < p; ++i) {
      if (node.state[static_cast<std::size_t>(i)] != VarState::kFree) continue;
      const double score = z[i] * (1.0 - z[i]);
      const double mag = std::abs(node.relaxation_x[i]);
      if (z[i] >= 1.0 - kIntegralTol) ++over_one;
      if (score > best_score || (score > kIntegralTol && score == best_score &&
                                 mag > best_mag)) {
        pick = i;
        best_score = score;
        best_mag = mag;
      }
    }
    if (pick < 0 && over_one > ctx.budget - node.active_count) {
      // Box-mode corner: integral z but more saturated coordinates than the
      // budget admits. Split on the largest saturated magnitude.
      for (int i = 0; i < p; ++i) {
        if (node.state[static_cast<std::size_t>(i)] != VarState::kFree) continue;
        const double mag = std::abs(node.relaxation_x[i]);
        if (z[i] >= 1.0 - kIntegralTol && mag > best_mag) {
          pick = i;
          best_mag = mag;
        }
      }
    }
    if (pick < 0) {
      // Integral relaxation; its incumbent was already absorbed at creation.
      proof_lower = std::min(proof_lower, node.lower_bound);
      continue;
    }

    BnbNode child_zero = node;
    child_zero.state[static_cast<std::size_t>(pick)] = VarState::kZero;
    child_zero.depth = node.depth + 1;
    child_zero.relaxation_x[pick] = 0.0;
    BnbNode child_one = std::move(node);
    child_one.state[static_cast<std::size_t>(pick)] = VarState::kActive;
    child_one.active_count += 1;
    child_one.depth += 1;
    const double parent_bound = child_one.lower_bound;
    admit(std::move(child_zero), parent_bound);
    admit(std::move(child_one), parent_bound);
  }

  if (!open.empty() && !stopped_on_nodes && !stopped_on_time) {
    // Drained by the best-first prune break; the popped bound already floors
    // the rest of the queue via proof_lower.
    open_floor = proof_lower;
  }
  double lower = std::min(std::min(proof_lower, open_floor), best_upper);
  solution.objective = best_upper;
  solution.gap = std::isfinite(best_upper) ? std::max(0.0, best_upper - lower) : kInf;
  solution.stats.wall_seconds = elapsed();
  solution.stats.box_truncated =
      solution.x.size() > 0 &&
      solution.x.lpNorm<Eigen::Infinity>() >= problem.big_m() - 1e-6;

  if (solution.gap <= limits.gap_tolerance) {
    solution.status = SolveStatus::kOptimal;
  } else if (limits.relative_gap_limit > 0.0 && std::isfinite(best_upper) &&
             solution.gap <=
                 limits.relative_gap_limit * (1.0 + std::abs(best_upper))) {
    solution.status = SolveStatus::kGapLimit;
  } else if (stopped_on_nodes) {
    solution.status = SolveStatus::kNodeLimit;
  } else if (stopped_on_time) {
    solution.status = SolveStatus::kTimeLimit;
  } else {
    solution.status = SolveStatus::kGapLimit;
  }
  return solution;
}

}  // namespace l0dl
