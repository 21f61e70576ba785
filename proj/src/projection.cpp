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

#include "l0dl/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace l0dl {

namespace {

// sum_i clip(a_i - theta, 0, box) for nonnegative a.
double knapsack_mass(const std::vector<double>& a, double box, double theta) {
  double total = 0.0;
  for (double v : a) {
    total += std::clamp(v - theta, 0.0, box);
  }
  return total;
}

}  // namespace

Vector project_box(const Vector& w, double box) {
  if (!(box > 0.0) || !std::isfinite(box)) {
    throw std::invalid_argument("project_box: box must be positive and finite");
  }
  return w.cwiseMax(-box).cwiseMin(box);
}

Vector project_box_l1(const Vector& w, double box, double l1_budget) {
  if (!(box > 0.0) || !std::isfinite(box)) {
    throw std::invalid_argument("project_box_l1: box must be positive and finite");
  }
  if (l1_budget < 0.0 || !std::isfinite(l1_budget)) {
    throw std::invalid_argument("project_box_l1: l1_budget must be >= 0 and finite");
  }
  const Index p = w.size();
  if (l1_budget == 0.0) return Vector::Zero(p);

  std::vector<double> a(static_cast<std::size_t>(p));
  double clipped_mass = 0.0;
  for (Index i = 0; i < p; ++i) {
    a[static_cast<std::size_t>(i)] = std::abs(w[i]);
    clipped_mass += std::min(a[static_cast<std::size_t>(i)], box);
  }
  double theta = 0.0;
  if (clipped_mass > l1_budget) {
    // The l1 multiplier theta solves sum clip(a_i - theta, 0, box) = budget,
    // a continuous, piecewise-linear, nonincreasing function of theta. Locate
    // the breakpoint segment that brackets the budget, then solve the linear
    // equation on that segment exactly.
    std::vector<double> breakpoints;
    breakpoints.reserve(a.size() * 2);
    for (double v : a) {
      if (v > 0.0) breakpoints.push_back(v);
      if (v - box > 0.0) breakpoints.push_back(v - box);
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                      breakpoints.end());

    // Smallest breakpoint with mass(theta) <= budget.
    std::size_t lo = 0;
    std::size_t hi = breakpoints.size() - 1;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (knapsack_mass(a, box, breakpoints[mid]) <= l1_budget) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    const double seg_hi = breakpoints[lo];
    const double seg_lo = (lo == 0) ? 0.0 : breakpoints[lo - 1];

    // Within (seg_lo, seg_hi) the active sets are fixed.
    int linear_count = 0;
    int capped_count = 0;
    double linear_sum = 0.0;
    for (double v : a) {
      if (v - box >= seg_hi) {
        ++capped_count;
      } else if (v >= seg_hi) {
        ++linear_count;
        linear_sum += v;
      }
    }
    if (linear_count == 0) {
      theta = seg_hi;  // mass is constant on the segment and hits the budget at seg_hi
    } else {
      theta = (capped_count * box + linear_sum - l1_budget) / linear_count;
      theta = std::clamp(theta, seg_lo, seg_hi);
    }
  }

  Vector out(p);
  for (Index i = 0; i < p; ++i) {
    const double mag = std::clamp(a[static_cast<std::size_t>(i)] - theta, 0.0, box);
    out[i] = std::copysign(mag, w[i]);
  }
  return out;
}

}  // namespace l0dl
