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

#include <doctest.h>

#include <cmath>

#include "l0dl/projection.hpp"
#include "test_support.hpp"

using namespace l0dl;

namespace {

// Slow reference: bisect the l1 multiplier instead of solving the breakpoint
// segment. Independent of the production code path.
Vector bisection_reference(const Vector& w, double box, double budget) {
  const Index p = w.size();
  Vector a = w.cwiseAbs();
  auto mass = [&](double theta) {
    double total = 0.0;
    for (Index i = 0; i < p; ++i) {
      total += std::clamp(a[i] - theta, 0.0, box);
    }
    return total;
  };
  double theta = 0.0;
  if (mass(0.0) > budget) {
    double lo = 0.0;
    double hi = a.maxCoeff();
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mass(mid) > budget) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    theta = 0.5 * (lo + hi);
  }
  Vector out(p);
  for (Index i = 0; i < p; ++i) {
    out[i] = std::copysign(std::clamp(a[i] - theta, 0.0, box), w[i]);
  }
  return out;
}

bool feasible(const Vector& v, double box, double budget) {
  return v.lpNorm<Eigen::Infinity>() <= box * (1.0 + 1e-12) &&
         v.lpNorm<1>() <= budget * (1.0 + 1e-12) + 1e-12;
}

}  // namespace

TEST_CASE("project_box clamps coordinatewise") {
  Vector w(3);
  w << 4.0, -0.5, -7.0;
  Vector expected(3);
  expected << 2.0, -0.5, -2.0;
  CHECK(project_box(w, 2.0) == expected);
}

TEST_CASE("project_box_l1 is the identity inside the set") {
  Vector w(3);
  w << 0.5, -0.25, 0.1;
  CHECK(project_box_l1(w, 1.0, 2.0) == w);
}

TEST_CASE("project_box_l1 with a zero budget returns zero") {
  Vector w(4);
  w << 1.0, 2.0, -3.0, 0.5;
  CHECK(project_box_l1(w, 1.0, 0.0).isZero(0.0));
}

TEST_CASE("project_box_l1 hand-checked simplex case") {
  // Box inactive: reduces to the classic l1-ball projection.
  Vector w(2);
  w << 2.0, 1.0;
  const Vector v = project_box_l1(w, 10.0, 1.0);
  CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("project_box_l1 with the cap active") {
  // Without the box both coordinates would exceed 1; the box caps them and
  // the l1 row distributes the rest.
  Vector w(3);
  w << 5.0, 4.0, 0.2;
  const Vector v = project_box_l1(w, 1.0, 2.0);
  CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("project_box_l1 agrees with the bisection reference") {
  SeededRng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Index p = 1 + static_cast<Index>(rng.next_index(12));
    const Vector w = 4.0 * testing::random_vector(rng, p);
    const double box = 0.2 + 2.0 * rng.uniform01();
    const double slots = 1.0 + static_cast<double>(rng.next_index(4));
    const double budget = slots * box;
    const Vector fast = project_box_l1(w, box, budget);
    const Vector slow = bisection_reference(w, box, budget);
    CHECK(feasible(fast, box, budget));
    CHECK((fast - slow).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("project_box_l1 satisfies the variational inequality") {
  // (w - P(w))'(v - P(w)) <= 0 for every feasible v characterizes the
  // Euclidean projection onto a convex set.
  SeededRng rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const Index p = 2 + static_cast<Index>(rng.next_index(8));
    const Vector w = 5.0 * testing::random_vector(rng, p);
    const double box = 0.5 + rng.uniform01();
    const double budget = box * (1.0 + static_cast<double>(rng.next_index(3)));
    const Vector proj = project_box_l1(w, box, budget);
    REQUIRE(feasible(proj, box, budget));
    for (int probe = 0; probe < 20; ++probe) {
      Vector v = testing::random_vector(rng, p);
      v = project_box_l1(v, box, budget);  // feasible probe point
      CHECK((w - proj).dot(v - proj) <= 1e-9);
    }
  }
}
