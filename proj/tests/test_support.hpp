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

#ifndef L0DL_TESTS_TEST_SUPPORT_HPP
#define L0DL_TESTS_TEST_SUPPORT_HPP

#include <cmath>
#include <cstdint>

#include "l0dl/rng.hpp"
#include "l0dl/types.hpp"

namespace l0dl::testing {

inline Matrix random_matrix(SeededRng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

inline Vector random_vector(SeededRng& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

inline Dictionary random_dictionary(SeededRng& rng, Index n, Index p) {
  return project_dictionary(random_matrix(rng, n, p));
}

// A y that is a noisy sparse combination of dictionary atoms; planted
// structure makes the exact-solver instances less degenerate than pure noise.
inline Vector planted_signal(SeededRng& rng, const Dictionary& dict, int nnz,
                             double noise) {
  Vector y = Vector::Zero(dict.signal_dim());
  for (int k = 0; k < nnz; ++k) {
    const Index atom =
        static_cast<Index>(rng.next_index(static_cast<std::uint64_t>(dict.atom_count())));
    y += (2.0 * rng.uniform01() - 1.0) * 3.0 * dict.atoms().col(atom);
  }
  for (Index i = 0; i < y.size(); ++i) y[i] += noise * rng.normal();
  return y;
}

// Deterministic 8-bit test scene: smooth waves, blocky steps, and a diagonal
// ramp, quantized to integers so PGM round trips are exact.
inline Matrix synthetic_scene(Index height, Index width) {
  Matrix img(height, width);
  for (Index r = 0; r < height; ++r) {
    for (Index c = 0; c < width; ++c) {
      double v = 110.0;
      v += 55.0 * std::sin(2.0 * M_PI * static_cast<double>(r) / 37.0) *
           std::cos(2.0 * M_PI * static_cast<double>(c) / 29.0);
      v += ((r / 16 + c / 16) % 2 == 0) ? 28.0 : -28.0;
      v += 0.15 * static_cast<double>(r + c);
      const double dr = static_cast<double>(r) - static_cast<double>(height) / 3.0;
      const double dc = static_cast<double>(c) - static_cast<double>(width) / 2.0;
      if (dr * dr + dc * dc < 400.0) v = 235.0;
      img(r, c) = std::clamp(std::nearbyint(v), 0.0, 255.0);
    }
  }
  return img;
}

}  // namespace l0dl::testing

#endif  // L0DL_TESTS_TEST_SUPPORT_HPP
