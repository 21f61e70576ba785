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

#ifndef L0DL_IMAGING_HPP
#define L0DL_IMAGING_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "l0dl/types.hpp"

namespace l0dl {

/// Grayscale image on the [0, 255] scale, real-valued during processing
/// (noise and reconstructions are never clipped; only the PGM writer clamps).
class GrayImage {
 public:
  explicit GrayImage(Matrix pixels);

  Index height() const { return pixels_.rows(); }
  Index width() const { return pixels_.cols(); }
  const Matrix& pixels() const { return pixels_; }

 private:
  Matrix pixels_;
};

/// Additive Gaussian noise, pixel + sigma * g with g drawn row-major from
/// SeededRng (mt19937_64 + Box-Muller; see rng.hpp). Values are not clipped.
GrayImage add_gaussian_noise(const GrayImage& img, double sigma,
                             std::uint64_t seed);

/// Overlapping patch decomposition. positions are (row, col) top-left
/// corners in row-major order; column i of patches is the s x s block at
/// positions[i], vectorized column-major within the patch.
struct PatchGrid {
  int patch_size = 8;
  int stride = 1;
  std::vector<std::pair<int, int>> positions;
  SignalBatch patches;
};

/// Number of patch positions per axis pair: (floor((H-s)/stride)+1) *
/// (floor((W-s)/stride)+1).
std::int64_t patch_count(Index height, Index width, int patch_size,
                         int stride);

PatchGrid extract_patches(const GrayImage& img, int patch_size = 8,
                          int stride = 1);

struct CoverageReport {
  std::int64_t uncovered_pixels = 0;
};

/// Per-pixel average of all patch contributions covering it. Pixels covered
/// by no patch (stride > 1 edges) copy the nearest covered pixel and are
/// counted in the coverage report.
GrayImage reconstruct_average(const PatchGrid& grid, const Matrix& coded,
                              Index height, Index width,
                              CoverageReport* report = nullptr);

/// pixel = (lambda * noisy + sum of patch contributions) / (lambda + cover);
/// the closed-form blend of the noisy image with the patch average.
/// lambda = 0 reduces exactly to reconstruct_average.
GrayImage reconstruct_weighted(const GrayImage& noisy, const PatchGrid& grid,
                               const Matrix& coded, double lambda_rec,
                               CoverageReport* report = nullptr);

/// 10 log10(255^2 / MSE) in dB; +infinity when the images are identical.
double psnr(const GrayImage& reference, const GrayImage& test);

/// P2 (ASCII) or P5 (binary) PGM with maxval <= 255.
GrayImage load_pgm(const std::string& path);

/// Writes binary P5, clamping to [0, 255] and rounding half to even.
void save_pgm(const GrayImage& img, const std::string& path);

}  // namespace l0dl

#endif  // L0DL_IMAGING_HPP
