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

#include "l0dl/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "l0dl/rng.hpp"

namespace l0dl {

GrayImage::GrayImage(Matrix pixels) : pixels_(std::move(pixels)) {
  if (pixels_.rows() < 1 || pixels_.cols() < 1) {
    throw std::invalid_argument("GrayImage: empty image");
  }
  if (!pixels_.allFinite()) {
    throw std::invalid_argument("GrayImage: non-finite pixels");
  }
}

GrayImage add_gaussian_noise(const GrayImage& img, double sigma,
                             std::uint64_t seed) {
  if (sigma < 0.0) {
    throw std::invalid_argument("add_gaussian_noise: sigma must be >= 0");
  }
  SeededRng rng(seed);
  Matrix out = img.pixels();
  // Row-major draw order, part of the reproducibility contract.
  for (Index r = 0; r < out.rows(); ++r) {
    for (Index c = 0; c < out.cols(); ++c) {
      out(r, c) += sigma * rng.normal();
    }
  }
  return GrayImage(std::move(out));
}

std::int64_t patch_count(Index height, Index width, int patch_size, int stride) {
  if (patch_size < 1 || stride < 1) {
    throw std::invalid_argument("patch_count: patch_size and stride must be >= 1");
  }
  if (height < patch_size || width < patch_size) {
    throw std::invalid_argument("patch_count: image smaller than the patch");
  }
  const std::int64_t rows = (height - patch_size) / stride + 1;
  const std::int64_t cols = (width - patch_size) / stride + 1;
  return rows * cols;
}

PatchGrid extract_patches(const GrayImage& img, int patch_size, int stride) {
  const std::int64_t count = patch_count(img.height(), img.width(), patch_size, stride);
  const int s = patch_size;

  std::vector<std::pair<int, int>> positions;
  positions.reserve(static_cast<std::size_t>(count));
  Matrix patches(static_cast<Index>(s) * s, static_cast<Index>(count));
  Index k = 0;
  for (Index r = 0; r + s <= img.height(); r += stride) {
    for (Index c = 0; c + s <= img.width(); c += stride) {
      positions.emplace_back(static_cast<int>(r), static_cast<int>(c));
      // Column-major within the patch.
      patches.col(k) = img.pixels().block(r, c, s, s).reshaped();
      ++k;
    }
  }
  return PatchGrid{patch_size, stride, std::move(positions),
                   SignalBatch(std::move(patches))};
}

namespace {

GrayImage blend_reconstruction(const GrayImage* noisy, const PatchGrid& grid,
                               const Matrix& coded, Index height, Index width,
                               double lambda_rec, CoverageReport* report) {
  const int s = grid.patch_size;
  if (coded.rows() != static_cast<Index>(s) * s ||
      coded.cols() != static_cast<Index>(grid.positions.size())) {
    throw std::invalid_argument("reconstruct: coded patch shape mismatch");
  }
  if (lambda_rec < 0.0) {
    throw std::invalid_argument("reconstruct: lambda_rec must be >= 0");
  }
  Matrix sums = Matrix::Zero(height, width);
  Matrix cover = Matrix::Zero(height, width);
  for (std::size_t i = 0; i < grid.positions.size(); ++i) {
    const auto [r, c] = grid.positions[i];
    if (r + s > height || c + s > width) {
      throw std::invalid_argument("reconstruct: patch outside the target image");
    }
    sums.block(r, c, s, s) += coded.col(static_cast<Index>(i)).reshaped(s, s);
    cover.block(r, c, s, s).array() += 1.0;
  }

  Matrix out(height, width);
  std::int64_t uncovered = 0;
  for (Index r = 0; r < height; ++r) {
    for (Index c = 0; c < width; ++c) {
      const double n = cover(r, c);
      if (n > 0.0 || lambda_rec > 0.0) {
        const double base = (noisy != nullptr) ? lambda_rec * noisy->pixels()(r, c) : 0.0;
        out(r, c) = (base + sums(r, c)) / (lambda_rec + n);
      } else {
        out(r, c) = std::numeric_limits<double>::quiet_NaN();  // filled below
        ++uncovered;
      }
    }
  }
  if (uncovered > 0) {
    // Copy the nearest covered pixel (squared Euclidean distance, row-major
    // scan wins ties). Only stride > 1 grids can leave uncovered edges, so
    // this path is small.
    for (Index r = 0; r < height; ++r) {
      for (Index c = 0; c < width; ++c) {
        if (!std::isnan(out(r, c))) continue;
        double best_dist = std::numeric_limits<double>::infinity();
        double best_value = 0.0;
        for (Index rr = 0; rr < height; ++rr) {
          for (Index cc = 0; cc < width; ++cc) {
            if (cover(rr, cc) <= 0.0) continue;
            const double dr = static_cast<double>(rr - r);
            const double dc = static_cast<double>(cc - c);
            const double dist = dr * dr + dc * dc;
            if (dist < best_dist) {
              best_dist = dist;
              best_value = sums(rr, cc) / cover(rr, cc);
            }
          }
        }
        if (!std::isfinite(best_dist)) {
          throw std::invalid_argument("reconstruct: no covered pixels at all");
        }
        out(r, c) = best_value;
      }
    }
  }
  if (report != nullptr) report->uncovered_pixels = uncovered;
  return GrayImage(std::move(out));
}

}  // namespace

GrayImage reconstruct_average(const PatchGrid& grid, const Matrix& coded,
                              Index height, Index width, CoverageReport* report) {
  return blend_reconstruction(nullptr, grid, coded, height, width, 0.0, report);
}

GrayImage reconstruct_weighted(const GrayImage& noisy, const PatchGrid& grid,
                               const Matrix& coded, double lambda_rec,
                               CoverageReport* report) {
  return blend_reconstruction(&noisy, grid, coded, noisy.height(), noisy.width(),
                              lambda_rec, report);
}

double psnr(const GrayImage& reference, const GrayImage& test) {
  if (reference.height() != test.height() || reference.width() != test.width()) {
    throw std::invalid_argument("psnr: dimension mismatch");
  }
  const double mse = (reference.pixels() - test.pixels()).squaredNorm() /
                     static_cast<double>(reference.height() * reference.width());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

// Reads the next header token, skipping whitespace and # comments.
std::string next_pgm_token(std::istream& in) {
  std::string token;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  while (ch != EOF && !std::isspace(ch) && ch != '#') {
    token.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  if (ch == '#') in.unget();
  return token;
}

long parse_pgm_int(std::istream& in, const char* what) {
  const std::string token = next_pgm_token(in);
  if (token.empty()) {
    throw std::runtime_error(std::string("load_pgm: missing ") + what);
  }
  try {
    std::size_t pos = 0;
    const long value = std::stol(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("load_pgm: malformed ") + what + " '" +
                             token + "'");
  }
}

}  // namespace

GrayImage load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_pgm: cannot open " + path);
  }
  const std::string magic = next_pgm_token(in);
  if (magic != "P2" && magic != "P5") {
    throw std::runtime_error("load_pgm: unsupported magic '" + magic + "'");
  }
  const long width = parse_pgm_int(in, "width");
  const long height = parse_pgm_int(in, "height");
  const long maxval = parse_pgm_int(in, "maxval");
  if (width < 1 || height < 1) {
    throw std::runtime_error("load_pgm: bad dimensions");
  }
  if (maxval < 1 || maxval > 255) {
    throw std::runtime_error("load_pgm: unsupported maxval " + std::to_string(maxval));
  }

  Matrix pixels(height, width);
  if (magic == "P5") {
    // Exactly one whitespace byte separates the header from the payload.
    std::vector<unsigned char> row(static_cast<std::size_t>(width));
    for (long r = 0; r < height; ++r) {
      in.read(reinterpret_cast<char*>(row.data()), width);
      if (in.gcount() != width) {
        throw std::runtime_error("load_pgm: truncated P5 payload");
      }
      for (long c = 0; c < width; ++c) {
        pixels(r, c) = static_cast<double>(row[static_cast<std::size_t>(c)]);
      }
    }
  } else {
    for (long r = 0; r < height; ++r) {
      for (long c = 0; c < width; ++c) {
        const long value = parse_pgm_int(in, "P2 pixel");
        if (value < 0 || value > maxval) {
          throw std::runtime_error("load_pgm: P2 pixel out of range");
        }
        pixels(r, c) = static_cast<double>(value);
      }
    }
  }
  return GrayImage(std::move(pixels));
}

void save_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("save_pgm: cannot open " + path);
  }
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.width()));
  for (Index r = 0; r < img.height(); ++r) {
    for (Index c = 0; c < img.width(); ++c) {
      // Clamp to [0,255]; nearbyint rounds half to even in the default mode.
      const double v = std::clamp(img.pixels()(r, c), 0.0, 255.0);
      row[static_cast<std::size_t>(c)] =
          static_cast<unsigned char>(std::nearbyint(v));
    }
    out.write(reinterpret_cast<const char*>(row.data()), img.width());
  }
  if (!out) {
    throw std::runtime_error("save_pgm: write failed for " + path);
  }
}

}  // namespace l0dl
