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

#ifndef L0DL_REPORT_HPP
#define L0DL_REPORT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "l0dl/types.hpp"

namespace l0dl {

enum class Reconstruction { kAverage, kWeighted };

/// One denoising run: PSNR of the noisy input and of both reconstructions
/// against the clean original, in dB.
struct PsnrRecord {
  std::string image;
  double sigma = 0.0;
  std::string method;
  double psnr_noisy = 0.0;
  double psnr_average = 0.0;
  double psnr_weighted = 0.0;
};

std::string write_psnr_table(const std::vector<PsnrRecord>& records);
std::vector<PsnrRecord> read_psnr_table(std::istream& in);
std::vector<PsnrRecord> read_psnr_table_file(const std::string& path);

struct BestCell {
  std::string image;
  double sigma = 0.0;
  Reconstruction reconstruction = Reconstruction::kAverage;
  std::string method;  // best method for this cell
  double value = 0.0;
};

struct Aggregate {
  double sigma = 0.0;
  std::string baseline;
  double mean_gain_average = 0.0;   // mean over images of (ref - baseline)
  double mean_gain_weighted = 0.0;
  int image_count = 0;
};

struct CompareReport {
  std::vector<PsnrRecord> records;  // merged, sorted
  std::vector<BestCell> best;       // best method per (image, sigma, recon)
  std::vector<Aggregate> aggregates;
  std::string reference_method;
};

/// Merges run records, marks the best method per (image, sigma,
/// reconstruction) cell, and aggregates the mean improvement of the reference
/// method (matched case-insensitively, default "miqp") over every baseline.
/// Throws on duplicate (image, sigma, method) rows.
CompareReport compare_report(std::vector<PsnrRecord> records,
                             const std::string& reference_method = "miqp");

bool is_best(const CompareReport& report, const std::string& image,
             double sigma, Reconstruction reconstruction,
             const std::string& method);

std::string to_markdown(const CompareReport& report);
std::string to_tsv(const CompareReport& report);

}  // namespace l0dl

#endif  // L0DL_REPORT_HPP
