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
#include <sstream>

#include "l0dl/report.hpp"
#include "table1_fixture.hpp"

using namespace l0dl;

namespace {

const Aggregate* find_aggregate(const CompareReport& report, double sigma,
                                const std::string& baseline) {
  for (const Aggregate& agg : report.aggregates) {
    if (agg.sigma == sigma && agg.baseline == baseline) return &agg;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("a single run is trivially marked best") {
  std::vector<PsnrRecord> records = {{"img", 50, "miqp", 14.7, 22.0, 22.5}};
  const CompareReport report = compare_report(records);
  CHECK(is_best(report, "img", 50, Reconstruction::kAverage, "miqp"));
  CHECK(is_best(report, "img", 50, Reconstruction::kWeighted, "miqp"));
}

TEST_CASE("duplicate rows are rejected") {
  std::vector<PsnrRecord> records = {{"img", 50, "miqp", 1, 2, 3},
                                     {"img", 50, "miqp", 1, 2, 3}};
  CHECK_THROWS_AS(compare_report(records), std::invalid_argument);
}

TEST_CASE("published five-image benchmark reproduces the known aggregates") {
  const CompareReport report = compare_report(testing::table1_records(), "MIQP");

  const Aggregate* vs_proximal = find_aggregate(report, 50, "proximal");
  REQUIRE(vs_proximal != nullptr);
  CHECK(vs_proximal->image_count == 5);
  CHECK(std::abs(vs_proximal->mean_gain_average - 1.79) <= 0.01);
  CHECK(std::abs(vs_proximal->mean_gain_weighted - 1.79) <= 0.01);

  const Aggregate* vs_ksvd = find_aggregate(report, 50, "K-SVD");
  REQUIRE(vs_ksvd != nullptr);
  CHECK(std::abs(vs_ksvd->mean_gain_average - 3.73) <= 0.01);
  CHECK(std::abs(vs_ksvd->mean_gain_weighted - 3.73) <= 0.01);
}

TEST_CASE("the high-noise cells all go to the exact method") {
  const CompareReport report = compare_report(testing::table1_records(), "MIQP");
  for (const char* image : {"barbara", "cameraman", "elaine", "lena", "men"}) {
    CHECK(is_best(report, image, 50, Reconstruction::kAverage, "MIQP"));
    CHECK(is_best(report, image, 50, Reconstruction::kWeighted, "MIQP"));
  }
  // Spot values behind the barbara flags.
  for (const BestCell& cell : report.best) {
    if (cell.image == "barbara" && cell.sigma == 50) {
      if (cell.reconstruction == Reconstruction::kAverage) {
        CHECK(cell.value == doctest::Approx(22.73));
      } else {
        CHECK(cell.value == doctest::Approx(23.05));
      }
    }
  }
  // Low noise flips the ordering, as published.
  CHECK(is_best(report, "barbara", 10, Reconstruction::kAverage, "K-SVD"));
  CHECK(is_best(report, "lena", 10, Reconstruction::kAverage, "proximal"));
  CHECK(is_best(report, "elaine", 20, Reconstruction::kWeighted, "MIQP"));
}

TEST_CASE("psnr tables round-trip through text") {
  std::vector<PsnrRecord> records = {
      {"img_a", 10, "miqp", 28.1304, 30.5, 31.25},
      {"img_a", 10, "iht", 28.1304, 29.75, 30.0},
      {"img_b", 0, "iht",
       std::numeric_limits<double>::infinity(),  // degenerate sigma = 0 run
       41.0, 45.5},
  };
  const std::string text = write_psnr_table(records);
  std::istringstream in(text);
  const std::vector<PsnrRecord> parsed = read_psnr_table(in);
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[0].image == "img_a");
  CHECK(parsed[0].psnr_average == doctest::Approx(30.5));
  CHECK(std::isinf(parsed[2].psnr_noisy));
  CHECK(parsed[2].sigma == 0.0);
}

TEST_CASE("markdown output marks the best cells") {
  const CompareReport report = compare_report(testing::table1_records(), "MIQP");
  const std::string md = to_markdown(report);
  CHECK(md.find("**22.7300**") != std::string::npos);  // barbara sigma 50 average
  CHECK(md.find("mean(MIQP - proximal) at sigma=50") != std::string::npos);
  // Deterministic rendering.
  CHECK(md == to_markdown(report));
  const std::string tsv = to_tsv(report);
  CHECK(tsv.find("aggregate\t50\tproximal\t1.7900") != std::string::npos);
}
