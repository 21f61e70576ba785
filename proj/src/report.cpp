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

#include "l0dl/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace l0dl {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string fmt_db(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string fmt_sigma(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double parse_double(const std::string& token) {
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  const double v = std::stod(token, &pos);
  if (pos != token.size()) {
    throw std::runtime_error("psnr table: malformed number '" + token + "'");
  }
  return v;
}

double recon_value(const PsnrRecord& rec, Reconstruction recon) {
  return recon == Reconstruction::kAverage ? rec.psnr_average : rec.psnr_weighted;
}

}  // namespace

std::string write_psnr_table(const std::vector<PsnrRecord>& records) {
  std::ostringstream out;
  out << "image\tsigma\tmethod\tpsnr_noisy\tpsnr_average\tpsnr_weighted\n";
  for (const PsnrRecord& rec : records) {
    out << rec.image << '\t' << fmt_sigma(rec.sigma) << '\t' << rec.method << '\t'
        << fmt_db(rec.psnr_noisy) << '\t' << fmt_db(rec.psnr_average) << '\t'
        << fmt_db(rec.psnr_weighted) << '\n';
  }
  return out.str();
}

std::vector<PsnrRecord> read_psnr_table(std::istream& in) {
  std::vector<PsnrRecord> records;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream fields(line);
    std::string image, sigma, method, noisy, average, weighted;
    if (!std::getline(fields, image, '\t') || !std::getline(fields, sigma, '\t') ||
        !std::getline(fields, method, '\t') || !std::getline(fields, noisy, '\t') ||
        !std::getline(fields, average, '\t') || !std::getline(fields, weighted)) {
      throw std::runtime_error("psnr table: malformed row '" + line + "'");
    }
    PsnrRecord rec;
    rec.image = image;
    rec.sigma = parse_double(sigma);
    rec.method = method;
    rec.psnr_noisy = parse_double(noisy);
    rec.psnr_average = parse_double(average);
    rec.psnr_weighted = parse_double(weighted);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<PsnrRecord> read_psnr_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("psnr table: cannot open " + path);
  }
  return read_psnr_table(in);
}

CompareReport compare_report(std::vector<PsnrRecord> records,
                             const std::string& reference_method) {
  if (records.empty()) {
    throw std::invalid_argument("compare_report: no records");
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const PsnrRecord& a, const PsnrRecord& b) {
                     if (a.image != b.image) return a.image < b.image;
                     if (a.sigma != b.sigma) return a.sigma < b.sigma;
                     return a.method < b.method;
                   });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].image == records[i - 1].image &&
        records[i].sigma == records[i - 1].sigma &&
        records[i].method == records[i - 1].method) {
      throw std::invalid_argument("compare_report: duplicate run for " +
                                  records[i].image + "/" + records[i].method);
    }
  }

  CompareReport report;
  report.reference_method = reference_method;

  // Best method per (image, sigma, reconstruction).
  std::map<std::pair<std::string, double>, std::vector<const PsnrRecord*>> cells;
  for (const PsnrRecord& rec : records) {
    cells[{rec.image, rec.sigma}].push_back(&rec);
  }
  for (const auto& [key, rows] : cells) {
    for (Reconstruction recon : {Reconstruction::kAverage, Reconstruction::kWeighted}) {
      const PsnrRecord* best = rows.front();
      for (const PsnrRecord* row : rows) {
        if (recon_value(*row, recon) > recon_value(*best, recon)) best = row;
      }
      report.best.push_back(BestCell{key.first, key.second, recon, best->method,
                                     recon_value(*best, recon)});
    }
  }

  // Mean improvement of the reference method over every baseline, per sigma.
  const std::string ref = lower(reference_method);
  std::set<double> sigmas;
  std::set<std::string> baselines;
  std::map<std::pair<std::string, double>, const PsnrRecord*> by_key;
  for (const PsnrRecord& rec : records) {
    sigmas.insert(rec.sigma);
    if (lower(rec.method) != ref) baselines.insert(rec.method);
    by_key[{rec.image + "\x1f" + rec.method, rec.sigma}] = &rec;
  }
  std::set<std::string> images;
  for (const PsnrRecord& rec : records) images.insert(rec.image);

  for (double sigma : sigmas) {
    for (const std::string& baseline : baselines) {
      Aggregate agg;
      agg.sigma = sigma;
      agg.baseline = baseline;
      for (const std::string& image : images) {
        const PsnrRecord* ref_rec = nullptr;
        const PsnrRecord* base_rec = nullptr;
        for (const PsnrRecord& rec : records) {
          if (rec.image != image || rec.sigma != sigma) continue;
          if (lower(rec.method) == ref) ref_rec = &rec;
          if (rec.method == baseline) base_rec = &rec;
        }
        if (ref_rec == nullptr || base_rec == nullptr) continue;
        agg.mean_gain_average += ref_rec->psnr_average - base_rec->psnr_average;
        agg.mean_gain_weighted += ref_rec->psnr_weighted - base_rec->psnr_weighted;
        ++agg.image_count;
      }
      if (agg.image_count > 0) {
        agg.mean_gain_average /= agg.image_count;
        agg.mean_gain_weighted /= agg.image_count;
        report.aggregates.push_back(std::move(agg));
      }
    }
  }

  report.records = std::move(records);
  return report;
}

bool is_best(const CompareReport& report, const std::string& image, double sigma,
             Reconstruction reconstruction, const std::string& method) {
  for (const BestCell& cell : report.best) {
    if (cell.image == image && cell.sigma == sigma &&
        cell.reconstruction == reconstruction) {
      return cell.method == method;
    }
  }
  return false;
}

std::string to_markdown(const CompareReport& report) {
  std::set<double> sigmas;
  for (const PsnrRecord& rec : report.records) sigmas.insert(rec.sigma);

  std::ostringstream out;
  out << "| image | method |";
  for (double s : sigmas) out << " avg s=" << fmt_sigma(s) << " |";
  for (double s : sigmas) out << " wtd s=" << fmt_sigma(s) << " |";
  out << "\n|---|---|";
  for (std::size_t i = 0; i < 2 * sigmas.size(); ++i) out << "---|";
  out << "\n";

  std::set<std::pair<std::string, std::string>> rows;
  for (const PsnrRecord& rec : report.records) rows.insert({rec.image, rec.method});
  for (const auto& [image, method] : rows) {
    out << "| " << image << " | " << method << " |";
    for (Reconstruction recon : {Reconstruction::kAverage, Reconstruction::kWeighted}) {
      for (double sigma : sigmas) {
        const PsnrRecord* found = nullptr;
        for (const PsnrRecord& rec : report.records) {
          if (rec.image == image && rec.method == method && rec.sigma == sigma) {
            found = &rec;
          }
        }
        if (found == nullptr) {
          out << " - |";
        } else {
          const double value = recon == Reconstruction::kAverage
                                   ? found->psnr_average
                                   : found->psnr_weighted;
          const bool best = is_best(report, image, sigma, recon, method);
          out << ' ' << (best ? "**" : "") << fmt_db(value) << (best ? "**" : "")
              << " |";
        }
      }
    }
    out << "\n";
  }

  out << "\n";
  for (const Aggregate& agg : report.aggregates) {
    out << "mean(" << report.reference_method << " - " << agg.baseline
        << ") at sigma=" << fmt_sigma(agg.sigma) << ": average "
        << fmt_db(agg.mean_gain_average) << " dB, weighted "
        << fmt_db(agg.mean_gain_weighted) << " dB over " << agg.image_count
        << " images\n";
  }
  return out.str();
}

std::string to_tsv(const CompareReport& report) {
  std::ostringstream out;
  out << "image\tsigma\tmethod\tpsnr_noisy\tpsnr_average\tbest_average"
         "\tpsnr_weighted\tbest_weighted\n";
  for (const PsnrRecord& rec : report.records) {
    out << rec.image << '\t' << fmt_sigma(rec.sigma) << '\t' << rec.method << '\t'
        << fmt_db(rec.psnr_noisy) << '\t' << fmt_db(rec.psnr_average) << '\t'
        << (is_best(report, rec.image, rec.sigma, Reconstruction::kAverage,
                    rec.method)
                ? 1
                : 0)
        << '\t' << fmt_db(rec.psnr_weighted) << '\t'
        << (is_best(report, rec.image, rec.sigma, Reconstruction::kWeighted,
                    rec.method)
                ? 1
                : 0)
        << '\n';
  }
  out << '\n';
  for (const Aggregate& agg : report.aggregates) {
    out << "aggregate\t" << fmt_sigma(agg.sigma) << '\t' << agg.baseline << '\t'
        << fmt_db(agg.mean_gain_average) << '\t' << fmt_db(agg.mean_gain_weighted)
        << '\t' << agg.image_count << '\n';
  }
  return out.str();
}

}  // namespace l0dl
