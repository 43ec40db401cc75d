// Copyright 2026 The prae Authors
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

#ifndef PRAE_COMPARISON_H_
#define PRAE_COMPARISON_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "prae/experiment.h"

namespace prae {

// One trained cell: the sweep CSV row.
struct MetricRow {
  std::string backbone;
  int depth = 0;
  std::size_t heads = 1;
  std::size_t params = 0;
  double cd = 0.0;
  double emd = 0.0;
  double hd = 0.0;
  double f1 = 0.0;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

// Best-epoch metrics of a run record.
MetricRow metric_row(const RunRecord& record);
MetricRow apply_scale(MetricRow row, const PresentationScale& scale);

inline constexpr std::array<const char*, 4> kMetricNames = {"CD", "EMD", "HD",
                                                            "F1"};

struct ComparisonRow {
  std::string backbone;
  int depth = 0;
  std::size_t multi_heads = 0;
  std::array<double, 4> single{};   // CD, EMD, HD, F1
  std::array<double, 4> multi{};
  std::array<double, 4> delta{};    // multi - single
  // Positive means the multi-head decoder improved: lower CD/EMD/HD,
  // higher F1.
  std::array<double, 4> percent{};
  std::array<bool, 4> improved{};
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::array<double, 4> mean_percent{};  // mean of percent over all rows
};

// Pairs every single-head row with the multi-head row of the same
// (backbone, depth). Throws ConfigError for an unpaired or duplicated row.
ComparisonTable build_comparison(std::span<const MetricRow> rows);

// Aligned text with signed deltas, percentages and a mean row.
std::string format_comparison(const ComparisonTable& table);
std::string comparison_csv(const ComparisonTable& table);

// Columns: backbone,depth,heads,params,cd,emd,hd,f1. Values are written
// with 17 significant digits so a read recovers them exactly.
std::string metric_rows_csv(std::span<const MetricRow> rows);
std::vector<MetricRow> parse_metric_rows_csv(const std::string& text);

}  // namespace prae

#endif  // PRAE_COMPARISON_H_
