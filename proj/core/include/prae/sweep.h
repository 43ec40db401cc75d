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

#ifndef PRAE_SWEEP_H_
#define PRAE_SWEEP_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "prae/comparison.h"
#include "prae/experiment.h"

namespace prae {

struct SweepOptions {
  ExperimentConfig base;  // everything but backbone, depth and heads
  std::vector<Backbone> backbones;  // empty: base.backbone
  std::vector<int> depths{1, 2, 3, 4, 5};
  std::vector<std::size_t> heads{1, 2};
  std::string output_dir = "sweep";
  // Skip cells whose run_record.json carries the same config hash.
  bool resume = false;
  std::size_t parallel = 1;  // concurrent cells
};

struct SweepCell {
  ExperimentConfig config;
  std::string name;
  bool skipped = false;
  std::optional<RunRecord> record;
  std::string error;  // empty on success
};

struct SweepResult {
  std::vector<SweepCell> cells;  // grid order: backbone, depth, heads
  std::vector<MetricRow> rows;   // successful cells, grid order
  std::optional<ComparisonTable> comparison;
  std::vector<std::string> files;  // everything written, relative paths

  std::size_t failures() const;
};

std::string cell_name(Backbone backbone, int depth, std::size_t heads);

// Runs the grid and writes, under output_dir:
//   cells/<name>/{best.ckpt,final.ckpt,run_record.json}
//   metrics.csv, comparison.txt, comparison.csv (when rows pair up),
//   <metric>_vs_depth.svg, <metric>_vs_params.svg
// Failed cells are logged and reported in the result; completed ones are
// kept. The dataset is prepared once and shared read-only.
SweepResult run_sweep(const SweepOptions& options,
                      const Dataset* prepared = nullptr);

// Plots for a set of rows: one series per (backbone, heads).
void write_sweep_plots(const std::vector<MetricRow>& rows,
                       const std::string& directory,
                       std::vector<std::string>* written = nullptr);

}  // namespace prae

#endif  // PRAE_SWEEP_H_
