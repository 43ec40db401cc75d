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

#include "prae/sweep.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>

#include "prae/checkpoint.h"
#include "prae/error.h"
#include "prae/log.h"
#include "prae/parallel.h"
#include "prae/plot.h"

namespace prae {
namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path.string(),
                   std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(text.data()),
                       text.size()));
}

double row_metric(const MetricRow& r, std::size_t i) {
  switch (i) {
    case 0:
      return r.cd;
    case 1:
      return r.emd;
    case 2:
      return r.hd;
    default:
      return r.f1;
  }
}

}  // namespace

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(),
                    [](const SweepCell& c) { return !c.error.empty(); }));
}

std::string cell_name(Backbone backbone, int depth, std::size_t heads) {
  std::string name = backbone_name(backbone);
  for (char& c : name) c = static_cast<char>(std::tolower(c));
  return name + "_d" + std::to_string(depth) + "_m" + std::to_string(heads);
}

void write_sweep_plots(const std::vector<MetricRow>& rows,
                       const std::string& directory,
                       std::vector<std::string>* written) {
  std::map<std::pair<std::string, std::size_t>, std::vector<const MetricRow*>>
      groups;
  for (const MetricRow& r : rows) groups[{r.backbone, r.heads}].push_back(&r);
  const char* file_names[4] = {"cd", "emd", "hd", "f1"};
  for (std::size_t m = 0; m < 4; ++m) {
    for (bool by_params : {false, true}) {
      LinePlot plot;
      plot.title = std::string(kMetricNames[m]) + " vs " +
                   (by_params ? "decoder parameters" : "decoder depth");
      plot.x_label = by_params ? "decoder parameters (millions)" : "decoder depth";
      plot.y_label = kMetricNames[m];
      for (const auto& [key, members] : groups) {
        PlotSeries s;
        s.name = key.first + (key.second == 1 ? " single-head"
                                              : " " + std::to_string(key.second) +
                                                    "-head");
        for (const MetricRow* r : members) {
          const double x = by_params ? static_cast<double>(r->params) / 1e6
                                     : static_cast<double>(r->depth);
          s.points.emplace_back(x, row_metric(*r, m));
        }
        plot.series.push_back(std::move(s));
      }
      const std::string file = std::string(file_names[m]) +
                               (by_params ? "_vs_params.svg" : "_vs_depth.svg");
      write_text(fs::path(directory) / file, render_svg(plot));
      if (written) written->push_back(file);
    }
  }
}

SweepResult run_sweep(const SweepOptions& options, const Dataset* prepared) {
  if (options.depths.empty() || options.heads.empty()) {
    throw ConfigError("sweep needs at least one depth and one head count");
  }
  std::vector<Backbone> backbones = options.backbones;
  if (backbones.empty()) backbones.push_back(options.base.backbone);

  SweepResult result;
  for (Backbone b : backbones) {
    for (int depth : options.depths) {
      for (std::size_t heads : options.heads) {
        SweepCell cell;
        cell.config = options.base;
        cell.config.backbone = b;
        cell.config.depth = depth;
        cell.config.heads = heads;
        cell.name = cell_name(b, depth, heads);
        cell.config.output_dir =
            (fs::path(options.output_dir) / "cells" / cell.name).string();
        // Every cell is validated before anything runs.
        validate(cell.config);
        result.cells.push_back(std::move(cell));
      }
    }
  }

  Dataset owned;
  if (!prepared) owned = prepare_dataset(options.base);
  const Dataset& ds = prepared ? *prepared : owned;
  fs::create_directories(options.output_dir);

  parallel_for(
      result.cells.size(),
      [&](std::size_t i) {
        SweepCell& cell = result.cells[i];
        const fs::path record_path =
            fs::path(cell.config.output_dir) / "run_record.json";
        if (options.resume && fs::exists(record_path)) {
          try {
            RunRecord prior = load_run_record(record_path.string());
            if (prior.hash == config_hash(cell.config)) {
              cell.record = std::move(prior);
              cell.skipped = true;
              log_info("sweep: " + cell.name + " already complete, skipped");
              return;
            }
          } catch (const Error& ex) {
            log_warning("sweep: " + cell.name +
                        " has an unreadable record, rerunning: " + ex.what());
          }
        }
        try {
          log_info("sweep: training " + cell.name);
          cell.record = train(cell.config, {}, &ds);
        } catch (const Error& ex) {
          cell.error = ex.what();
          log_warning("sweep: " + cell.name + " failed: " + cell.error);
        }
      },
      options.parallel);

  for (const SweepCell& cell : result.cells) {
    if (cell.record) result.rows.push_back(metric_row(*cell.record));
  }
  write_text(fs::path(options.output_dir) / "metrics.csv",
             metric_rows_csv(result.rows));
  result.files.push_back("metrics.csv");
  try {
    ComparisonTable table = build_comparison(result.rows);
    if (!table.rows.empty()) {
      write_text(fs::path(options.output_dir) / "comparison.txt",
                 format_comparison(table));
      write_text(fs::path(options.output_dir) / "comparison.csv",
                 comparison_csv(table));
      result.files.push_back("comparison.txt");
      result.files.push_back("comparison.csv");
      result.comparison = std::move(table);
    }
  } catch (const ConfigError& ex) {
    log_warning(std::string("sweep: no comparison table: ") + ex.what());
  }
  write_sweep_plots(result.rows, options.output_dir, &result.files);
  return result;
}

}  // namespace prae
