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

#ifndef PRAE_EXPERIMENT_H_
#define PRAE_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prae/dataset.h"
#include "prae/metrics.h"
#include "prae/model.h"

namespace prae {

enum class SelectMetric { kCD, kEMD, kHD, kF1 };

const char* select_metric_name(SelectMetric m);
SelectMetric parse_select_metric(const std::string& name);
// Lower is better for CD, EMD and HD; higher for F1.
bool metric_improves(SelectMetric m, double candidate, double incumbent);
double metric_value(const MetricsReport& report, SelectMetric m);

const char* emd_mode_name(EmdMode mode);
EmdMode parse_emd_mode(const std::string& name);

struct DataConfig {
  // "synthetic" for the desk dataset, otherwise a file or directory path.
  std::string source = "synthetic";
  std::string format;  // empty: inferred from the path
  std::size_t instances = 50;  // per category, synthetic only
  std::vector<std::string> categories;  // empty: all desk categories
  bool normalize = true;  // applied to loaded files
  std::uint64_t seed = 0;  // synthetic generation
  std::vector<double> split{0.8, 0.2};
  std::uint64_t split_seed = 0;
};

struct MetricToggles {
  bool cd = true;
  bool emd = true;
  bool hd = true;
  bool f1 = true;
};

// Names among cd, emd, hd, f1; anything else throws ConfigError.
MetricToggles parse_metric_toggles(const std::vector<std::string>& names);

struct ExperimentConfig {
  Backbone backbone = Backbone::kLightAE;
  int depth = 3;
  std::size_t heads = 1;
  std::size_t points = kDefaultOutputPoints;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 5e-4;
  std::uint64_t seed = 1;
  DataConfig data;
  MetricToggles metrics;
  // Per-epoch EMD. kAuto means approximate during training; the best epoch
  // is re-scored exactly afterwards when K <= kExactEmdLimit.
  EmdMode emd_mode = EmdMode::kAuto;
  SelectMetric select_metric = SelectMetric::kCD;
  Split select_split = Split::kTest;
  // Custom backbone only.
  std::vector<std::size_t> encoder_widths;
  std::vector<std::size_t> hidden_widths;
  bool decoder_batchnorm = false;
  std::string output_dir = "run";
};

// Parses a JSON object; absent keys keep their defaults, unknown keys are
// rejected. Throws ConfigError.
ExperimentConfig config_from_json(const std::string& text,
                                  ExperimentConfig base = {});
std::string config_to_json(const ExperimentConfig& config);
// FNV-1a 64 of the canonical JSON without the output directory, as hex.
std::string config_hash(const ExperimentConfig& config);

ModelSpec model_spec(const ExperimentConfig& config);
// Throws ConfigError for any invalid or conflicting field, before any
// data is touched.
void validate(const ExperimentConfig& config);

// Loads or generates the dataset and assigns splits.
Dataset prepare_dataset(const ExperimentConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  MetricsReport eval;
};

struct RunRecord {
  std::string config_json;
  std::string hash;
  std::size_t decoder_params = 0;
  std::size_t total_params = 0;
  MetricsReport untrained;  // selection split, before the first step
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  MetricsReport best;
  // Best epoch re-scored with exact EMD, when feasible.
  std::optional<MetricsReport> best_exact;
  double wall_clock_seconds = 0.0;

  // `include_timing` = false drops the wall clock so that repeated runs
  // compare equal byte for byte.
  std::string to_json(bool include_timing = true) const;
  static RunRecord from_json(const std::string& text);
};

RunRecord load_run_record(const std::string& path);

struct TrainOptions {
  std::optional<std::string> resume_from;
  // Called after every epoch.
  std::function<void(const EpochRecord&)> on_epoch;
};

// Writes best.ckpt, final.ckpt and run_record.json into the output
// directory. Throws NumericError (with epoch, batch and learning rate) on a
// non-finite loss.
RunRecord train(const ExperimentConfig& config, const TrainOptions& options = {},
                const Dataset* prepared = nullptr);

// Maps an encoder-layout batch [B,3,K] to reconstructions [B,K',3].
using Reconstructor = std::function<Tensor(const Tensor&)>;

Reconstructor model_reconstructor(Model& model);
// Returns its input, transposed; for pipeline checks.
Reconstructor identity_reconstructor();

MetricsReport evaluate_clouds(const Reconstructor& reconstruct,
                              const Dataset& dataset,
                              const std::vector<std::size_t>& indices,
                              const MetricOptions& options,
                              std::size_t batch_size = 32);

struct PresentationScale {
  double cd = 1e3;
  double emd = 1.0;
  double hd = 1e2;
};

MetricsReport scaled(const MetricsReport& report, const PresentationScale& s);
// One line, enabled metrics only.
std::string format_report(const MetricsReport& report,
                          const MetricToggles& shown = {});

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);

}  // namespace prae

#endif  // PRAE_EXPERIMENT_H_
