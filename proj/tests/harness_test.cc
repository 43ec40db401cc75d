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

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "prae/adam.h"
#include "prae/checkpoint.h"
#include "prae/comparison.h"
#include "prae/error.h"
#include "prae/experiment.h"
#include "prae/loss.h"
#include "prae/plot.h"
#include "prae/sweep.h"
#include "test_util.h"

namespace prae {
namespace {

namespace fs = std::filesystem;
using testing::temp_dir;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Light-AE block of the published ModelNet40 table: CD x1e3, EMD, HD x1e2,
// F1 in percent.
std::vector<MetricRow> light_ae_fixture() {
  const double single[5][4] = {{3.39, 154.74, 16.97, 24.84},
                               {3.52, 150.88, 16.92, 23.96},
                               {3.29, 138.40, 15.79, 26.03},
                               {3.38, 145.12, 15.61, 26.94},
                               {3.48, 166.64, 16.08, 26.76}};
  const double multi[5][4] = {{3.42, 128.37, 17.07, 25.37},
                              {3.37, 110.20, 16.73, 25.16},
                              {3.18, 103.92, 15.77, 26.83},
                              {3.24, 111.50, 15.42, 27.45},
                              {3.36, 113.09, 15.61, 27.37}};
  std::vector<MetricRow> rows;
  for (int d = 0; d < 5; ++d) {
    rows.push_back({"Light-AE", d + 1, 1, 0, single[d][0], single[d][1],
                    single[d][2], single[d][3]});
    rows.push_back({"Light-AE", d + 1, 2, 0, multi[d][0], multi[d][1],
                    multi[d][2], multi[d][3]});
  }
  return rows;
}

// Run record with the output directory blanked, for comparing runs that
// wrote to different places.
std::string portable_json(RunRecord r) {
  ExperimentConfig c = config_from_json(r.config_json);
  c.output_dir.clear();
  r.config_json = config_to_json(c);
  return r.to_json(false);
}

ExperimentConfig tiny_config(const std::string& out) {
  ExperimentConfig c;
  c.backbone = Backbone::kLightAE;
  c.depth = 1;
  c.heads = 1;
  c.points = 64;
  c.epochs = 4;
  c.batch_size = 4;
  c.data.instances = 2;
  c.data.split = {0.75, 0.25};
  c.output_dir = out;
  return c;
}

TEST(ConfigTest, JsonRoundTripAndHash) {
  ExperimentConfig c = tiny_config("somewhere");
  c.heads = 2;
  c.learning_rate = 1e-4;
  c.data.categories = {"sphere", "torus"};
  c.metrics.hd = false;
  c.select_metric = SelectMetric::kF1;
  const std::string text = config_to_json(c);
  const ExperimentConfig back = config_from_json(text);
  EXPECT_EQ(config_to_json(back), text);
  EXPECT_EQ(config_hash(back), config_hash(c));

  ExperimentConfig moved = c;
  moved.output_dir = "elsewhere";
  EXPECT_EQ(config_hash(moved), config_hash(c));
  ExperimentConfig changed = c;
  changed.seed = 2;
  EXPECT_NE(config_hash(changed), config_hash(c));

  const ExperimentConfig partial = config_from_json(R"({"depth": 5})");
  EXPECT_EQ(partial.depth, 5);
  EXPECT_EQ(partial.learning_rate, 5e-4);
  EXPECT_EQ(partial.batch_size, 32u);
}

TEST(ConfigTest, RejectsBadInput) {
  EXPECT_THROW(config_from_json(R"({"depht": 5})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"depth": "five"})"), ConfigError);
  EXPECT_THROW(config_from_json("[1,2]"), ConfigError);
  EXPECT_THROW(config_from_json("{"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"backbone": "vgg"})"), ConfigError);
  EXPECT_THROW(parse_metric_toggles({"cd", "iou"}), ConfigError);
}

TEST(ConfigTest, ValidationCatchesConflicts) {
  ExperimentConfig c = tiny_config("x");
  EXPECT_NO_THROW(validate(c));

  ExperimentConfig odd = c;
  odd.points = 255;
  odd.heads = 2;
  EXPECT_THROW(validate(odd), ConfigError);

  ExperimentConfig lr = c;
  lr.learning_rate = 0.0;
  EXPECT_THROW(validate(lr), ConfigError);

  ExperimentConfig val = c;
  val.select_split = Split::kVal;
  EXPECT_THROW(validate(val), ConfigError);
  val.data.split = {0.5, 0.25, 0.25};
  EXPECT_NO_THROW(validate(val));

  ExperimentConfig metric = c;
  metric.metrics.emd = false;
  metric.select_metric = SelectMetric::kEMD;
  EXPECT_THROW(validate(metric), ConfigError);

  ExperimentConfig ptv3 = c;
  ptv3.backbone = Backbone::kPTv3;
  EXPECT_THROW(validate(ptv3), ConfigError);

  ExperimentConfig depth = c;
  depth.depth = 6;
  EXPECT_THROW(validate(depth), ConfigError);
}

TEST(ConfigTest, HeadMismatchFailsBeforeAnyOutput) {
  const std::string dir = temp_dir("early") + "/run";
  ExperimentConfig c = tiny_config(dir);
  c.points = 255;
  c.heads = 2;
  EXPECT_THROW(train(c), ConfigError);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(ComparisonTest, PublishedLightAeDeltas) {
  const std::vector<MetricRow> rows = light_ae_fixture();
  const ComparisonTable t = build_comparison(rows);
  ASSERT_EQ(t.rows.size(), 5u);
  const ComparisonRow& d3 = t.rows[2];
  EXPECT_EQ(d3.depth, 3);
  EXPECT_EQ(d3.multi_heads, 2u);
  EXPECT_NEAR(d3.delta[0], -0.11, 1e-12);
  EXPECT_NEAR(d3.percent[0], 3.34, 0.005);
  EXPECT_NEAR(d3.delta[1], -34.48, 1e-9);
  EXPECT_NEAR(d3.delta[3], 0.80, 1e-12);
  EXPECT_TRUE(d3.improved[0]);
  EXPECT_TRUE(d3.improved[3]);

  // Depth 1: CD rose by 0.03 and HD by 0.10, both declines.
  const ComparisonRow& d1 = t.rows[0];
  EXPECT_NEAR(d1.delta[0], 0.03, 1e-12);
  EXPECT_FALSE(d1.improved[0]);
  EXPECT_NEAR(d1.delta[2], 0.10, 1e-12);
  EXPECT_FALSE(d1.improved[2]);
  EXPECT_TRUE(d1.improved[1]);
  EXPECT_NEAR(d1.delta[1], -26.37, 1e-9);

  // Means of the per-row percentages, recomputed by hand.
  const double cd_pct[5] = {100 * (3.39 - 3.42) / 3.39, 100 * (3.52 - 3.37) / 3.52,
                            100 * (3.29 - 3.18) / 3.29, 100 * (3.38 - 3.24) / 3.38,
                            100 * (3.48 - 3.36) / 3.48};
  double mean = 0.0;
  for (double p : cd_pct) mean += p / 5;
  EXPECT_NEAR(t.mean_percent[0], mean, 1e-12);
  const double f1_pct[5] = {100 * 0.53 / 24.84, 100 * 1.20 / 23.96,
                            100 * 0.80 / 26.03, 100 * 0.51 / 26.94,
                            100 * 0.61 / 26.76};
  mean = 0.0;
  for (double p : f1_pct) mean += p / 5;
  EXPECT_NEAR(t.mean_percent[3], mean, 1e-9);

  const std::string text = format_comparison(t);
  EXPECT_NE(text.find("-0.11"), std::string::npos) << text;
  EXPECT_NE(text.find("+3.34%+"), std::string::npos) << text;
  EXPECT_NE(text.find("-0.88%-"), std::string::npos) << text;
}

TEST(ComparisonTest, PairingErrors) {
  std::vector<MetricRow> rows = light_ae_fixture();
  rows.pop_back();
  EXPECT_THROW(build_comparison(rows), ConfigError);
  rows = light_ae_fixture();
  rows.push_back(rows.front());
  EXPECT_THROW(build_comparison(rows), ConfigError);
}

TEST(ComparisonTest, CsvIsLossless) {
  std::vector<MetricRow> rows = light_ae_fixture();
  rows[0].cd = 0.1 + 0.2;  // not representable in few digits
  rows[1].params = 1645056;
  const std::string csv = metric_rows_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "backbone,depth,heads,params,cd,emd,hd,f1");
  const std::vector<MetricRow> back = parse_metric_rows_csv(csv);
  EXPECT_EQ(back, rows);
  EXPECT_EQ(format_comparison(build_comparison(back)),
            format_comparison(build_comparison(rows)));
  EXPECT_THROW(parse_metric_rows_csv("backbone,depth\nx,1\n"), Error);
}

TEST(ComparisonTest, PresentationScaling) {
  MetricRow r{"LightAE", 3, 2, 0, 0.00318, 0.1, 0.1577, 0.2683};
  const MetricRow s = apply_scale(r, PresentationScale{});
  EXPECT_NEAR(s.cd, 3.18, 1e-12);
  EXPECT_NEAR(s.hd, 15.77, 1e-12);
  EXPECT_EQ(s.emd, 0.1);
  EXPECT_EQ(s.f1, 0.2683);
}

TEST(EvaluateTest, IdentityReconstructionIsPerfect) {
  ExperimentConfig c = tiny_config("unused");
  const Dataset ds = prepare_dataset(c);
  MetricOptions opts;
  opts.emd_mode = EmdMode::kExact;
  const MetricsReport r = evaluate_clouds(identity_reconstructor(), ds,
                                          ds.indices(Split::kTest), opts, 3);
  EXPECT_EQ(r.cd, 0.0);
  EXPECT_EQ(r.emd, 0.0);
  EXPECT_EQ(r.hd, 0.0);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_TRUE(r.emd_evaluated);
  const std::string shown = format_report(r, {true, false, true, true});
  EXPECT_EQ(shown.find("EMD"), std::string::npos);
  EXPECT_EQ(report_from_json(report_to_json(r)), r);
}

TEST(TrainTest, OverfitsOneShape) {
  ShapeRecipe torus;
  torus.primitive = Primitive::kTorus;
  torus.size = {1.0, 0.3, 0};
  const Dataset ds = generate_synthetic(std::span(&torus, 1), 128, 1);
  Model model = build_model(standard_spec(Backbone::kLightAE, 2, 1, 128), 3);
  const Tensor x = to_channels(ds.clouds);
  auto cd_now = [&]() {
    return chamfer(PointCloud::from_rows(model.reconstruct(x, Mode::kEval), 0),
                   ds.clouds[0]);
  };
  const double untrained = cd_now();
  AdamHyper hyper;
  hyper.lr = 1e-3;
  Adam<float> adam(hyper, model.parameters());
  for (int step = 0; step < 300; ++step) {
    model.zero_grad();
    const auto heads = model.forward_heads(x, Mode::kTrain, true);
    const auto loss = batch_multihead_chamfer_loss(x, heads);
    model.backward(loss.head_grads);
    adam.step(model.parameters());
  }
  EXPECT_LT(cd_now(), untrained / 10);
}

TEST(TrainTest, RecordsBestEpochAndIsDeterministic) {
  const std::string dir = temp_dir("train");
  ExperimentConfig c = tiny_config(dir + "/a");
  const RunRecord a = train(c);
  ASSERT_EQ(a.epochs.size(), 4u);
  EXPECT_LT(a.epochs.back().train_loss, a.epochs.front().train_loss);
  EXPECT_TRUE(std::isfinite(a.best.cd));

  std::size_t best = 0;
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    if (a.epochs[i].eval.cd < a.epochs[best].eval.cd) best = i;
  }
  EXPECT_EQ(a.best_epoch, best + 1);
  EXPECT_EQ(a.best, a.epochs[best].eval);
  ASSERT_TRUE(a.best_exact.has_value());
  EXPECT_EQ(a.best_exact->cd, a.best.cd);
  EXPECT_EQ(metric_row(a).emd, a.best_exact->emd);

  for (const char* f : {"best.ckpt", "final.ckpt", "run_record.json"}) {
    EXPECT_TRUE(fs::exists(fs::path(dir) / "a" / f)) << f;
  }
  const RunRecord loaded = load_run_record(dir + "/a/run_record.json");
  EXPECT_EQ(loaded.to_json(false), a.to_json(false));

  c.output_dir = dir + "/b";
  const RunRecord b = train(c);
  EXPECT_EQ(portable_json(a), portable_json(b));
  EXPECT_EQ(file_crc32(dir + "/a/best.ckpt"), file_crc32(dir + "/b/best.ckpt"));
  EXPECT_EQ(read_file_bytes(dir + "/a/final.ckpt"),
            read_file_bytes(dir + "/b/final.ckpt"));

  // The stored best checkpoint reproduces the recorded metrics.
  Checkpoint ck = load_checkpoint(dir + "/a/best.ckpt");
  const Dataset ds = prepare_dataset(c);
  MetricOptions opts;
  opts.emd_mode = EmdMode::kExact;
  const MetricsReport again = evaluate_clouds(
      model_reconstructor(ck.model), ds, ds.indices(Split::kTest), opts,
      c.batch_size);
  EXPECT_EQ(again, *a.best_exact);
}

TEST(TrainTest, ResumeMatchesUninterruptedRun) {
  const std::string dir = temp_dir("resume");
  ExperimentConfig full = tiny_config(dir + "/full");
  full.heads = 2;
  train(full);

  ExperimentConfig first = full;
  first.epochs = 2;
  first.output_dir = dir + "/split";
  train(first);
  ExperimentConfig second = full;
  second.output_dir = dir + "/split";
  TrainOptions opts;
  opts.resume_from = dir + "/split/final.ckpt";
  const RunRecord resumed = train(second, opts);
  EXPECT_EQ(resumed.epochs.size(), 4u);
  EXPECT_EQ(read_file_bytes(dir + "/split/final.ckpt"),
            read_file_bytes(dir + "/full/final.ckpt"));
  EXPECT_EQ(read_file_bytes(dir + "/split/best.ckpt"),
            read_file_bytes(dir + "/full/best.ckpt"));
  EXPECT_EQ(portable_json(load_run_record(dir + "/split/run_record.json")),
            portable_json(load_run_record(dir + "/full/run_record.json")));

  ExperimentConfig other_lr = full;
  other_lr.learning_rate = 1e-3;
  other_lr.output_dir = dir + "/lr";
  EXPECT_THROW(train(other_lr, opts), ConfigError);
}

TEST(SweepTest, GridOutputsAndResume) {
  const std::string dir = temp_dir("sweep");
  SweepOptions opts;
  opts.base = tiny_config("ignored");
  opts.base.epochs = 1;
  opts.backbones = {Backbone::kLightAE};
  opts.depths = {1, 2};
  opts.heads = {1, 2};
  opts.output_dir = dir;
  const SweepResult r = run_sweep(opts);
  EXPECT_EQ(r.failures(), 0u);
  ASSERT_EQ(r.rows.size(), 4u);
  ASSERT_TRUE(r.comparison.has_value());
  EXPECT_EQ(r.comparison->rows.size(), 2u);
  EXPECT_EQ(r.cells[3].name, "lightae_d2_m2");
  for (const char* f : {"metrics.csv", "comparison.txt", "comparison.csv",
                        "cd_vs_depth.svg", "f1_vs_params.svg"}) {
    EXPECT_TRUE(fs::exists(fs::path(dir) / f)) << f;
  }
  EXPECT_TRUE(fs::exists(fs::path(dir) / "cells/lightae_d1_m2/run_record.json"));

  // Re-deriving the comparison from the CSV reproduces the written table.
  const auto rows = parse_metric_rows_csv(slurp(fs::path(dir) / "metrics.csv"));
  EXPECT_EQ(rows, r.rows);
  EXPECT_EQ(format_comparison(build_comparison(rows)),
            slurp(fs::path(dir) / "comparison.txt"));

  const std::string svg = slurp(fs::path(dir) / "cd_vs_depth.svg");
  EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.rfind("<?xml", 0) == 0, true);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);

  SweepOptions again = opts;
  again.resume = true;
  const SweepResult r2 = run_sweep(again);
  for (const SweepCell& cell : r2.cells) EXPECT_TRUE(cell.skipped) << cell.name;
  EXPECT_EQ(r2.rows, r.rows);
}

TEST(SweepTest, FailedCellIsReported) {
  const std::string dir = temp_dir("sweep_fail");
  SweepOptions opts;
  opts.base = tiny_config("ignored");
  opts.base.epochs = 1;
  opts.base.points = 63;  // not divisible by two heads
  opts.backbones = {Backbone::kLightAE};
  opts.depths = {1};
  opts.heads = {1, 2};
  opts.output_dir = dir;
  EXPECT_THROW(run_sweep(opts), ConfigError);
}

TEST(PlotTest, RendersSeriesAndLegend) {
  LinePlot plot;
  plot.title = "CD vs depth";
  plot.x_label = "depth";
  plot.y_label = "CD";
  plot.series = {{"single", {{1, 3.4}, {2, 3.5}}}, {"multi <2>", {{1, 3.3}}}};
  const std::string svg = render_svg(plot);
  EXPECT_NE(svg.find("CD vs depth"), std::string::npos);
  EXPECT_NE(svg.find("single"), std::string::npos);
  EXPECT_NE(svg.find("multi &lt;2&gt;"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

}  // namespace
}  // namespace prae
