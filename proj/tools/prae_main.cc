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

// Command-line front end: generate, train, eval, compare, sweep,
// audit-params and convert.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prae/audit.h"
#include "prae/checkpoint.h"
#include "prae/comparison.h"
#include "prae/dataset.h"
#include "prae/error.h"
#include "prae/experiment.h"
#include "prae/log.h"
#include "prae/sweep.h"

namespace {

namespace fs = std::filesystem;
using namespace prae;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& text, const char* what) {
  std::vector<T> out;
  for (const std::string& item : split_list(text)) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad ") + what + " list '" + text + "'");
    }
  }
  return out;
}

std::string read_text(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text(const std::string& path, const std::string& text) {
  write_file_bytes(path, std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

// Flags shared by train and sweep; unset flags leave the config file (or
// the built-in default) in charge.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::string> backbone;
  std::optional<int> depth;
  std::optional<std::size_t> heads;
  std::optional<std::size_t> points;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> data;
  std::optional<std::string> data_format;
  std::optional<std::size_t> instances;
  std::optional<std::string> categories;
  std::optional<std::uint64_t> data_seed;
  std::optional<std::string> split;
  std::optional<std::uint64_t> split_seed;
  std::optional<std::string> metrics;
  std::optional<std::string> emd_mode;
  std::optional<std::string> select_metric;
  std::optional<std::string> select_split;
  std::optional<std::string> encoder_widths;
  std::optional<std::string> hidden_widths;
  std::optional<std::string> out;

  void attach(CLI::App* app, bool with_model) {
    app->add_option("--config", config_path, "JSON experiment config");
    if (with_model) {
      app->add_option("--backbone", backbone, "light-ae, deep-ae or custom");
      app->add_option("--depth", depth, "decoder depth, 1-5");
      app->add_option("--heads", heads, "decoder heads M");
    }
    app->add_option("--points", points, "points per cloud K");
    app->add_option("--epochs", epochs, "training epochs");
    app->add_option("--batch-size", batch_size, "mini-batch size");
    app->add_option("--lr", lr, "Adam learning rate");
    app->add_option("--seed", seed, "initialization and shuffling seed");
    app->add_option("--data", data, "'synthetic' or a cloud file/directory");
    app->add_option("--data-format", data_format, "xyz, ply or pcds");
    app->add_option("--instances", instances, "synthetic shapes per category");
    app->add_option("--categories", categories, "comma list of desk categories");
    app->add_option("--data-seed", data_seed, "synthetic generation seed");
    app->add_option("--split", split, "fractions, e.g. 0.8,0.2 or 0.7,0.1,0.2");
    app->add_option("--split-seed", split_seed, "split shuffle seed");
    app->add_option("--metrics", metrics, "comma list of cd,emd,hd,f1");
    app->add_option("--emd-mode", emd_mode, "auto, exact, approx or skip");
    app->add_option("--select-metric", select_metric, "cd, emd, hd or f1");
    app->add_option("--select-split", select_split, "test or val");
    app->add_option("--encoder-widths", encoder_widths,
                    "custom backbone: comma list of encoder widths");
    app->add_option("--hidden-widths", hidden_widths,
                    "custom backbone: comma list of decoder hidden widths");
    app->add_option("--out", out, "output directory");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c;
    if (!config_path.empty()) c = config_from_json(read_text(config_path));
    if (backbone) c.backbone = parse_backbone(*backbone);
    if (depth) c.depth = *depth;
    if (heads) c.heads = *heads;
    if (points) c.points = *points;
    if (epochs) c.epochs = *epochs;
    if (batch_size) c.batch_size = *batch_size;
    if (lr) c.learning_rate = *lr;
    if (seed) c.seed = *seed;
    if (data) c.data.source = *data;
    if (data_format) c.data.format = *data_format;
    if (instances) c.data.instances = *instances;
    if (categories) c.data.categories = split_list(*categories);
    if (data_seed) c.data.seed = *data_seed;
    if (split) c.data.split = parse_numbers<double>(*split, "split");
    if (split_seed) c.data.split_seed = *split_seed;
    if (metrics) c.metrics = parse_metric_toggles(split_list(*metrics));
    if (emd_mode) c.emd_mode = parse_emd_mode(*emd_mode);
    if (select_metric) c.select_metric = parse_select_metric(*select_metric);
    if (select_split) c.select_split = parse_split(*select_split);
    if (encoder_widths) {
      c.encoder_widths = parse_numbers<std::size_t>(*encoder_widths, "width");
    }
    if (hidden_widths) {
      c.hidden_widths = parse_numbers<std::size_t>(*hidden_widths, "width");
    }
    if (out) c.output_dir = *out;
    return c;
  }
};

MetricToggles all_metrics() { return MetricToggles{}; }

void print_report(const std::string& label, const MetricsReport& raw,
                  const PresentationScale& scale, const MetricToggles& shown) {
  std::cout << label << " raw:    " << format_report(raw, shown) << "\n";
  char buf[96];
  std::snprintf(buf, sizeof(buf), " (CD x%g, EMD x%g, HD x%g)", scale.cd,
                scale.emd, scale.hd);
  std::cout << label << " scaled: " << format_report(scaled(raw, scale), shown)
            << buf << "\n";
}

int cmd_generate(const std::string& shapes, std::size_t count,
                 std::size_t points, std::uint64_t seed, const std::string& out,
                 const std::string& format_name) {
  std::vector<int> cats;
  for (const std::string& name : split_list(shapes)) {
    int found = -1;
    for (int k = 0; k < kDeskCategories; ++k) {
      if (name == desk_category_name(k)) found = k;
    }
    if (found < 0) throw ConfigError("unknown shape '" + name + "'");
    cats.push_back(found);
  }
  const auto recipes = desk_recipes(count, seed, cats);
  const Dataset ds = generate_synthetic(recipes, points, seed);
  const CloudFormat format = format_name.empty() ? format_from_path(out)
                                                 : parse_cloud_format(format_name);
  if (format == CloudFormat::kPackedBinary) {
    write_packed(out, ds.clouds);
  } else {
    fs::create_directories(out);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "cloud_%05zu", i);
      const std::string path = (fs::path(out) / name).string();
      if (format == CloudFormat::kAsciiXYZ) {
        write_xyz(path + ".xyz", ds.clouds[i]);
      } else {
        write_ply(path + ".ply", ds.clouds[i]);
      }
    }
  }
  std::string labels = "[";
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    labels += (i ? "," : "") + std::to_string(ds.labels[i]);
  }
  labels += "]";
  std::string manifest = ds.manifest_json;
  manifest.pop_back();
  manifest += ",\"shapes\":\"" + (shapes.empty() ? std::string("all") : shapes) +
              "\",\"count_per_shape\":" + std::to_string(count) +
              ",\"labels\":" + labels + "}\n";
  write_text(out + ".manifest.json", manifest);
  std::cout << "wrote " << ds.size() << " clouds of " << points << " points to "
            << out << "\n";
  return 0;
}

int cmd_train(const ConfigFlags& flags, const std::optional<std::string>& resume,
              double emd_scale) {
  const ExperimentConfig config = flags.resolve();
  validate(config);
  fs::create_directories(config.output_dir);
  write_text((fs::path(config.output_dir) / "config.json").string(),
             config_to_json(config) + "\n");
  TrainOptions options;
  options.resume_from = resume;
  options.on_epoch = [&](const EpochRecord& e) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "epoch %zu/%zu loss=%.6g ", e.epoch,
                  config.epochs, e.train_loss);
    std::cout << buf << format_report(e.eval, config.metrics) << std::endl;
  };
  const RunRecord record = train(config, options);
  PresentationScale scale;
  scale.emd = emd_scale;
  std::cout << "best epoch " << record.best_epoch << " (by "
            << select_metric_name(config.select_metric) << " on "
            << split_name(config.select_split) << ")\n";
  print_report("best", record.best, scale, config.metrics);
  if (record.best_exact) {
    print_report("best, exact EMD", *record.best_exact, scale, config.metrics);
  }
  std::cout << "decoder parameters " << record.decoder_params << ", total "
            << record.total_params << "\noutputs in " << config.output_dir
            << "\n";
  return 0;
}

struct EvalFlags {
  std::string checkpoint;
  bool identity = false;
  std::string config_path;
  std::string data;
  std::string data_format;
  std::string split;
  bool no_normalize = false;
  std::string emd_mode = "auto";
  double emd_scale = 1.0;
  std::size_t batch_size = 32;
  std::string json_out;
};

int cmd_eval(const EvalFlags& f) {
  std::optional<Checkpoint> ckpt;
  if (!f.identity) {
    if (f.checkpoint.empty()) {
      throw ConfigError("eval needs --checkpoint (or --identity)");
    }
    ckpt = load_checkpoint(f.checkpoint);
  }
  Dataset ds;
  std::vector<std::size_t> indices;
  if (!f.config_path.empty()) {
    ExperimentConfig c = config_from_json(read_text(f.config_path));
    if (!f.data.empty()) c.data.source = f.data;
    if (!f.data_format.empty()) c.data.format = f.data_format;
    ds = prepare_dataset(c);
    indices = ds.indices(parse_split(f.split.empty() ? "test" : f.split));
  } else {
    if (f.data.empty()) throw ConfigError("eval needs --data or --config");
    const CloudFormat format = f.data_format.empty()
                                   ? infer_input_format(f.data)
                                   : parse_cloud_format(f.data_format);
    ds = load_clouds(f.data, format);
    if (!f.no_normalize) {
      for (PointCloud& c : ds.clouds) c = normalize(c);
    }
    if (!f.split.empty() && f.split != "all") {
      throw ConfigError("--split needs --config to reproduce the split");
    }
    for (std::size_t i = 0; i < ds.size(); ++i) indices.push_back(i);
  }
  if (ckpt && ckpt->model.spec().decoder.output_points != ds.points_per_cloud()) {
    throw ConfigError(
        "checkpoint reconstructs K=" +
        std::to_string(ckpt->model.spec().decoder.output_points) +
        " points but the dataset has K=" + std::to_string(ds.points_per_cloud()));
  }
  MetricOptions options;
  options.emd_mode = parse_emd_mode(f.emd_mode);
  const Reconstructor recon =
      ckpt ? model_reconstructor(ckpt->model) : identity_reconstructor();
  const MetricsReport report =
      evaluate_clouds(recon, ds, indices, options, f.batch_size);
  PresentationScale scale;
  scale.emd = f.emd_scale;
  std::cout << "evaluated " << indices.size() << " clouds of "
            << ds.points_per_cloud() << " points\n";
  print_report("mean", report, scale, all_metrics());
  if (!f.json_out.empty()) write_text(f.json_out, report_to_json(report) + "\n");
  return 0;
}

int cmd_compare(const std::vector<std::string>& records,
                const std::string& csv, bool presentation, double emd_scale,
                const std::string& csv_out) {
  std::vector<MetricRow> rows;
  if (!csv.empty()) rows = parse_metric_rows_csv(read_text(csv));
  for (const std::string& path : records) {
    rows.push_back(metric_row(load_run_record(path)));
  }
  if (rows.empty()) throw ConfigError("compare needs --records or --csv");
  if (presentation) {
    PresentationScale scale;
    scale.emd = emd_scale;
    for (MetricRow& r : rows) r = apply_scale(r, scale);
  }
  const ComparisonTable table = build_comparison(rows);
  std::cout << format_comparison(table);
  if (!csv_out.empty()) write_text(csv_out, comparison_csv(table));
  return 0;
}

int cmd_sweep(const ConfigFlags& flags, const std::string& backbones,
              const std::string& depths, const std::string& heads, bool resume,
              std::size_t parallel) {
  SweepOptions options;
  options.base = flags.resolve();
  options.output_dir = flags.out ? *flags.out : "sweep";
  for (const std::string& b : split_list(backbones)) {
    options.backbones.push_back(parse_backbone(b));
  }
  if (!depths.empty()) options.depths = parse_numbers<int>(depths, "depth");
  if (!heads.empty()) options.heads = parse_numbers<std::size_t>(heads, "head");
  options.resume = resume;
  options.parallel = parallel;
  const SweepResult result = run_sweep(options);
  std::cout << metric_rows_csv(result.rows);
  if (result.comparison) std::cout << "\n" << format_comparison(*result.comparison);
  std::size_t skipped = 0;
  for (const SweepCell& c : result.cells) skipped += c.skipped ? 1 : 0;
  std::cout << "\n" << result.cells.size() << " cells, " << skipped
            << " resumed, " << result.failures() << " failed; outputs in "
            << options.output_dir << "\n";
  return result.failures() == 0 ? 0 : 1;
}

int cmd_audit(const std::string& csv_out) {
  const auto rows = audit_parameters();
  std::cout << format_audit(rows);
  std::size_t ok = 0;
  for (const AuditRow& r : rows) ok += r.matches ? 1 : 0;
  std::cout << ok << "/" << rows.size() << " within 0.01 M of the published table\n";
  if (!csv_out.empty()) write_text(csv_out, audit_csv(rows));
  return ok == rows.size() ? 0 : 1;
}

int cmd_convert(const std::string& in, const std::string& out,
                const std::string& in_format, const std::string& out_format) {
  const CloudFormat from =
      in_format.empty() ? infer_input_format(in) : parse_cloud_format(in_format);
  const CloudFormat to =
      out_format.empty() ? format_from_path(out) : parse_cloud_format(out_format);
  const Dataset ds = load_clouds(in, from);
  if (to == CloudFormat::kPackedBinary) {
    write_packed(out, ds.clouds);
  } else if (ds.size() == 1 && !fs::is_directory(out) &&
             fs::path(out).has_extension()) {
    if (to == CloudFormat::kAsciiXYZ) {
      write_xyz(out, ds.clouds[0]);
    } else {
      write_ply(out, ds.clouds[0]);
    }
  } else {
    fs::create_directories(out);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "cloud_%05zu", i);
      const std::string path = (fs::path(out) / name).string();
      if (to == CloudFormat::kAsciiXYZ) {
        write_xyz(path + ".xyz", ds.clouds[i]);
      } else {
        write_ply(path + ".ply", ds.clouds[i]);
      }
    }
  }
  std::cout << "converted " << ds.size() << " clouds of "
            << ds.points_per_cloud() << " points\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prae: multi-head point-cloud autoencoder toolkit"};
  app.require_subcommand(1);
  bool quiet = false, verbose = false;
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");
  app.add_flag("-v,--verbose", verbose, "debug logging");

  auto* gen = app.add_subcommand("generate", "write a synthetic desk dataset");
  std::string gen_shapes, gen_out, gen_format;
  std::size_t gen_count = 50, gen_points = 2048;
  std::uint64_t gen_seed = 0;
  gen->add_option("--shapes", gen_shapes, "comma list of categories (default all)");
  gen->add_option("--count", gen_count, "instances per category");
  gen->add_option("--points", gen_points, "points per cloud");
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--out", gen_out, "output file (.pcds) or directory")->required();
  gen->add_option("--format", gen_format, "pcds, xyz or ply");

  auto* tr = app.add_subcommand("train", "train one configuration");
  ConfigFlags train_flags;
  train_flags.attach(tr, true);
  std::optional<std::string> resume;
  double train_emd_scale = 1.0;
  tr->add_option("--resume", resume, "continue from a final.ckpt");
  tr->add_option("--emd-scale", train_emd_scale, "EMD presentation factor");

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  EvalFlags eval_flags;
  ev->add_option("--checkpoint", eval_flags.checkpoint, "checkpoint file");
  ev->add_flag("--identity", eval_flags.identity,
               "score the input itself instead of a model");
  ev->add_option("--config", eval_flags.config_path,
                 "experiment config used to rebuild the dataset and split");
  ev->add_option("--data", eval_flags.data, "cloud file or directory");
  ev->add_option("--data-format", eval_flags.data_format, "xyz, ply or pcds");
  ev->add_option("--split", eval_flags.split, "train, val, test or all");
  ev->add_flag("--no-normalize", eval_flags.no_normalize,
               "use loaded clouds as they are");
  ev->add_option("--emd-mode", eval_flags.emd_mode, "auto, exact, approx or skip");
  ev->add_option("--emd-scale", eval_flags.emd_scale, "EMD presentation factor");
  ev->add_option("--batch-size", eval_flags.batch_size, "inference batch size");
  ev->add_option("--json", eval_flags.json_out, "write the report as JSON");

  auto* cmp = app.add_subcommand("compare", "single- vs multi-head table");
  std::vector<std::string> cmp_records;
  std::string cmp_csv, cmp_out;
  bool cmp_scale = false;
  double cmp_emd_scale = 1.0;
  cmp->add_option("--records", cmp_records, "run_record.json files");
  cmp->add_option("--csv", cmp_csv, "metrics CSV from a sweep");
  cmp->add_flag("--presentation", cmp_scale,
                "scale CD x1e3 and HD x1e2 before comparing");
  cmp->add_option("--emd-scale", cmp_emd_scale, "EMD factor with --presentation");
  cmp->add_option("--out-csv", cmp_out, "also write the table as CSV");

  auto* sw = app.add_subcommand("sweep", "train a depth x heads grid");
  ConfigFlags sweep_flags;
  sweep_flags.attach(sw, false);
  std::string sw_backbones, sw_depths, sw_heads;
  bool sw_resume = false;
  std::size_t sw_parallel = 1;
  sw->add_option("--backbones", sw_backbones, "comma list (default from config)");
  sw->add_option("--depths", sw_depths, "comma list (default 1,2,3,4,5)");
  sw->add_option("--head-counts", sw_heads, "comma list (default 1,2)");
  sw->add_flag("--resume", sw_resume, "skip cells that already finished");
  sw->add_option("--parallel", sw_parallel, "cells trained concurrently");

  auto* au = app.add_subcommand("audit-params", "decoder parameter table");
  std::string au_csv;
  au->add_option("--csv", au_csv, "also write CSV");

  auto* cv = app.add_subcommand("convert", "convert between cloud formats");
  std::string cv_in, cv_out, cv_in_format, cv_out_format;
  cv->add_option("--in", cv_in, "input file or directory")->required();
  cv->add_option("--out", cv_out, "output file or directory")->required();
  cv->add_option("--in-format", cv_in_format, "xyz, ply or pcds");
  cv->add_option("--out-format", cv_out_format, "xyz, ply or pcds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (quiet) set_log_level(LogLevel::kWarning);
  if (verbose) set_log_level(LogLevel::kDebug);

  try {
    if (*gen) {
      return cmd_generate(gen_shapes, gen_count, gen_points, gen_seed, gen_out,
                          gen_format);
    }
    if (*tr) return cmd_train(train_flags, resume, train_emd_scale);
    if (*ev) return cmd_eval(eval_flags);
    if (*cmp) {
      return cmd_compare(cmp_records, cmp_csv, cmp_scale, cmp_emd_scale, cmp_out);
    }
    if (*sw) {
      return cmd_sweep(sweep_flags, sw_backbones, sw_depths, sw_heads, sw_resume,
                       sw_parallel);
    }
    if (*au) return cmd_audit(au_csv);
    if (*cv) return cmd_convert(cv_in, cv_out, cv_in_format, cv_out_format);
  } catch (const prae::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
