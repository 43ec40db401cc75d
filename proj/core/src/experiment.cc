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

#include "prae/experiment.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include <nlohmann/json.hpp>

#include "prae/adam.h"
#include "prae/checkpoint.h"
#include "prae/error.h"
#include "prae/log.h"
#include "prae/loss.h"

namespace prae {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(c));
  return s;
}

json report_json(const MetricsReport& r) {
  return {{"cd", r.cd},
          {"emd", r.emd},
          {"hd", r.hd},
          {"f1", r.f1},
          {"precision", r.precision},
          {"recall", r.recall},
          {"threshold", r.threshold_used},
          {"emd_evaluated", r.emd_evaluated}};
}

MetricsReport report_of(const json& j) {
  MetricsReport r;
  r.cd = j.at("cd").get<double>();
  r.emd = j.at("emd").get<double>();
  r.hd = j.at("hd").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.threshold_used = j.at("threshold").get<double>();
  r.emd_evaluated = j.at("emd_evaluated").get<bool>();
  return r;
}

json history_json(const std::vector<EpochRecord>& epochs) {
  json out = json::array();
  for (const EpochRecord& e : epochs) {
    out.push_back({{"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"eval", report_json(e.eval)}});
  }
  return out;
}

std::vector<EpochRecord> history_of(const json& j) {
  std::vector<EpochRecord> out;
  for (const json& e : j) {
    EpochRecord r;
    r.epoch = e.at("epoch").get<std::size_t>();
    r.train_loss = e.at("train_loss").get<double>();
    r.eval = report_of(e.at("eval"));
    out.push_back(r);
  }
  return out;
}

std::vector<std::string> metric_names(const MetricToggles& t) {
  std::vector<std::string> out;
  if (t.cd) out.push_back("cd");
  if (t.emd) out.push_back("emd");
  if (t.hd) out.push_back("hd");
  if (t.f1) out.push_back("f1");
  return out;
}

}  // namespace

MetricToggles parse_metric_toggles(const std::vector<std::string>& names) {
  MetricToggles t{false, false, false, false};
  for (const std::string& raw : names) {
    const std::string n = lower(raw);
    if (n == "cd") {
      t.cd = true;
    } else if (n == "emd") {
      t.emd = true;
    } else if (n == "hd") {
      t.hd = true;
    } else if (n == "f1") {
      t.f1 = true;
    } else {
      throw ConfigError("unknown metric '" + raw + "' (cd, emd, hd, f1)");
    }
  }
  return t;
}

namespace {

bool metric_enabled(const MetricToggles& t, SelectMetric m) {
  switch (m) {
    case SelectMetric::kCD:
      return t.cd;
    case SelectMetric::kEMD:
      return t.emd;
    case SelectMetric::kHD:
      return t.hd;
    case SelectMetric::kF1:
      return t.f1;
  }
  return false;
}

json config_json(const ExperimentConfig& c, bool with_output) {
  json j = {{"backbone", backbone_name(c.backbone)},
            {"depth", c.depth},
            {"heads", c.heads},
            {"points", c.points},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"learning_rate", c.learning_rate},
            {"seed", c.seed},
            {"data_source", c.data.source},
            {"data_format", c.data.format},
            {"instances", c.data.instances},
            {"categories", c.data.categories},
            {"normalize", c.data.normalize},
            {"data_seed", c.data.seed},
            {"split", c.data.split},
            {"split_seed", c.data.split_seed},
            {"metrics", metric_names(c.metrics)},
            {"emd_mode", emd_mode_name(c.emd_mode)},
            {"select_metric", select_metric_name(c.select_metric)},
            {"select_split", split_name(c.select_split)},
            {"encoder_widths", c.encoder_widths},
            {"hidden_widths", c.hidden_widths},
            {"decoder_batchnorm", c.decoder_batchnorm}};
  if (with_output) j["output_dir"] = c.output_dir;
  return j;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  write_file_bytes(path, std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

MetricOptions epoch_metric_options(const ExperimentConfig& c) {
  MetricOptions o;
  if (!c.metrics.emd) {
    o.emd_mode = EmdMode::kSkip;
  } else if (c.emd_mode == EmdMode::kAuto) {
    o.emd_mode = EmdMode::kApprox;
  } else {
    o.emd_mode = c.emd_mode;
  }
  return o;
}

struct BestState {
  std::size_t epoch = 0;
  MetricsReport report;
};

std::string training_metadata(const MetricsReport& untrained,
                              const std::vector<EpochRecord>& history,
                              const BestState& best) {
  json j = {{"untrained", report_json(untrained)},
            {"history", history_json(history)},
            {"best_epoch", best.epoch},
            {"best", report_json(best.report)}};
  return j.dump();
}

}  // namespace

const char* select_metric_name(SelectMetric m) {
  switch (m) {
    case SelectMetric::kCD:
      return "cd";
    case SelectMetric::kEMD:
      return "emd";
    case SelectMetric::kHD:
      return "hd";
    case SelectMetric::kF1:
      return "f1";
  }
  return "?";
}

SelectMetric parse_select_metric(const std::string& name) {
  const std::string key = lower(name);
  if (key == "cd") return SelectMetric::kCD;
  if (key == "emd") return SelectMetric::kEMD;
  if (key == "hd") return SelectMetric::kHD;
  if (key == "f1") return SelectMetric::kF1;
  throw ConfigError("unknown selection metric '" + name + "' (cd, emd, hd, f1)");
}

bool metric_improves(SelectMetric m, double candidate, double incumbent) {
  return m == SelectMetric::kF1 ? candidate > incumbent : candidate < incumbent;
}

double metric_value(const MetricsReport& r, SelectMetric m) {
  switch (m) {
    case SelectMetric::kCD:
      return r.cd;
    case SelectMetric::kEMD:
      return r.emd;
    case SelectMetric::kHD:
      return r.hd;
    case SelectMetric::kF1:
      return r.f1;
  }
  return r.cd;
}

const char* emd_mode_name(EmdMode mode) {
  switch (mode) {
    case EmdMode::kAuto:
      return "auto";
    case EmdMode::kExact:
      return "exact";
    case EmdMode::kApprox:
      return "approx";
    case EmdMode::kSkip:
      return "skip";
  }
  return "?";
}

EmdMode parse_emd_mode(const std::string& name) {
  const std::string key = lower(name);
  if (key == "auto") return EmdMode::kAuto;
  if (key == "exact") return EmdMode::kExact;
  if (key == "approx") return EmdMode::kApprox;
  if (key == "skip") return EmdMode::kSkip;
  throw ConfigError("unknown EMD mode '" + name + "' (auto, exact, approx, skip)");
}

ExperimentConfig config_from_json(const std::string& text,
                                  ExperimentConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const json known = config_json(c, true);
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) {
      throw ConfigError("unknown config key '" + item.key() + "'");
    }
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) {
        field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
      }
    };
    if (j.contains("backbone")) {
      c.backbone = parse_backbone(j.at("backbone").get<std::string>());
    }
    get("depth", c.depth);
    get("heads", c.heads);
    get("points", c.points);
    get("epochs", c.epochs);
    get("batch_size", c.batch_size);
    get("learning_rate", c.learning_rate);
    get("seed", c.seed);
    get("data_source", c.data.source);
    get("data_format", c.data.format);
    get("instances", c.data.instances);
    get("categories", c.data.categories);
    get("normalize", c.data.normalize);
    get("data_seed", c.data.seed);
    get("split", c.data.split);
    get("split_seed", c.data.split_seed);
    if (j.contains("metrics")) {
      c.metrics = parse_metric_toggles(j.at("metrics").get<std::vector<std::string>>());
    }
    if (j.contains("emd_mode")) {
      c.emd_mode = parse_emd_mode(j.at("emd_mode").get<std::string>());
    }
    if (j.contains("select_metric")) {
      c.select_metric =
          parse_select_metric(j.at("select_metric").get<std::string>());
    }
    if (j.contains("select_split")) {
      c.select_split = parse_split(j.at("select_split").get<std::string>());
    }
    get("encoder_widths", c.encoder_widths);
    get("hidden_widths", c.hidden_widths);
    get("decoder_batchnorm", c.decoder_batchnorm);
    get("output_dir", c.output_dir);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config field has the wrong type: ") +
                      ex.what());
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& config) {
  return config_json(config, true).dump(2);
}

std::string config_hash(const ExperimentConfig& config) {
  return fnv1a_hex(config_json(config, false).dump());
}

ModelSpec model_spec(const ExperimentConfig& c) {
  if (c.backbone != Backbone::kCustom) {
    if (!c.encoder_widths.empty() || !c.hidden_widths.empty() ||
        c.decoder_batchnorm) {
      throw ConfigError(
          "encoder_widths, hidden_widths and decoder_batchnorm apply to the "
          "custom backbone only");
    }
    return standard_spec(c.backbone, c.depth, c.heads, c.points);
  }
  ModelSpec spec;
  spec.encoder.kind = Backbone::kCustom;
  spec.encoder.widths = c.encoder_widths;
  spec.decoder.backbone = Backbone::kCustom;
  spec.decoder.depth = c.depth;
  spec.decoder.heads = c.heads;
  spec.decoder.output_points = c.points;
  spec.decoder.layer_widths = c.hidden_widths;
  if (c.heads > 0) spec.decoder.layer_widths.push_back(c.points / c.heads * 3);
  spec.decoder.use_batchnorm = c.decoder_batchnorm;
  validate(spec);
  return spec;
}

void validate(const ExperimentConfig& c) {
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    throw ConfigError("learning_rate must be > 0");
  }
  if (c.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (c.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (c.backbone == Backbone::kPTv3) {
    throw ConfigError(
        "the PTv3 backbone is available for parameter audits only; train "
        "light-ae, deep-ae or custom");
  }
  const ModelSpec spec = model_spec(c);
  if (spec.encoder.widths.empty()) throw ConfigError("encoder has no layers");
  if (c.data.split.size() != 2 && c.data.split.size() != 3) {
    throw ConfigError("split must list {train, test} or {train, val, test}");
  }
  if (c.select_split == Split::kVal && c.data.split.size() != 3) {
    throw ConfigError("select_split=val needs a three-way split");
  }
  if (!metric_enabled(c.metrics, c.select_metric)) {
    throw ConfigError(std::string("selection metric '") +
                      select_metric_name(c.select_metric) +
                      "' is not among the enabled metrics");
  }
  if (c.data.source == "synthetic" && c.data.instances < 1) {
    throw ConfigError("instances must be >= 1");
  }
}

Dataset prepare_dataset(const ExperimentConfig& c) {
  Dataset ds;
  if (c.data.source == "synthetic") {
    std::vector<int> cats;
    for (const std::string& name : c.data.categories) {
      int found = -1;
      for (int k = 0; k < kDeskCategories; ++k) {
        if (lower(name) == desk_category_name(k)) found = k;
      }
      if (found < 0) throw ConfigError("unknown desk category '" + name + "'");
      cats.push_back(found);
    }
    const auto recipes = desk_recipes(c.data.instances, c.data.seed, cats);
    ds = generate_synthetic(recipes, c.points, c.data.seed);
  } else {
    const CloudFormat format = c.data.format.empty()
                                   ? infer_input_format(c.data.source)
                                   : parse_cloud_format(c.data.format);
    ds = load_clouds(c.data.source, format, c.points);
    if (c.data.normalize) {
      for (PointCloud& cloud : ds.clouds) cloud = normalize(cloud);
      json m = json::parse(ds.manifest_json);
      m["normalized"] = true;
      ds.manifest_json = m.dump();
    }
  }
  split_dataset(ds, c.data.split, c.data.split_seed);
  return ds;
}

std::string RunRecord::to_json(bool include_timing) const {
  json j = {{"config", json::parse(config_json)},
            {"config_hash", hash},
            {"decoder_params", decoder_params},
            {"total_params", total_params},
            {"untrained", report_json(untrained)},
            {"epochs", history_json(epochs)},
            {"best_epoch", best_epoch},
            {"best", report_json(best)},
            {"best_exact", best_exact ? report_json(*best_exact) : json()}};
  if (include_timing) j["wall_clock_seconds"] = wall_clock_seconds;
  return j.dump(2);
}

RunRecord RunRecord::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    RunRecord r;
    r.config_json = j.at("config").dump();
    r.hash = j.at("config_hash").get<std::string>();
    r.decoder_params = j.at("decoder_params").get<std::size_t>();
    r.total_params = j.at("total_params").get<std::size_t>();
    r.untrained = report_of(j.at("untrained"));
    r.epochs = history_of(j.at("epochs"));
    r.best_epoch = j.at("best_epoch").get<std::size_t>();
    r.best = report_of(j.at("best"));
    if (!j.at("best_exact").is_null()) r.best_exact = report_of(j.at("best_exact"));
    if (j.contains("wall_clock_seconds")) {
      r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    }
    return r;
  } catch (const json::exception& ex) {
    throw IoError(std::string("malformed run record: ") + ex.what());
  }
}

RunRecord load_run_record(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return RunRecord::from_json(std::string(bytes.begin(), bytes.end()));
  } catch (const IoError& ex) {
    throw IoError(path + ": " + ex.what());
  }
}

Reconstructor model_reconstructor(Model& model) {
  return [&model](const Tensor& batch) {
    return model.reconstruct(batch, Mode::kEval);
  };
}

Reconstructor identity_reconstructor() {
  return [](const Tensor& batch) {
    const std::size_t b = batch.dim(0), n = batch.dim(2);
    Tensor out({b, n, 3});
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t a = 0; a < 3; ++a) out.at(i, k, a) = batch.at(i, a, k);
      }
    }
    return out;
  };
}

MetricsReport evaluate_clouds(const Reconstructor& reconstruct,
                              const Dataset& dataset,
                              const std::vector<std::size_t>& indices,
                              const MetricOptions& options,
                              std::size_t batch_size) {
  if (indices.empty()) throw ConfigError("evaluation split is empty");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  std::vector<PointCloud> preds, gts;
  preds.reserve(indices.size());
  for (std::size_t start = 0; start < indices.size(); start += batch_size) {
    const std::size_t end = std::min(indices.size(), start + batch_size);
    std::vector<PointCloud> clouds;
    for (std::size_t i = start; i < end; ++i) {
      clouds.push_back(dataset.clouds[indices[i]]);
    }
    const Tensor out = reconstruct(to_channels(clouds));
    if (out.rank() != 3 || out.dim(0) != clouds.size() || out.dim(2) != 3) {
      throw DimensionError("reconstruction must be [B,K,3], got " +
                           shape_string(out.shape()));
    }
    for (std::size_t b = 0; b < clouds.size(); ++b) {
      preds.push_back(PointCloud::from_rows(out, b));
      gts.push_back(std::move(clouds[b]));
    }
  }
  return evaluate_pairs(preds, gts, options);
}

RunRecord train(const ExperimentConfig& config, const TrainOptions& options,
                const Dataset* prepared) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();
  const ModelSpec spec = model_spec(config);

  Dataset owned;
  if (!prepared) owned = prepare_dataset(config);
  const Dataset& ds = prepared ? *prepared : owned;
  ds.validate();
  if (ds.points_per_cloud() != config.points) {
    throw ConfigError("dataset has K=" + std::to_string(ds.points_per_cloud()) +
                      " points per cloud but the model expects K=" +
                      std::to_string(config.points));
  }
  const std::vector<std::size_t> train_idx = ds.indices(Split::kTrain);
  const std::vector<std::size_t> eval_idx = ds.indices(config.select_split);
  if (train_idx.empty()) throw ConfigError("training split is empty");
  if (eval_idx.empty()) {
    throw ConfigError(std::string("selection split '") +
                      split_name(config.select_split) + "' is empty");
  }
  if (config.select_split == Split::kTest) {
    log_warning(
        "selecting the best epoch on the test split leaks test data into "
        "model selection; use select_split=val for an unbiased estimate");
  }

  fs::create_directories(config.output_dir);
  const std::string best_path = (fs::path(config.output_dir) / "best.ckpt").string();
  const std::string final_path =
      (fs::path(config.output_dir) / "final.ckpt").string();

  AdamHyper hyper;
  hyper.lr = config.learning_rate;
  Model model = build_model(spec, config.seed);
  Adam<float> adam(hyper, model.parameters());
  const MetricOptions metric_opts = epoch_metric_options(config);

  RunRecord record;
  record.config_json = config_json(config, true).dump();
  record.hash = config_hash(config);
  record.decoder_params = count_parameters(model);
  record.total_params = count_all_parameters(model);

  BestState best;
  std::size_t start_epoch = 0;
  if (options.resume_from) {
    Checkpoint ckpt = load_checkpoint(*options.resume_from);
    if (!ckpt.training) {
      throw ConfigError(*options.resume_from +
                        " holds no training state and cannot be resumed");
    }
    if (!(ckpt.model.spec() == spec)) {
      throw ConfigError(*options.resume_from +
                        " was trained with a different model configuration");
    }
    if (ckpt.training->hyper.lr != hyper.lr) {
      throw ConfigError(*options.resume_from +
                        " was trained with a different learning rate");
    }
    model = std::move(ckpt.model);
    adam = Adam<float>(hyper, model.parameters());
    adam.states() = ckpt.training->adam;
    start_epoch = ckpt.training->epoch;
    try {
      const json meta = json::parse(ckpt.training->metadata_json);
      record.untrained = report_of(meta.at("untrained"));
      record.epochs = history_of(meta.at("history"));
      best.epoch = meta.at("best_epoch").get<std::size_t>();
      best.report = report_of(meta.at("best"));
    } catch (const json::exception& ex) {
      throw IoError(*options.resume_from +
                    ": training metadata is malformed: " + ex.what());
    }
    const fs::path prior_best =
        fs::path(*options.resume_from).parent_path() / "best.ckpt";
    std::error_code ec;
    if (best.epoch > 0 && fs::exists(prior_best) &&
        !fs::equivalent(prior_best, best_path, ec)) {
      fs::copy_file(prior_best, best_path, fs::copy_options::overwrite_existing);
    } else if (best.epoch > 0 && !fs::exists(prior_best)) {
      log_warning("no best.ckpt next to the resumed checkpoint; best weights "
                  "before epoch " + std::to_string(start_epoch + 1) +
                  " are unavailable");
    }
    log_info("resuming after epoch " + std::to_string(start_epoch));
  } else {
    record.untrained = evaluate_clouds(model_reconstructor(model), ds, eval_idx,
                                       metric_opts, config.batch_size);
  }

  const bool drop_singletons = spec.decoder.use_batchnorm;
  for (std::size_t epoch = start_epoch + 1; epoch <= config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t seen = 0;
    const std::vector<Batch> plan =
        batches(ds, Split::kTrain, config.batch_size, config.seed, epoch);
    for (std::size_t b = 0; b < plan.size(); ++b) {
      const Batch& batch = plan[b];
      const std::size_t size = batch.indices.size();
      if (drop_singletons && size == 1) continue;
      try {
        model.zero_grad();
        const std::vector<Tensor> heads =
            model.forward_heads(batch.points, Mode::kTrain, true);
        BatchLoss<float> loss = batch_multihead_chamfer_loss(batch.points, heads);
        if (!std::isfinite(loss.loss)) throw NumericError("loss is not finite");
        model.backward(loss.head_grads);
        adam.step(model.parameters());
        loss_sum += loss.loss * static_cast<double>(size);
        seen += size;
      } catch (const NumericError& ex) {
        char lr[32];
        std::snprintf(lr, sizeof(lr), "%g", config.learning_rate);
        throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(b + 1) + " (lr " + lr +
                           "): " + ex.what());
      }
    }
    if (seen == 0) throw ConfigError("no usable training batch");

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(seen);
    rec.eval = evaluate_clouds(model_reconstructor(model), ds, eval_idx,
                               metric_opts, config.batch_size);
    record.epochs.push_back(rec);

    const double value = metric_value(rec.eval, config.select_metric);
    if (best.epoch == 0 ||
        metric_improves(config.select_metric, value,
                        metric_value(best.report, config.select_metric))) {
      best.epoch = epoch;
      best.report = rec.eval;
      save_checkpoint(best_path, model);
    }
    if (options.on_epoch) options.on_epoch(rec);
  }

  TrainingState state;
  state.epoch = std::max(start_epoch, config.epochs);
  state.hyper = hyper;
  state.adam = adam.states();
  state.metadata_json = training_metadata(record.untrained, record.epochs, best);
  save_checkpoint(final_path, model, &state);

  record.best_epoch = best.epoch;
  record.best = best.report;
  if (config.metrics.emd && config.emd_mode != EmdMode::kSkip &&
      config.points <= kExactEmdLimit && fs::exists(best_path)) {
    Checkpoint best_ckpt = load_checkpoint(best_path);
    MetricOptions exact = metric_opts;
    exact.emd_mode = EmdMode::kExact;
    record.best_exact = evaluate_clouds(model_reconstructor(best_ckpt.model), ds,
                                        eval_idx, exact, config.batch_size);
  }
  record.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  write_text((fs::path(config.output_dir) / "run_record.json").string(),
             record.to_json());
  return record;
}

MetricsReport scaled(const MetricsReport& report, const PresentationScale& s) {
  MetricsReport out = report;
  out.cd *= s.cd;
  out.emd *= s.emd;
  out.hd *= s.hd;
  return out;
}

std::string format_report(const MetricsReport& r, const MetricToggles& shown) {
  std::string out;
  char buf[64];
  auto add = [&](const char* name, double v) {
    std::snprintf(buf, sizeof(buf), "%s%s=%.6g", out.empty() ? "" : " ", name, v);
    out += buf;
  };
  if (shown.cd) add("CD", r.cd);
  if (shown.emd) {
    if (r.emd_evaluated) {
      add("EMD", r.emd);
    } else {
      out += out.empty() ? "EMD=skipped" : " EMD=skipped";
    }
  }
  if (shown.hd) add("HD", r.hd);
  if (shown.f1) add("F1", r.f1);
  return out;
}

std::string report_to_json(const MetricsReport& report) {
  return report_json(report).dump();
}

MetricsReport report_from_json(const std::string& text) {
  try {
    return report_of(json::parse(text));
  } catch (const json::exception& ex) {
    throw IoError(std::string("malformed metrics report: ") + ex.what());
  }
}

}  // namespace prae
