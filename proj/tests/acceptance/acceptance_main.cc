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

// Acceptance suite: one PASS/FAIL line per criterion, exit 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "../test_util.h"
#include "prae/adam.h"
#include "prae/audit.h"
#include "prae/checkpoint.h"
#include "prae/comparison.h"
#include "prae/error.h"
#include "prae/experiment.h"
#include "prae/log.h"
#include "prae/loss.h"
#include "prae/metrics.h"
#include "prae/nearest.h"
#include "prae/sweep.h"

namespace prae {
namespace {

namespace fs = std::filesystem;
using testing::finite_difference_error;
using testing::naive_nearest;
using testing::permutation_minimum;
using testing::random_points;
using testing::random_tensor;
using DTensor = BasicTensor<double>;

// Collects failed checks of one criterion.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return failures_.empty(); }
  std::string summary() const {
    std::string out;
    const auto& items = failures_.empty() ? notes_ : failures_;
    for (std::size_t i = 0; i < items.size() && i < 6; ++i) {
      out += (i ? "; " : "") + items[i];
    }
    if (items.size() > 6) out += "; +" + std::to_string(items.size() - 6) + " more";
    return out;
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string num(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1. Decoder parameter table.
void parameter_counts(Checks& c) {
  const std::vector<AuditRow> rows = audit_parameters();
  c.expect(rows.size() == 30, "expected 30 rows, got " + std::to_string(rows.size()));
  int matched = 0;
  for (const AuditRow& r : rows) {
    if (r.matches) {
      ++matched;
    } else {
      c.expect(false, std::string(backbone_name(r.backbone)) + " d" +
                          std::to_string(r.depth) + " M" + std::to_string(r.heads) +
                          ": " + std::to_string(r.computed));
    }
  }
  struct Anchor {
    Backbone b;
    int depth;
    double single, multi;
  };
  const Anchor anchors[] = {{Backbone::kLightAE, 1, 0.79, 0.79},
                            {Backbone::kLightAE, 2, 1.61, 1.65},
                            {Backbone::kDeepAE, 1, 6.30, 6.30},
                            {Backbone::kDeepAE, 5, 9.45, 12.60},
                            {Backbone::kPTv3, 2, 1.71, 1.84}};
  for (const Anchor& a : anchors) {
    for (std::size_t heads : {1u, 2u}) {
      const double want = heads == 1 ? a.single : a.multi;
      const double got =
          std::round(decoder_parameter_count(standard_spec(a.b, a.depth, heads)) /
                     1e4) / 100.0;
      c.expect(std::abs(got - want) <= 0.01 + 1e-9,
               std::string(backbone_name(a.b)) + " d" + std::to_string(a.depth) +
                   " M" + std::to_string(heads) + " = " + num(got, "%.2f") +
                   " vs " + num(want, "%.2f"));
    }
  }
  c.note(std::to_string(matched) + "/30 entries within 0.01 M");
}

// 2. Exact EMD, nearest-neighbor index and auction against oracles.
void metric_oracles(Checks& c) {
  std::mt19937_64 rng(2024);
  int emd_ok = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 7;
    const auto p = random_points(n, rng);
    const auto q = random_points(n, rng);
    const Assignment a = emd_exact(PointCloud(p), PointCloud(q));
    // Recompute the cost of the returned bijection in the oracle's
    // summation order so that equality is exact.
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += squared_distance(p[i], q[a.mapping[i]]);
    const double oracle = permutation_minimum(p, q);
    const bool ok = is_permutation_mapping(a.mapping) &&
                    sum / static_cast<double>(n) == oracle &&
                    std::abs(a.total_cost - oracle) <= 1e-12;
    c.expect(ok, "emd_exact n=" + std::to_string(n) + " " + num(a.total_cost) +
                     " vs " + num(oracle));
    emd_ok += ok;
  }
  int nn_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const auto from = random_points(1 + rng() % 100, rng);
    const auto to = random_points(1 + rng() % 100, rng);
    const auto fast = nearest_neighbors<float>(from, to, NNBackend::kSpatialIndex);
    bool ok = true;
    for (std::size_t i = 0; i < from.size(); ++i) {
      const auto [idx, d] = naive_nearest(from[i], to);
      ok = ok && fast[i].index == idx && std::abs(fast[i].sq_distance - d) <= 1e-12;
    }
    c.expect(ok, "kd-tree pair " + std::to_string(t));
    nn_ok += ok;
  }
  double worst = 0.0;
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + rng() % 63;
    const PointCloud p(random_points(n, rng));
    const PointCloud q(random_points(n, rng));
    const double exact = emd_exact(p, q).total_cost;
    const double rel = std::abs(emd_approx(p, q).total_cost - exact) / exact;
    worst = std::max(worst, rel);
    c.expect(rel < 0.02, "emd_approx n=" + std::to_string(n) + " rel " + num(rel));
  }
  c.note("emd_exact " + std::to_string(emd_ok) + "/200, NN " +
         std::to_string(nn_ok) + "/100, auction worst rel " + num(worst, "%.2e"));
}

// 3. Hand-computed fixtures.
void metric_fixtures(Checks& c) {
  auto near = [&](double got, double want, const std::string& what) {
    c.expect(std::abs(got - want) <= 1e-9, what + " = " + num(got, "%.12g"));
  };
  const PointCloud origin({{0, 0, 0}});
  const PointCloud two({{0, 0, 0}, {1, 0, 0}});
  near(chamfer(origin, PointCloud({{3, 4, 0}})), 50.0, "CD single pair");
  near(chamfer(two, origin), 0.5, "CD two-vs-one");
  near(chamfer(two, two), 0.0, "CD identity");
  near(hausdorff(two, origin), 1.0, "HD two-vs-one");
  near(hausdorff(two, two), 0.0, "HD identity");
  const PointCloud gt({{0, 0, 0}, {10, 0, 0}});
  const F1Result f = f1_score(PointCloud({{0, 0, 0}, {5, 0, 0}}), gt);
  near(f.threshold, 0.1, "F1 threshold");
  near(f.precision, 0.5, "precision");
  near(f.recall, 0.5, "recall");
  near(f.f1, 0.5, "F1");
  near(f1_score(gt, gt).f1, 1.0, "F1 identity");
  near(f1_score(PointCloud({{0, 3, 0}, {10, 3, 0}}), gt).f1, 0.0, "F1 far");
  const PointCloud p({{0, 0, 0}, {2, 0, 0}});
  const PointCloud q({{1, 0, 0}, {3, 0, 0}});
  near(emd_exact(p, q).total_cost, 1.0, "EMD straight pairing");
  near((squared_distance(p[0], q[1]) + squared_distance(p[1], q[0])) / 2, 5.0,
       "EMD cross pairing");
  near(emd_approx(p, q).total_cost, 1.0, "EMD approx");
  near(emd_exact(p, p).total_cost, 0.0, "EMD identity");
  near(nn_distances(origin, PointCloud({{1, 2, 2}}), NNBackend::kBruteForce)[0],
       9.0, "NN single pair");
  c.note("CD 50 and 0.5, HD 1, F1 0.5 at tau 0.1, EMD 1 vs 5");
}

// Finite-difference check of a layer stack under loss = sum(w * out).
double stack_error(Sequential<double>& net, const DTensor& input, Mode mode,
                   std::mt19937_64& rng, double h) {
  DTensor x = input;
  const DTensor probe = net.forward(x, mode, false);
  const DTensor w = random_tensor<double>(probe.shape(), rng);
  net.zero_grad();
  net.forward(x, mode, true);
  const DTensor gx = net.backward(w);
  auto loss = [&]() {
    const DTensor out = net.forward(x, mode, false);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * w[i];
    return s;
  };
  double worst = finite_difference_error(loss, x.values(), gx.values(), h);
  for (const ParamRef<double>& p : net.parameters("p")) {
    const DTensor analytic = *p.grad;
    worst = std::max(worst, finite_difference_error(loss, p.value->values(),
                                                    analytic.values(), h));
  }
  return worst;
}

LayerParams<double> randomized(LayerParams<double> p, std::mt19937_64& rng) {
  if (p.is_linear()) {
    // He-uniform weights, small random biases.
    const double bound = std::sqrt(6.0 / static_cast<double>(p.in_features()));
    p.weight = random_tensor<double>(p.weight.shape(), rng, -bound, bound);
    p.bias = random_tensor<double>(p.bias.shape(), rng, -0.1, 0.1);
  } else if (p.kind == LayerKind::kBatchNorm) {
    p.weight = random_tensor<double>(p.weight.shape(), rng, 0.5, 1.5);
    p.bias = random_tensor<double>(p.bias.shape(), rng);
    p.running_mean = random_tensor<double>(p.running_mean.shape(), rng);
    p.running_var = random_tensor<double>(p.running_var.shape(), rng, 0.5, 2.0);
  }
  return p;
}

ModelSpec tiny_spec(std::size_t heads) {
  ModelSpec spec;
  spec.encoder.kind = Backbone::kCustom;
  spec.encoder.widths = {16, 16};
  spec.decoder.backbone = Backbone::kCustom;
  spec.decoder.depth = 2;
  spec.decoder.heads = heads;
  spec.decoder.output_points = 32;
  spec.decoder.layer_widths = {24, 32 / heads * 3};
  return spec;
}

// 4. Analytic gradients against central differences.
void gradients(Checks& c) {
  constexpr int kInstances = 20;
  constexpr double kTol = 1e-3;
  constexpr double kStep = 1e-6;
  std::mt19937_64 rng(4);
  std::vector<std::pair<std::string, double>> worst;
  auto record = [&](const std::string& name, double err) {
    auto it = std::find_if(worst.begin(), worst.end(),
                           [&](const auto& w) { return w.first == name; });
    if (it == worst.end()) {
      worst.emplace_back(name, err);
    } else {
      it->second = std::max(it->second, err);
    }
  };

  for (int i = 0; i < kInstances; ++i) {
    {
      Sequential<double> net;
      net.add(randomized(LayerParams<double>::pointwise_linear(3, 5), rng));
      record("pointwise", stack_error(net, random_tensor<double>({2, 3, 6}, rng),
                                      Mode::kTrain, rng, kStep));
    }
    {
      Sequential<double> net;
      net.add(randomized(LayerParams<double>::dense(6, 4), rng));
      record("dense", stack_error(net, random_tensor<double>({3, 6}, rng),
                                  Mode::kTrain, rng, kStep));
    }
    for (Mode mode : {Mode::kTrain, Mode::kEval}) {
      Sequential<double> net;
      net.add(randomized(LayerParams<double>::batchnorm(4), rng));
      record("batchnorm", stack_error(net, random_tensor<double>({3, 4, 5}, rng),
                                      mode, rng, kStep));
      Sequential<double> flat;
      flat.add(randomized(LayerParams<double>::batchnorm(4), rng));
      record("batchnorm", stack_error(flat, random_tensor<double>({5, 4}, rng),
                                      mode, rng, kStep));
    }
    {
      Sequential<double> net;
      net.add(LayerParams<double>::relu());
      DTensor x = random_tensor<double>({2, 4, 5}, rng);
      for (double& v : x.values()) {
        if (std::abs(v) < 0.01) v = v < 0 ? -0.5 : 0.5;
      }
      record("relu", stack_error(net, x, Mode::kTrain, rng, kStep));
    }
    {
      Sequential<double> net;
      net.add(LayerParams<double>::max_pool_points());
      DTensor x({2, 3, 6});
      std::vector<double> grid(6);
      for (std::size_t b = 0; b < 2; ++b) {
        for (std::size_t ch = 0; ch < 3; ++ch) {
          for (std::size_t n = 0; n < 6; ++n) grid[n] = 0.1 * double(n) - 0.25;
          std::shuffle(grid.begin(), grid.end(), rng);
          for (std::size_t n = 0; n < 6; ++n) x.at(b, ch, n) = grid[n];
        }
      }
      record("maxpool", stack_error(net, x, Mode::kTrain, rng, kStep));
    }
    {
      // Composed three-layer stack.
      Sequential<double> net;
      net.add(randomized(LayerParams<double>::pointwise_linear(3, 6), rng));
      net.add(LayerParams<double>::relu());
      net.add(randomized(LayerParams<double>::pointwise_linear(6, 5), rng));
      net.add(LayerParams<double>::max_pool_points());
      net.add(randomized(LayerParams<double>::dense(5, 4), rng));
      record("3-layer stack", stack_error(net, random_tensor<double>({2, 3, 8}, rng),
                                          Mode::kTrain, rng, kStep));
    }
    {
      // Encoder and decoder composed under the multi-head loss.
      const std::size_t heads = std::size_t{1} << (i % 3);
      BasicModel<double> m = BasicModel<double>::build(tiny_spec(heads), 50 + i);
      const DTensor x = random_tensor<double>({2, 3, 32}, rng);
      auto loss = [&]() {
        return batch_multihead_chamfer_loss(x, m.forward_heads(x, Mode::kTrain),
                                            false)
            .loss;
      };
      m.zero_grad();
      const auto out = m.forward_heads(x, Mode::kTrain, true);
      const BatchLoss<double> l = batch_multihead_chamfer_loss(x, out);
      m.backward(l.head_grads);
      double err = 0.0;
      for (const ParamRef<double>& p : m.parameters()) {
        const DTensor analytic = *p.grad;
        err = std::max(err, finite_difference_error(loss, p.value->values(),
                                                    analytic.values(), kStep));
      }
      record("encoder-decoder", err);
    }
    for (std::size_t heads : {1u, 2u, 4u}) {
      // Loss gradient with respect to the predicted points.
      std::vector<std::vector<Point3<double>>> q(heads);
      std::vector<Point3<double>> gt(16);
      std::uniform_real_distribution<double> u(-1, 1);
      for (auto& p : gt) p = {u(rng), u(rng), u(rng)};
      for (auto& h : q) {
        h.resize(16 / heads);
        for (auto& p : h) p = {u(rng), u(rng), u(rng)};
      }
      auto eval = [&](std::vector<std::vector<Point3<double>>>* g) {
        std::vector<std::span<const Point3<double>>> views(q.begin(), q.end());
        std::vector<std::span<Point3<double>>> gv;
        if (g) {
          g->assign(heads, {});
          for (std::size_t h = 0; h < heads; ++h) {
            (*g)[h].assign(q[h].size(), Point3<double>{});
            gv.emplace_back((*g)[h]);
          }
        }
        return multihead_chamfer_sample<double>(gt, views, g ? &gv : nullptr, 1.0,
                                                NNBackend::kSpatialIndex);
      };
      std::vector<std::vector<Point3<double>>> g;
      eval(&g);
      double err = 0.0;
      for (std::size_t h = 0; h < heads; ++h) {
        err = std::max(err, finite_difference_error(
                                [&]() { return eval(nullptr); },
                                std::span<double>(q[h].front().data(), q[h].size() * 3),
                                std::span<const double>(g[h].front().data(),
                                                        g[h].size() * 3),
                                kStep));
      }
      record("loss M=" + std::to_string(heads), err);
    }
  }
  std::string notes;
  for (const auto& [name, err] : worst) {
    c.expect(err < kTol, name + " rel error " + num(err, "%.2e"));
    notes += (notes.empty() ? "" : ", ") + name + " " + num(err, "%.1e");
  }
  c.note("worst relative error over 20 instances: " + notes);
}

// 5. The multi-head loss with one head is the Chamfer distance.
void single_head_reduction(Checks& c) {
  std::mt19937_64 rng(5);
  int equal = 0;
  for (int t = 0; t < 100; ++t) {
    const PointCloud p(random_points(1 + rng() % 200, rng));
    const PointCloud q(random_points(1 + rng() % 200, rng));
    const std::vector<PointCloud> heads{q};
    const double a = multihead_chamfer_loss(p, heads).loss;
    const double b = chamfer(p, q);
    c.expect(a == b, "pair " + std::to_string(t) + ": " + num(a, "%.17g") +
                         " vs " + num(b, "%.17g"));
    equal += a == b;
  }
  c.note(std::to_string(equal) + "/100 pairs bit-identical");
}

struct Runs {
  std::string root;
  std::optional<RunRecord> single, multi;
  std::string single_dir, multi_dir;
};

// Run record with the output directory blanked.
std::string portable_json(RunRecord r) {
  ExperimentConfig c = config_from_json(r.config_json);
  c.output_dir.clear();
  r.config_json = config_to_json(c);
  return r.to_json(false);
}

ExperimentConfig desk_config(const std::string& out, std::size_t heads) {
  ExperimentConfig c;
  c.backbone = Backbone::kLightAE;
  c.depth = 3;
  c.heads = heads;
  c.points = 256;
  c.epochs = 30;
  c.data.instances = 50;
  c.output_dir = out;
  return c;
}

// 6. Desk-scale training.
void training_sanity(Checks& c, Runs& runs, const Dataset& ds) {
  for (std::size_t heads : {1u, 2u}) {
    const std::string dir = runs.root + "/train_m" + std::to_string(heads);
    const RunRecord r = train(desk_config(dir, heads), {}, &ds);
    (heads == 1 ? runs.single : runs.multi) = r;
    (heads == 1 ? runs.single_dir : runs.multi_dir) = dir;
    const double first = r.epochs.front().train_loss;
    const double last = r.epochs.back().train_loss;
    const double ratio = r.untrained.cd / r.best.cd;
    const std::string tag = "M=" + std::to_string(heads);
    c.expect(r.epochs.size() == 30, tag + " ran " + std::to_string(r.epochs.size()) +
                                        " epochs");
    c.expect(last < 0.1 * first, tag + " loss " + num(first) + " -> " + num(last));
    c.expect(std::isfinite(r.best.cd) && ratio >= 5.0,
             tag + " untrained CD " + num(r.untrained.cd) + " best " + num(r.best.cd));
    c.note(tag + ": loss " + num(first, "%.4g") + " -> " + num(last, "%.4g") +
           " (" + num(100 * last / first, "%.1f") + "%), test CD " +
           num(r.untrained.cd, "%.4g") + " -> " + num(r.best.cd, "%.4g") + " (" +
           num(ratio, "%.1f") + "x, epoch " + std::to_string(r.best_epoch) + ")");
  }
}

// 7. Repeated runs are bit-identical.
void determinism(Checks& c, Runs& runs, const Dataset& ds) {
  if (!runs.single) {
    c.expect(false, "criterion 6 produced no reference run");
    return;
  }
  const std::string dir = runs.root + "/repeat_m1";
  const RunRecord again = train(desk_config(dir, 1), {}, &ds);
  bool same_curve = again.epochs.size() == runs.single->epochs.size();
  for (std::size_t i = 0; same_curve && i < again.epochs.size(); ++i) {
    same_curve = again.epochs[i].train_loss == runs.single->epochs[i].train_loss &&
                 again.epochs[i].eval == runs.single->epochs[i].eval;
  }
  c.expect(same_curve, "per-epoch curves differ");
  const std::uint32_t a = file_crc32(runs.single_dir + "/best.ckpt");
  const std::uint32_t b = file_crc32(dir + "/best.ckpt");
  c.expect(a == b, "best.ckpt CRC " + num(a, "%.0f") + " vs " + num(b, "%.0f"));
  c.expect(portable_json(again) == portable_json(*runs.single),
           "run records differ");
  char crc[16];
  std::snprintf(crc, sizeof(crc), "%08x", a);
  c.note("30 identical losses, best.ckpt CRC " + std::string(crc) + " twice");
}

// 8. Checkpoint round trip and split-run equivalence.
void checkpoint_round_trip(Checks& c, Runs& runs, const Dataset& ds) {
  if (!runs.single) {
    c.expect(false, "criterion 6 produced no reference run");
    return;
  }
  const ExperimentConfig config = desk_config(runs.single_dir, 1);
  const std::vector<std::size_t> test = ds.indices(Split::kTest);

  // The best epoch was scored in memory during training; the reloaded
  // best.ckpt must reproduce that report exactly.
  Checkpoint best = load_checkpoint(runs.single_dir + "/best.ckpt");
  MetricOptions epoch_opts;
  epoch_opts.emd_mode = EmdMode::kApprox;
  const MetricsReport reloaded = evaluate_clouds(model_reconstructor(best.model), ds,
                                                 test, epoch_opts, config.batch_size);
  c.expect(reloaded == runs.single->best, "reloaded best.ckpt metrics differ");

  // save -> load -> eval on a second copy.
  const std::string copy = runs.root + "/roundtrip.ckpt";
  save_checkpoint(copy, best.model);
  Checkpoint again = load_checkpoint(copy);
  MetricOptions exact;
  exact.emd_mode = EmdMode::kExact;
  const MetricsReport r1 = evaluate_clouds(model_reconstructor(best.model), ds, test,
                                           exact, config.batch_size);
  const MetricsReport r2 = evaluate_clouds(model_reconstructor(again.model), ds, test,
                                           exact, config.batch_size);
  c.expect(r1 == r2, "save/load changed metrics");
  c.expect(runs.single->best_exact && r1 == *runs.single->best_exact,
           "exact re-score differs from the run record");

  // 15 + 15 epochs against the uninterrupted 30.
  const std::string dir = runs.root + "/split_m1";
  ExperimentConfig half = desk_config(dir, 1);
  half.epochs = 15;
  train(half, {}, &ds);
  TrainOptions resume;
  resume.resume_from = dir + "/final.ckpt";
  const RunRecord resumed = train(desk_config(dir, 1), resume, &ds);
  c.expect(read_file_bytes(dir + "/final.ckpt") ==
               read_file_bytes(runs.single_dir + "/final.ckpt"),
           "final.ckpt bytes differ");
  c.expect(read_file_bytes(dir + "/best.ckpt") ==
               read_file_bytes(runs.single_dir + "/best.ckpt"),
           "best.ckpt bytes differ");
  c.expect(portable_json(resumed) == portable_json(*runs.single),
           "resumed run record differs");
  bool epoch16 = resumed.epochs.size() == 30 &&
                 resumed.epochs[15].train_loss == runs.single->epochs[15].train_loss;
  c.expect(epoch16, "epoch-16 loss differs after resume");
  c.note("reloaded metrics bit-identical; 15+15 final.ckpt equals 30-epoch bytes");
}

// 9. Published delta arithmetic and a full desk sweep.
void comparison_and_sweep(Checks& c, const std::string& root) {
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
    rows.push_back({"Light-AE", d + 1, 2, 0, multi[d][0], multi[d][1], multi[d][2],
                    multi[d][3]});
  }
  // Through the CSV path that the compare command reads.
  const ComparisonTable t = build_comparison(parse_metric_rows_csv(metric_rows_csv(rows)));
  const ComparisonRow& d3 = t.rows.at(2);
  c.expect(num(d3.delta[0], "%+.2f") == "-0.11", "d3 CD delta " + num(d3.delta[0]));
  c.expect(num(d3.percent[0], "%+.2f") == "+3.34", "d3 CD change " + num(d3.percent[0]));
  c.expect(num(d3.delta[1], "%+.2f") == "-34.48", "d3 EMD delta " + num(d3.delta[1]));
  c.expect(num(d3.delta[3], "%+.2f") == "+0.80", "d3 F1 delta " + num(d3.delta[3]));
  const std::string text = format_comparison(t);
  c.expect(text.find("+3.34%+") != std::string::npos, "formatted table lacks +3.34%");
  // Every delta of the block.
  for (int d = 0; d < 5; ++d) {
    for (int m = 0; m < 4; ++m) {
      const double want = multi[d][m] - single[d][m];
      c.expect(std::abs(t.rows[d].delta[m] - want) < 1e-12,
               "delta d" + std::to_string(d + 1) + " metric " + std::to_string(m));
    }
  }

  SweepOptions opts;
  opts.base.points = 256;
  opts.base.epochs = 10;
  opts.base.data.instances = 20;
  opts.backbones = {Backbone::kLightAE, Backbone::kDeepAE};
  opts.output_dir = root + "/sweep";
  const auto started = std::chrono::steady_clock::now();
  const SweepResult r = run_sweep(opts);
  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() /
      60.0;
  c.expect(r.failures() == 0, std::to_string(r.failures()) + " sweep cells failed");
  c.expect(r.rows.size() == 20, "sweep rows " + std::to_string(r.rows.size()));
  c.expect(r.comparison && r.comparison->rows.size() == 10, "comparison rows");
  bool finite = true;
  if (r.comparison) {
    for (const ComparisonRow& row : r.comparison->rows) {
      for (int m = 0; m < 4; ++m) {
        finite = finite && std::isfinite(row.single[m]) && std::isfinite(row.multi[m]) &&
                 std::isfinite(row.percent[m]) &&
                 row.improved[m] == (m == 3 ? row.delta[m] > 0 : row.delta[m] < 0);
      }
    }
  }
  c.expect(finite, "comparison table has non-finite or inconsistent entries");
  const fs::path out = opts.output_dir;
  const auto csv_rows = parse_metric_rows_csv(slurp(out / "metrics.csv"));
  c.expect(csv_rows == r.rows, "metrics.csv does not round-trip");
  c.expect(format_comparison(build_comparison(csv_rows)) == slurp(out / "comparison.txt"),
           "comparison.txt differs from the table re-derived from CSV");
  int plots = 0;
  for (const char* metric : {"cd", "emd", "hd", "f1"}) {
    for (const char* axis : {"depth", "params"}) {
      const std::string svg =
          slurp(out / (std::string(metric) + "_vs_" + axis + ".svg"));
      const bool ok = svg.find("<svg") != std::string::npos &&
                      svg.find("</svg>") != std::string::npos;
      c.expect(ok, std::string(metric) + "_vs_" + axis + ".svg malformed");
      plots += ok;
    }
  }
  if (r.comparison) {
    std::string means;
    for (int m = 0; m < 4; ++m) {
      means += std::string(m ? ", " : "") + kMetricNames[m] + " " +
               num(r.comparison->mean_percent[m], "%+.2f") + "%";
    }
    c.note("fixture d3 CD -0.11 / +3.34%; sweep 20 cells in " + num(minutes, "%.1f") +
           " min, " + std::to_string(plots) + " plots, mean change " + means);
  }
}

}  // namespace
}  // namespace prae

int main(int argc, char** argv) {
  using namespace prae;
  CLI::App app{"acceptance criteria"};
  std::string work = (fs::temp_directory_path() / "prae_acceptance").string();
  std::vector<int> only;
  app.add_option("--work-dir", work, "scratch directory");
  app.add_option("--only", only, "criterion numbers to run");
  CLI11_PARSE(app, argc, argv);
  set_log_level(LogLevel::kError);
  fs::remove_all(work);
  fs::create_directories(work);

  Runs runs;
  runs.root = work;
  std::optional<Dataset> desk;
  auto desk_data = [&]() -> const Dataset& {
    if (!desk) desk = prepare_dataset(desk_config(work, 1));
    return *desk;
  };

  struct Criterion {
    int id;
    const char* name;
    std::function<void(Checks&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "parameter-count reproduction", parameter_counts},
      {2, "metric oracle equivalence", metric_oracles},
      {3, "hand-computed metric fixtures", metric_fixtures},
      {4, "gradient correctness", gradients},
      {5, "single-head loss reduction", single_head_reduction},
      {6, "training sanity at desk scale",
       [&](Checks& c) { training_sanity(c, runs, desk_data()); }},
      {7, "determinism", [&](Checks& c) { determinism(c, runs, desk_data()); }},
      {8, "checkpoint round trip",
       [&](Checks& c) { checkpoint_round_trip(c, runs, desk_data()); }},
      {9, "comparison arithmetic and sweep",
       [&](Checks& c) { comparison_and_sweep(c, work); }},
  };

  int failed = 0;
  for (const Criterion& cr : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), cr.id) == only.end()) {
      continue;
    }
    Checks checks;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(checks);
    } catch (const std::exception& ex) {
      checks.expect(false, std::string("exception: ") + ex.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !checks.ok();
    std::printf("%s %d %s [%.1fs]: %s\n", checks.ok() ? "PASS" : "FAIL", cr.id,
                cr.name, secs, checks.summary().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
