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

#include "prae/model.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "prae/error.h"

namespace prae {
namespace {

using json = nlohmann::json;

std::string lowercase_alnum(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

void require_depth(int depth) {
  if (depth < kMinDepth || depth > kMaxDepth) {
    throw ConfigError("decoder depth must be in [1,5], got " +
                      std::to_string(depth));
  }
}

// Stream 0 seeds the encoder, stream 1 + j seeds head j.
std::mt19937_64 layer_engine(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t layer) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(layer)};
  return std::mt19937_64(seq);
}

template <typename T>
void init_linear(LayerParams<T>& p, bool feeds_relu, std::mt19937_64& rng) {
  const double fan_in = static_cast<double>(p.in_features());
  const double fan_out = static_cast<double>(p.out_features());
  const double bound = feeds_relu ? std::sqrt(6.0 / fan_in)
                                  : std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (T& w : p.weight.values()) w = static_cast<T>(dist(rng));
  p.bias.fill(T(0));
}

}  // namespace

const char* backbone_name(Backbone b) {
  switch (b) {
    case Backbone::kLightAE:
      return "LightAE";
    case Backbone::kDeepAE:
      return "DeepAE";
    case Backbone::kPTv3:
      return "PTv3";
    case Backbone::kCustom:
      return "Custom";
  }
  return "?";
}

Backbone parse_backbone(const std::string& name) {
  const std::string key = lowercase_alnum(name);
  if (key == "lightae" || key == "light") return Backbone::kLightAE;
  if (key == "deepae" || key == "deep") return Backbone::kDeepAE;
  if (key == "ptv3") return Backbone::kPTv3;
  if (key == "custom") return Backbone::kCustom;
  throw ConfigError("unknown backbone '" + name + "'");
}

EncoderSpec standard_encoder(Backbone backbone) {
  switch (backbone) {
    case Backbone::kLightAE:
      return {backbone, {64, 128, 128}, true};
    case Backbone::kDeepAE:
      return {backbone, {64, 64, 64, 128, 1024}, true};
    case Backbone::kPTv3:
      return {backbone, {512}, false};
    case Backbone::kCustom:
      break;
  }
  throw ConfigError("custom backbones have no standard encoder");
}

std::vector<std::size_t> standard_hidden_widths(Backbone backbone, int depth) {
  require_depth(depth);
  std::vector<std::size_t> row;
  switch (backbone) {
    case Backbone::kLightAE:
    case Backbone::kPTv3:
      row = {256, 512, 1024, 1024};
      break;
    case Backbone::kDeepAE:
      row = {512, 1024, 1024, 1024};
      break;
    case Backbone::kCustom:
      throw ConfigError("custom backbones have no standard decoder");
  }
  row.resize(static_cast<std::size_t>(depth - 1));
  return row;
}

ModelSpec standard_spec(Backbone backbone, int depth, std::size_t heads,
                        std::size_t output_points) {
  ModelSpec spec;
  spec.encoder = standard_encoder(backbone);
  DecoderSpec& d = spec.decoder;
  d.backbone = backbone;
  d.depth = depth;
  d.heads = heads;
  d.output_points = output_points;
  d.layer_widths = standard_hidden_widths(backbone, depth);
  d.layer_widths.push_back(heads ? output_points / heads * 3 : 0);
  d.use_batchnorm = backbone == Backbone::kDeepAE;
  validate(spec);
  return spec;
}

void validate(const ModelSpec& spec) {
  const DecoderSpec& d = spec.decoder;
  const EncoderSpec& e = spec.encoder;
  require_depth(d.depth);
  if (d.heads < 1) throw ConfigError("head count M must be >= 1");
  if (d.output_points < 1) throw ConfigError("output points K must be >= 1");
  if (d.output_points % d.heads != 0) {
    throw ConfigError("output points K=" + std::to_string(d.output_points) +
                      " is not divisible by head count M=" +
                      std::to_string(d.heads) + " (K mod M != 0)");
  }
  if (d.layer_widths.size() != static_cast<std::size_t>(d.depth)) {
    throw ConfigError("decoder depth " + std::to_string(d.depth) +
                      " does not match " +
                      std::to_string(d.layer_widths.size()) + " layer widths");
  }
  if (d.layer_widths.back() != d.points_per_head() * 3) {
    throw ConfigError("decoder output width must be (K/M)*3 = " +
                      std::to_string(d.points_per_head() * 3));
  }
  if (e.widths.empty() ||
      std::find(e.widths.begin(), e.widths.end(), 0u) != e.widths.end() ||
      std::find(d.layer_widths.begin(), d.layer_widths.end(), 0u) !=
          d.layer_widths.end()) {
    throw ConfigError("layer widths must be positive");
  }
  if (e.kind != d.backbone) {
    throw ConfigError("encoder and decoder backbones differ");
  }
  if (d.backbone == Backbone::kCustom) return;

  if (!(e == standard_encoder(e.kind))) {
    throw ConfigError(std::string("encoder widths differ from the ") +
                      backbone_name(e.kind) + " configuration");
  }
  const std::vector<std::size_t> hidden =
      standard_hidden_widths(d.backbone, d.depth);
  if (!std::equal(hidden.begin(), hidden.end(), d.layer_widths.begin())) {
    throw ConfigError(std::string("decoder widths differ from the ") +
                      backbone_name(d.backbone) + " depth-" +
                      std::to_string(d.depth) + " configuration");
  }
  if (d.use_batchnorm != (d.backbone == Backbone::kDeepAE)) {
    throw ConfigError("decoder batch norm is used by Deep-AE only");
  }
}

std::size_t decoder_parameter_count(const ModelSpec& spec) {
  std::size_t per_head = 0;
  std::size_t in = spec.encoder.latent_dim();
  const auto& widths = spec.decoder.layer_widths;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    per_head += in * widths[i] + widths[i];
    if (spec.decoder.use_batchnorm && i + 1 < widths.size()) {
      per_head += 2 * widths[i];
    }
    in = widths[i];
  }
  return per_head * spec.decoder.heads;
}

std::size_t encoder_parameter_count(const ModelSpec& spec) {
  std::size_t total = 0, in = 3;
  for (std::size_t w : spec.encoder.widths) {
    total += in * w + w;
    if (spec.encoder.use_batchnorm) total += 2 * w;
    in = w;
  }
  return total;
}

std::string spec_to_json(const ModelSpec& spec) {
  const EncoderSpec& e = spec.encoder;
  const DecoderSpec& d = spec.decoder;
  json j;
  j["encoder"] = {{"kind", backbone_name(e.kind)},
                  {"widths", e.widths},
                  {"batchnorm", e.use_batchnorm}};
  j["decoder"] = {{"backbone", backbone_name(d.backbone)},
                  {"depth", d.depth},
                  {"heads", d.heads},
                  {"output_points", d.output_points},
                  {"layer_widths", d.layer_widths},
                  {"batchnorm", d.use_batchnorm}};
  return j.dump();
}

ModelSpec spec_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ModelSpec spec;
    const json& e = j.at("encoder");
    spec.encoder.kind = parse_backbone(e.at("kind").get<std::string>());
    spec.encoder.widths = e.at("widths").get<std::vector<std::size_t>>();
    spec.encoder.use_batchnorm = e.at("batchnorm").get<bool>();
    const json& d = j.at("decoder");
    spec.decoder.backbone = parse_backbone(d.at("backbone").get<std::string>());
    spec.decoder.depth = d.at("depth").get<int>();
    spec.decoder.heads = d.at("heads").get<std::size_t>();
    spec.decoder.output_points = d.at("output_points").get<std::size_t>();
    spec.decoder.layer_widths =
        d.at("layer_widths").get<std::vector<std::size_t>>();
    spec.decoder.use_batchnorm = d.at("batchnorm").get<bool>();
    return spec;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("malformed model spec: ") + ex.what());
  }
}

template <typename T>
BasicModel<T> BasicModel<T>::build(const ModelSpec& spec, std::uint64_t seed) {
  validate(spec);
  if (spec.encoder.kind == Backbone::kPTv3) {
    throw ConfigError(
        "the PTv3 encoder is not implemented; PTv3 decoders are available "
        "for parameter audits only");
  }
  BasicModel model;
  model.spec_ = spec;

  std::size_t in = 3;
  const auto& ew = spec.encoder.widths;
  for (std::size_t i = 0; i < ew.size(); ++i) {
    const bool last = i + 1 == ew.size();
    auto layer = LayerParams<T>::pointwise_linear(in, ew[i]);
    auto rng = layer_engine(seed, 0, i);
    init_linear(layer, !last, rng);
    model.encoder_.add(std::move(layer));
    if (spec.encoder.use_batchnorm) {
      model.encoder_.add(LayerParams<T>::batchnorm(ew[i]));
    }
    if (!last) model.encoder_.add(LayerParams<T>::relu());
    in = ew[i];
  }
  model.encoder_.add(LayerParams<T>::max_pool_points());

  const auto& dw = spec.decoder.layer_widths;
  for (std::size_t h = 0; h < spec.decoder.heads; ++h) {
    Sequential<T> head;
    std::size_t head_in = spec.encoder.latent_dim();
    for (std::size_t i = 0; i < dw.size(); ++i) {
      const bool last = i + 1 == dw.size();
      auto layer = LayerParams<T>::dense(head_in, dw[i]);
      auto rng = layer_engine(seed, 1 + h, i);
      init_linear(layer, !last, rng);
      head.add(std::move(layer));
      if (!last) {
        if (spec.decoder.use_batchnorm) {
          head.add(LayerParams<T>::batchnorm(dw[i]));
        }
        head.add(LayerParams<T>::relu());
      }
      head_in = dw[i];
    }
    model.heads_.push_back(std::move(head));
  }
  return model;
}

template <typename T>
BasicTensor<T> BasicModel<T>::encode(const BasicTensor<T>& clouds, Mode mode,
                                     bool record) {
  if (clouds.rank() != 3 || clouds.dim(1) != 3) {
    throw DimensionError("encode expects [B,3,N], got " +
                         shape_string(clouds.shape()));
  }
  if (clouds.dim(2) == 0) throw DimensionError("encode: empty cloud");
  return encoder_.forward(clouds, mode, record);
}

template <typename T>
std::vector<BasicTensor<T>> BasicModel<T>::decode(const BasicTensor<T>& latent,
                                                  Mode mode, bool record) {
  const std::size_t dim = spec_.encoder.latent_dim();
  if (latent.rank() != 2 || latent.dim(1) != dim) {
    throw DimensionError("decode expects [B," + std::to_string(dim) +
                         "], got " + shape_string(latent.shape()));
  }
  const std::size_t batch = latent.dim(0);
  const std::size_t k = spec_.decoder.points_per_head();
  std::vector<BasicTensor<T>> out;
  out.reserve(heads_.size());
  for (Sequential<T>& head : heads_) {
    out.push_back(head.forward(latent, mode, record).reshaped({batch, k, 3}));
  }
  return out;
}

template <typename T>
std::vector<BasicTensor<T>> BasicModel<T>::forward_heads(
    const BasicTensor<T>& clouds, Mode mode, bool record) {
  return decode(encode(clouds, mode, record), mode, record);
}

template <typename T>
BasicTensor<T> BasicModel<T>::reconstruct(const BasicTensor<T>& clouds,
                                          Mode mode, bool record) {
  return concat_heads(forward_heads(clouds, mode, record));
}

template <typename T>
void BasicModel<T>::backward(const std::vector<BasicTensor<T>>& head_grads) {
  if (head_grads.size() != heads_.size()) {
    throw DimensionError("backward: expected one gradient per head");
  }
  BasicTensor<T> latent_grad;
  for (std::size_t h = 0; h < heads_.size(); ++h) {
    const BasicTensor<T>& g = head_grads[h];
    if (g.rank() != 3 || g.dim(2) != 3) {
      throw DimensionError("head gradient must be [B,K/M,3], got " +
                           shape_string(g.shape()));
    }
    BasicTensor<T> d =
        heads_[h].backward(g.reshaped({g.dim(0), g.dim(1) * 3}));
    if (h == 0) {
      latent_grad = std::move(d);
    } else {
      for (std::size_t i = 0; i < d.size(); ++i) latent_grad[i] += d[i];
    }
  }
  encoder_.backward(latent_grad);
}

template <typename T>
void BasicModel<T>::zero_grad() {
  encoder_.zero_grad();
  for (Sequential<T>& h : heads_) h.zero_grad();
}

template <typename T>
std::vector<ParamRef<T>> BasicModel<T>::parameters() {
  std::vector<ParamRef<T>> refs = encoder_.parameters("encoder");
  for (std::size_t h = 0; h < heads_.size(); ++h) {
    auto more = heads_[h].parameters("head" + std::to_string(h));
    refs.insert(refs.end(), more.begin(), more.end());
  }
  return refs;
}

template <typename T>
std::vector<BufferRef<T>> BasicModel<T>::buffers() {
  std::vector<BufferRef<T>> refs = encoder_.buffers("encoder");
  for (std::size_t h = 0; h < heads_.size(); ++h) {
    auto more = heads_[h].buffers("head" + std::to_string(h));
    refs.insert(refs.end(), more.begin(), more.end());
  }
  return refs;
}

Model build_model(const ModelSpec& spec, std::uint64_t seed) {
  return Model::build(spec, seed);
}

template <typename T>
std::size_t count_parameters(const BasicModel<T>& model) {
  std::size_t total = 0;
  for (const Sequential<T>& h : model.heads()) total += h.trainable_count();
  return total;
}

template <typename T>
std::size_t count_all_parameters(const BasicModel<T>& model) {
  return count_parameters(model) + model.encoder().trainable_count();
}

template <typename T>
BasicTensor<T> concat_heads(const std::vector<BasicTensor<T>>& heads) {
  if (heads.empty()) throw DimensionError("concat_heads: no heads");
  const std::size_t batch = heads.front().dim(0);
  std::size_t total = 0;
  for (const auto& h : heads) {
    if (h.rank() != 3 || h.dim(0) != batch || h.dim(2) != 3) {
      throw DimensionError("concat_heads: inconsistent head shapes");
    }
    total += h.dim(1);
  }
  BasicTensor<T> out({batch, total, 3});
  for (std::size_t b = 0; b < batch; ++b) {
    T* dst = out.data() + b * total * 3;
    for (const auto& h : heads) {
      const std::size_t n = h.dim(1) * 3;
      std::copy_n(h.data() + b * n, n, dst);
      dst += n;
    }
  }
  return out;
}

template class BasicModel<float>;
template class BasicModel<double>;
template std::size_t count_parameters(const BasicModel<float>&);
template std::size_t count_parameters(const BasicModel<double>&);
template std::size_t count_all_parameters(const BasicModel<float>&);
template std::size_t count_all_parameters(const BasicModel<double>&);
template BasicTensor<float> concat_heads(const std::vector<BasicTensor<float>>&);
template BasicTensor<double> concat_heads(
    const std::vector<BasicTensor<double>>&);

}  // namespace prae
