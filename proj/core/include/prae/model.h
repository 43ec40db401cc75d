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

#ifndef PRAE_MODEL_H_
#define PRAE_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "prae/layers.h"
#include "prae/tensor.h"

namespace prae {

// kPTv3 exists only as a decoder shape for parameter audits; its encoder is
// not implemented. kCustom allows scaled-down models (tests, experiments)
// whose widths are not checked against the published configurations.
enum class Backbone { kLightAE, kDeepAE, kPTv3, kCustom };

const char* backbone_name(Backbone b);
Backbone parse_backbone(const std::string& name);  // throws ConfigError

inline constexpr int kMinDepth = 1;
inline constexpr int kMaxDepth = 5;
inline constexpr std::size_t kDefaultOutputPoints = 2048;

struct EncoderSpec {
  Backbone kind = Backbone::kLightAE;
  // Output width of each pointwise layer; the last is the latent size.
  std::vector<std::size_t> widths;
  bool use_batchnorm = true;

  std::size_t latent_dim() const { return widths.empty() ? 0 : widths.back(); }
  friend bool operator==(const EncoderSpec&, const EncoderSpec&) = default;
};

struct DecoderSpec {
  Backbone backbone = Backbone::kLightAE;
  int depth = 1;
  std::size_t heads = 1;
  std::size_t output_points = kDefaultOutputPoints;
  // Output width of every dense layer of one head, the final
  // (output_points / heads) * 3 included, so size() == depth.
  std::vector<std::size_t> layer_widths;
  bool use_batchnorm = false;

  std::size_t points_per_head() const { return output_points / heads; }
  friend bool operator==(const DecoderSpec&, const DecoderSpec&) = default;
};

struct ModelSpec {
  EncoderSpec encoder;
  DecoderSpec decoder;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Published encoder: Light-AE 3->64->128->128, Deep-AE
// 3->64->64->64->128->1024; PTv3 is represented by its 512-d latent only.
EncoderSpec standard_encoder(Backbone backbone);

// Hidden widths of the published decoder for (backbone, depth), excluding
// the output layer.
std::vector<std::size_t> standard_hidden_widths(Backbone backbone, int depth);

// Complete published configuration. Deep-AE decoders use batch norm after
// every hidden layer; Light-AE and PTv3 decoders use none.
ModelSpec standard_spec(Backbone backbone, int depth, std::size_t heads,
                        std::size_t output_points = kDefaultOutputPoints);

// Throws ConfigError for an invalid (backbone, depth) pair, widths that
// deviate from the published row, K mod M != 0, or empty layers.
void validate(const ModelSpec& spec);

// Trainable scalars computed from layer shapes alone.
std::size_t decoder_parameter_count(const ModelSpec& spec);
std::size_t encoder_parameter_count(const ModelSpec& spec);

std::string spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const std::string& text);

template <typename T>
class BasicModel {
 public:
  // Encoder and heads are seeded from independent streams of `seed`.
  // Layers feeding a ReLU get He-uniform weights, the rest Xavier-uniform;
  // biases start at zero, batch-norm scale at one.
  static BasicModel build(const ModelSpec& spec, std::uint64_t seed);

  const ModelSpec& spec() const { return spec_; }

  // [B,3,N] -> [B,latent]. Invariant to the order of points.
  BasicTensor<T> encode(const BasicTensor<T>& clouds, Mode mode,
                        bool record = false);
  // [B,latent] -> M tensors [B,K/M,3], head-index order.
  std::vector<BasicTensor<T>> decode(const BasicTensor<T>& latent, Mode mode,
                                     bool record = false);
  // encode, decode, then concatenate heads in order: [B,K,3].
  BasicTensor<T> reconstruct(const BasicTensor<T>& clouds, Mode mode,
                             bool record = false);
  // Same as reconstruct but keeps the per-head split.
  std::vector<BasicTensor<T>> forward_heads(const BasicTensor<T>& clouds,
                                            Mode mode, bool record = false);

  // Backpropagates per-head output gradients ([B,K/M,3] each) through the
  // heads and the shared encoder, accumulating parameter gradients. Needs a
  // recorded forward pass.
  void backward(const std::vector<BasicTensor<T>>& head_grads);

  void zero_grad();

  // Declaration order: encoder layers, then head 0, head 1, ...
  std::vector<ParamRef<T>> parameters();
  std::vector<BufferRef<T>> buffers();

  Sequential<T>& encoder() { return encoder_; }
  const Sequential<T>& encoder() const { return encoder_; }
  std::vector<Sequential<T>>& heads() { return heads_; }
  const std::vector<Sequential<T>>& heads() const { return heads_; }

 private:
  ModelSpec spec_;
  Sequential<T> encoder_;
  std::vector<Sequential<T>> heads_;
};

using Model = BasicModel<float>;

Model build_model(const ModelSpec& spec, std::uint64_t seed);

// Trainable decoder scalars (all heads): the convention of the published
// decoder parameter table. Running statistics are excluded.
template <typename T>
std::size_t count_parameters(const BasicModel<T>& model);
// Encoder plus decoder.
template <typename T>
std::size_t count_all_parameters(const BasicModel<T>& model);

// Concatenates per-head outputs [B,Ki,3] into [B,sum Ki,3].
template <typename T>
BasicTensor<T> concat_heads(const std::vector<BasicTensor<T>>& heads);

extern template class BasicModel<float>;
extern template class BasicModel<double>;

}  // namespace prae

#endif  // PRAE_MODEL_H_
