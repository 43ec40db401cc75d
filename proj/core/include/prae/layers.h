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

#ifndef PRAE_LAYERS_H_
#define PRAE_LAYERS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "prae/tensor.h"

namespace prae {

enum class LayerKind {
  kPointwiseLinear,  // shared per-point map, [B,Cin,N] -> [B,Cout,N]
  kDense,            // [B,Cin] -> [B,Cout]
  kBatchNorm,        // per-feature (axis 1) normalization, rank 2 or 3
  kReLU,
  kMaxPoolPoints,    // [B,C,N] -> [B,C]
};

const char* layer_kind_name(LayerKind kind);

enum class Mode { kTrain, kEval };

inline constexpr double kBatchNormMomentum = 0.1;
inline constexpr double kBatchNormEpsilon = 1e-5;

template <typename T>
struct LayerParams {
  LayerKind kind = LayerKind::kReLU;
  // Linear layers: weight [out,in], bias [out]. BatchNorm: scale [C],
  // shift [C]. Empty for ReLU and max pooling.
  BasicTensor<T> weight;
  BasicTensor<T> bias;
  BasicTensor<T> running_mean;
  BasicTensor<T> running_var;
  double bn_momentum = kBatchNormMomentum;
  double bn_epsilon = kBatchNormEpsilon;

  static LayerParams pointwise_linear(std::size_t in, std::size_t out);
  static LayerParams dense(std::size_t in, std::size_t out);
  static LayerParams batchnorm(std::size_t features);
  static LayerParams relu();
  static LayerParams max_pool_points();

  bool is_linear() const {
    return kind == LayerKind::kPointwiseLinear || kind == LayerKind::kDense;
  }
  bool has_params() const { return is_linear() || kind == LayerKind::kBatchNorm; }
  std::size_t in_features() const { return weight.dim(1); }
  std::size_t out_features() const { return weight.dim(0); }

  // Weights, biases and BN affine terms; running statistics excluded.
  std::size_t trainable_count() const { return weight.size() + bias.size(); }
};

template <typename T>
struct PoolResult {
  BasicTensor<T> pooled;           // [B,C]
  std::vector<std::size_t> argmax;  // [B,C] row-major, winning point index
};

// Per-layer kernels. The *_backward functions accumulate parameter
// gradients into the supplied buffers and return the input gradient.

template <typename T>
BasicTensor<T> pointwise_linear_forward(const BasicTensor<T>& x,
                                        const LayerParams<T>& p);
template <typename T>
BasicTensor<T> pointwise_linear_backward(const BasicTensor<T>& x,
                                         const LayerParams<T>& p,
                                         const BasicTensor<T>& upstream,
                                         BasicTensor<T>& weight_grad,
                                         BasicTensor<T>& bias_grad);

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& x, const LayerParams<T>& p);
template <typename T>
BasicTensor<T> dense_backward(const BasicTensor<T>& x, const LayerParams<T>& p,
                              const BasicTensor<T>& upstream,
                              BasicTensor<T>& weight_grad,
                              BasicTensor<T>& bias_grad);

// Lowest index wins ties. Throws on N == 0.
template <typename T>
PoolResult<T> max_pool_points(const BasicTensor<T>& x);
template <typename T>
BasicTensor<T> max_pool_backward(const Shape& input_shape,
                                 const std::vector<std::size_t>& argmax,
                                 const BasicTensor<T>& upstream);

template <typename T>
BasicTensor<T> relu_forward(const BasicTensor<T>& x);
template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& x,
                             const BasicTensor<T>& upstream);

// State kept by batchnorm_forward for the backward pass.
struct BatchNormCache {
  Mode mode = Mode::kEval;
  std::vector<double> inv_std;      // per feature
  std::vector<double> normalized;  // x_hat, same layout as the input
};

// Train mode normalizes with the biased batch variance over the (batch,
// point) axes and folds the unbiased variance into the running estimate.
// Eval mode uses the running statistics. A single-element batch in Train
// mode throws NumericError.
template <typename T>
BasicTensor<T> batchnorm_forward(const BasicTensor<T>& x, LayerParams<T>& p,
                                 Mode mode, BatchNormCache* cache = nullptr);
template <typename T>
BasicTensor<T> batchnorm_backward(const BatchNormCache& cache,
                                  const LayerParams<T>& p,
                                  const BasicTensor<T>& upstream,
                                  BasicTensor<T>& scale_grad,
                                  BasicTensor<T>& shift_grad);

template <typename T>
struct ParamRef {
  std::string name;
  BasicTensor<T>* value;
  BasicTensor<T>* grad;
};

template <typename T>
struct BufferRef {
  std::string name;
  BasicTensor<T>* value;
};

template <typename T>
struct Layer {
  LayerParams<T> params;
  BasicTensor<T> weight_grad;
  BasicTensor<T> bias_grad;

  // Forward cache; valid only between a recording forward and backward.
  bool cached = false;
  BasicTensor<T> input;
  BatchNormCache bn;
  std::vector<std::size_t> argmax;
};

// Ordered stack of layers with explicit forward/backward.
template <typename T>
class Sequential {
 public:
  void add(LayerParams<T> params);

  // With `record`, caches what backward needs. Output is checked finite.
  BasicTensor<T> forward(const BasicTensor<T>& x, Mode mode,
                         bool record = true);

  // Accumulates parameter gradients and returns d(loss)/d(input). Consumes
  // the forward cache; throws ProtocolError when none is present.
  BasicTensor<T> backward(const BasicTensor<T>& upstream);

  void zero_grad();
  void clear_cache();

  std::vector<Layer<T>>& layers() { return layers_; }
  const std::vector<Layer<T>>& layers() const { return layers_; }

  std::vector<ParamRef<T>> parameters(const std::string& prefix);
  std::vector<BufferRef<T>> buffers(const std::string& prefix);
  std::size_t trainable_count() const;

 private:
  std::vector<Layer<T>> layers_;
};

extern template struct LayerParams<float>;
extern template struct LayerParams<double>;
extern template class Sequential<float>;
extern template class Sequential<double>;

}  // namespace prae

#endif  // PRAE_LAYERS_H_
