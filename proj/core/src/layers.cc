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

#include "prae/layers.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "prae/error.h"

namespace prae {
namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic,
                                Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

template <typename T>
void require_linear_input(const BasicTensor<T>& x, const LayerParams<T>& p,
                          std::size_t rank, const char* where) {
  if (x.rank() != rank || x.dim(1) != p.in_features()) {
    throw DimensionError(std::string(where) + ": input " +
                         shape_string(x.shape()) + " incompatible with " +
                         std::to_string(p.in_features()) + " input features");
  }
}

template <typename T>
void ensure_grad_buffer(BasicTensor<T>& grad, const BasicTensor<T>& like) {
  if (grad.shape() != like.shape()) grad = BasicTensor<T>(like.shape());
}

// Feature axis is 1; rank-2 inputs have one "point" per sample.
struct FeatureLayout {
  std::size_t batch;
  std::size_t features;
  std::size_t points;
};

template <typename T>
FeatureLayout feature_layout(const BasicTensor<T>& x) {
  if (x.rank() == 2) return {x.dim(0), x.dim(1), 1};
  if (x.rank() == 3) return {x.dim(0), x.dim(1), x.dim(2)};
  throw DimensionError("batchnorm expects rank 2 or 3 input, got " +
                       shape_string(x.shape()));
}

}  // namespace

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kPointwiseLinear:
      return "pointwise_linear";
    case LayerKind::kDense:
      return "dense";
    case LayerKind::kBatchNorm:
      return "batchnorm";
    case LayerKind::kReLU:
      return "relu";
    case LayerKind::kMaxPoolPoints:
      return "max_pool_points";
  }
  return "unknown";
}

template <typename T>
LayerParams<T> LayerParams<T>::pointwise_linear(std::size_t in,
                                                std::size_t out) {
  LayerParams p;
  p.kind = LayerKind::kPointwiseLinear;
  p.weight = BasicTensor<T>({out, in});
  p.bias = BasicTensor<T>({out});
  return p;
}

template <typename T>
LayerParams<T> LayerParams<T>::dense(std::size_t in, std::size_t out) {
  LayerParams p = pointwise_linear(in, out);
  p.kind = LayerKind::kDense;
  return p;
}

template <typename T>
LayerParams<T> LayerParams<T>::batchnorm(std::size_t features) {
  LayerParams p;
  p.kind = LayerKind::kBatchNorm;
  p.weight = BasicTensor<T>({features}, T(1));
  p.bias = BasicTensor<T>({features});
  p.running_mean = BasicTensor<T>({features});
  p.running_var = BasicTensor<T>({features}, T(1));
  return p;
}

template <typename T>
LayerParams<T> LayerParams<T>::relu() {
  return LayerParams{};
}

template <typename T>
LayerParams<T> LayerParams<T>::max_pool_points() {
  LayerParams p;
  p.kind = LayerKind::kMaxPoolPoints;
  return p;
}

template <typename T>
BasicTensor<T> pointwise_linear_forward(const BasicTensor<T>& x,
                                        const LayerParams<T>& p) {
  require_linear_input(x, p, 3, "pointwise_linear_forward");
  const std::size_t batch = x.dim(0), in = x.dim(1), points = x.dim(2);
  const std::size_t out = p.out_features();
  BasicTensor<T> y({batch, out, points});
  // Same accumulation order for every point, whatever its position.
  for (std::size_t b = 0; b < batch; ++b) {
    const T* xb = x.data() + b * in * points;
    for (std::size_t o = 0; o < out; ++o) {
      T* yrow = y.data() + (b * out + o) * points;
      const T* wrow = p.weight.data() + o * in;
      std::fill(yrow, yrow + points, T(0));
      for (std::size_t i = 0; i < in; ++i) {
        const T wi = wrow[i];
        const T* xrow = xb + i * points;
        for (std::size_t n = 0; n < points; ++n) yrow[n] += wi * xrow[n];
      }
      const T bias = p.bias[o];
      for (std::size_t n = 0; n < points; ++n) yrow[n] += bias;
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> pointwise_linear_backward(const BasicTensor<T>& x,
                                         const LayerParams<T>& p,
                                         const BasicTensor<T>& upstream,
                                         BasicTensor<T>& weight_grad,
                                         BasicTensor<T>& bias_grad) {
  require_linear_input(x, p, 3, "pointwise_linear_backward");
  const std::size_t batch = x.dim(0), in = x.dim(1), points = x.dim(2);
  const std::size_t out = p.out_features();
  require_shape(upstream.shape(), {batch, out, points},
                "pointwise_linear_backward upstream");
  ensure_grad_buffer(weight_grad, p.weight);
  ensure_grad_buffer(bias_grad, p.bias);

  BasicTensor<T> dx({batch, in, points});
  ConstMatrixMap<T> w(p.weight.data(), out, in);
  MatrixMap<T> dw(weight_grad.data(), out, in);
  for (std::size_t b = 0; b < batch; ++b) {
    ConstMatrixMap<T> xb(x.data() + b * in * points, in, points);
    ConstMatrixMap<T> gb(upstream.data() + b * out * points, out, points);
    MatrixMap<T> dxb(dx.data() + b * in * points, in, points);
    dw.noalias() += gb * xb.transpose();
    dxb.noalias() = w.transpose() * gb;
  }
  for (std::size_t o = 0; o < out; ++o) {
    double sum = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const T* row = upstream.data() + (b * out + o) * points;
      for (std::size_t n = 0; n < points; ++n) sum += row[n];
    }
    bias_grad[o] += static_cast<T>(sum);
  }
  return dx;
}

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& x,
                             const LayerParams<T>& p) {
  require_linear_input(x, p, 2, "dense_forward");
  const std::size_t batch = x.dim(0), in = x.dim(1);
  const std::size_t out = p.out_features();
  BasicTensor<T> y({batch, out});
  ConstMatrixMap<T> w(p.weight.data(), out, in);
  ConstMatrixMap<T> xm(x.data(), batch, in);
  MatrixMap<T> ym(y.data(), batch, out);
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bias(p.bias.data(),
                                                             out);
  ym.noalias() = xm * w.transpose();
  ym.rowwise() += bias;
  return y;
}

template <typename T>
BasicTensor<T> dense_backward(const BasicTensor<T>& x, const LayerParams<T>& p,
                              const BasicTensor<T>& upstream,
                              BasicTensor<T>& weight_grad,
                              BasicTensor<T>& bias_grad) {
  require_linear_input(x, p, 2, "dense_backward");
  const std::size_t batch = x.dim(0), in = x.dim(1);
  const std::size_t out = p.out_features();
  require_shape(upstream.shape(), {batch, out}, "dense_backward upstream");
  ensure_grad_buffer(weight_grad, p.weight);
  ensure_grad_buffer(bias_grad, p.bias);

  ConstMatrixMap<T> w(p.weight.data(), out, in);
  ConstMatrixMap<T> xm(x.data(), batch, in);
  ConstMatrixMap<T> g(upstream.data(), batch, out);
  MatrixMap<T> dw(weight_grad.data(), out, in);
  dw.noalias() += g.transpose() * xm;
  for (std::size_t o = 0; o < out; ++o) {
    double sum = 0.0;
    for (std::size_t b = 0; b < batch; ++b) sum += upstream.at(b, o);
    bias_grad[o] += static_cast<T>(sum);
  }
  BasicTensor<T> dx({batch, in});
  MatrixMap<T> dxm(dx.data(), batch, in);
  dxm.noalias() = g * w;
  return dx;
}

template <typename T>
PoolResult<T> max_pool_points(const BasicTensor<T>& x) {
  if (x.rank() != 3) {
    throw DimensionError("max_pool_points expects [B,C,N], got " +
                         shape_string(x.shape()));
  }
  const std::size_t batch = x.dim(0), channels = x.dim(1), points = x.dim(2);
  if (points == 0) throw DimensionError("max_pool_points: empty point axis");
  PoolResult<T> r{BasicTensor<T>({batch, channels}),
                  std::vector<std::size_t>(batch * channels)};
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < channels; ++c) {
      const T* row = x.data() + (b * channels + c) * points;
      std::size_t best = 0;
      for (std::size_t n = 1; n < points; ++n) {
        if (row[n] > row[best]) best = n;
      }
      r.pooled.at(b, c) = row[best];
      r.argmax[b * channels + c] = best;
    }
  }
  return r;
}

template <typename T>
BasicTensor<T> max_pool_backward(const Shape& input_shape,
                                 const std::vector<std::size_t>& argmax,
                                 const BasicTensor<T>& upstream) {
  const std::size_t batch = input_shape.at(0), channels = input_shape.at(1);
  const std::size_t points = input_shape.at(2);
  require_shape(upstream.shape(), {batch, channels},
                "max_pool_backward upstream");
  BasicTensor<T> dx(input_shape);
  for (std::size_t i = 0; i < batch * channels; ++i) {
    dx[i * points + argmax[i]] = upstream[i];
  }
  return dx;
}

template <typename T>
BasicTensor<T> relu_forward(const BasicTensor<T>& x) {
  BasicTensor<T> y = x;
  for (T& v : y.values()) v = v > T(0) ? v : T(0);
  return y;
}

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& x,
                             const BasicTensor<T>& upstream) {
  require_shape(upstream.shape(), x.shape(), "relu_backward upstream");
  BasicTensor<T> dx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    dx[i] = x[i] > T(0) ? upstream[i] : T(0);
  }
  return dx;
}

template <typename T>
BasicTensor<T> batchnorm_forward(const BasicTensor<T>& x, LayerParams<T>& p,
                                 Mode mode, BatchNormCache* cache) {
  const FeatureLayout lay = feature_layout(x);
  if (lay.features != p.weight.size()) {
    throw DimensionError("batchnorm_forward: input " + shape_string(x.shape()) +
                         " has " + std::to_string(lay.features) +
                         " features, layer expects " +
                         std::to_string(p.weight.size()));
  }
  if (!(p.bn_epsilon > 0.0)) throw ConfigError("batchnorm epsilon must be > 0");
  const std::size_t count = lay.batch * lay.points;
  if (mode == Mode::kTrain && count <= 1) {
    throw NumericError(
        "batchnorm_forward: degenerate variance (single element per feature "
        "in train mode)");
  }
  auto index = [&](std::size_t b, std::size_t c, std::size_t n) {
    return (b * lay.features + c) * lay.points + n;
  };

  std::vector<double> mean(lay.features), inv_std(lay.features);
  if (mode == Mode::kTrain) {
    for (std::size_t c = 0; c < lay.features; ++c) {
      double sum = 0.0;
      for (std::size_t b = 0; b < lay.batch; ++b)
        for (std::size_t n = 0; n < lay.points; ++n) sum += x[index(b, c, n)];
      const double mu = sum / static_cast<double>(count);
      double sq = 0.0;
      for (std::size_t b = 0; b < lay.batch; ++b)
        for (std::size_t n = 0; n < lay.points; ++n) {
          const double d = x[index(b, c, n)] - mu;
          sq += d * d;
        }
      const double var = sq / static_cast<double>(count);
      mean[c] = mu;
      inv_std[c] = 1.0 / std::sqrt(var + p.bn_epsilon);
      const double unbiased = sq / static_cast<double>(count - 1);
      p.running_mean[c] = static_cast<T>((1.0 - p.bn_momentum) *
                                             p.running_mean[c] +
                                         p.bn_momentum * mu);
      p.running_var[c] = static_cast<T>((1.0 - p.bn_momentum) *
                                            p.running_var[c] +
                                        p.bn_momentum * unbiased);
    }
  } else {
    for (std::size_t c = 0; c < lay.features; ++c) {
      mean[c] = p.running_mean[c];
      inv_std[c] = 1.0 / std::sqrt(double(p.running_var[c]) + p.bn_epsilon);
    }
  }

  BasicTensor<T> y(x.shape());
  std::vector<double> normalized;
  if (cache) normalized.resize(x.size());
  for (std::size_t b = 0; b < lay.batch; ++b) {
    for (std::size_t c = 0; c < lay.features; ++c) {
      const double scale = p.weight[c], shift = p.bias[c];
      for (std::size_t n = 0; n < lay.points; ++n) {
        const std::size_t i = index(b, c, n);
        const double xhat = (x[i] - mean[c]) * inv_std[c];
        if (cache) normalized[i] = xhat;
        y[i] = static_cast<T>(scale * xhat + shift);
      }
    }
  }
  if (cache) {
    cache->mode = mode;
    cache->inv_std = std::move(inv_std);
    cache->normalized = std::move(normalized);
  }
  return y;
}

template <typename T>
BasicTensor<T> batchnorm_backward(const BatchNormCache& cache,
                                  const LayerParams<T>& p,
                                  const BasicTensor<T>& upstream,
                                  BasicTensor<T>& scale_grad,
                                  BasicTensor<T>& shift_grad) {
  const FeatureLayout lay = feature_layout(upstream);
  if (cache.normalized.size() != upstream.size() ||
      cache.inv_std.size() != lay.features) {
    throw ProtocolError("batchnorm_backward: cache does not match upstream");
  }
  ensure_grad_buffer(scale_grad, p.weight);
  ensure_grad_buffer(shift_grad, p.bias);
  const double count = static_cast<double>(lay.batch * lay.points);
  auto index = [&](std::size_t b, std::size_t c, std::size_t n) {
    return (b * lay.features + c) * lay.points + n;
  };

  BasicTensor<T> dx(upstream.shape());
  for (std::size_t c = 0; c < lay.features; ++c) {
    double sum_g = 0.0, sum_g_xhat = 0.0;
    for (std::size_t b = 0; b < lay.batch; ++b)
      for (std::size_t n = 0; n < lay.points; ++n) {
        const std::size_t i = index(b, c, n);
        sum_g += upstream[i];
        sum_g_xhat += upstream[i] * cache.normalized[i];
      }
    scale_grad[c] += static_cast<T>(sum_g_xhat);
    shift_grad[c] += static_cast<T>(sum_g);

    const double gamma = p.weight[c];
    const double inv_std = cache.inv_std[c];
    for (std::size_t b = 0; b < lay.batch; ++b)
      for (std::size_t n = 0; n < lay.points; ++n) {
        const std::size_t i = index(b, c, n);
        double g;
        if (cache.mode == Mode::kTrain) {
          // d/dx of gamma * (x - mean) / std with batch statistics.
          g = gamma * inv_std *
              (upstream[i] - sum_g / count -
               cache.normalized[i] * sum_g_xhat / count);
        } else {
          g = gamma * inv_std * upstream[i];
        }
        dx[i] = static_cast<T>(g);
      }
  }
  return dx;
}

template <typename T>
void Sequential<T>::add(LayerParams<T> params) {
  Layer<T> layer;
  layer.params = std::move(params);
  if (layer.params.has_params()) {
    layer.weight_grad = BasicTensor<T>(layer.params.weight.shape());
    layer.bias_grad = BasicTensor<T>(layer.params.bias.shape());
  }
  layers_.push_back(std::move(layer));
}

template <typename T>
BasicTensor<T> Sequential<T>::forward(const BasicTensor<T>& x, Mode mode,
                                      bool record) {
  BasicTensor<T> h = x;
  for (Layer<T>& layer : layers_) {
    LayerParams<T>& p = layer.params;
    BasicTensor<T> next;
    switch (p.kind) {
      case LayerKind::kPointwiseLinear:
        next = pointwise_linear_forward(h, p);
        break;
      case LayerKind::kDense:
        next = dense_forward(h, p);
        break;
      case LayerKind::kBatchNorm:
        next = batchnorm_forward(h, p, mode, record ? &layer.bn : nullptr);
        break;
      case LayerKind::kReLU:
        next = relu_forward(h);
        break;
      case LayerKind::kMaxPoolPoints: {
        PoolResult<T> pooled = max_pool_points(h);
        if (record) layer.argmax = std::move(pooled.argmax);
        next = std::move(pooled.pooled);
        break;
      }
    }
    layer.cached = record;
    if (record && (p.is_linear() || p.kind == LayerKind::kReLU ||
                   p.kind == LayerKind::kMaxPoolPoints)) {
      layer.input = std::move(h);
    }
    h = std::move(next);
  }
  h.require_finite("forward pass output");
  return h;
}

template <typename T>
BasicTensor<T> Sequential<T>::backward(const BasicTensor<T>& upstream) {
  BasicTensor<T> g = upstream;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    Layer<T>& layer = *it;
    if (!layer.cached) {
      throw ProtocolError(
          "backward called without a recorded forward pass (layer " +
          std::string(layer_kind_name(layer.params.kind)) + ")");
    }
    const LayerParams<T>& p = layer.params;
    switch (p.kind) {
      case LayerKind::kPointwiseLinear:
        g = pointwise_linear_backward(layer.input, p, g, layer.weight_grad,
                                      layer.bias_grad);
        break;
      case LayerKind::kDense:
        g = dense_backward(layer.input, p, g, layer.weight_grad,
                           layer.bias_grad);
        break;
      case LayerKind::kBatchNorm:
        g = batchnorm_backward(layer.bn, p, g, layer.weight_grad,
                               layer.bias_grad);
        break;
      case LayerKind::kReLU:
        g = relu_backward(layer.input, g);
        break;
      case LayerKind::kMaxPoolPoints:
        g = max_pool_backward(layer.input.shape(), layer.argmax, g);
        break;
    }
  }
  clear_cache();
  g.require_finite("backward pass input gradient");
  for (const Layer<T>& layer : layers_) {
    if (layer.params.has_params()) {
      layer.weight_grad.require_finite("parameter gradient");
      layer.bias_grad.require_finite("parameter gradient");
    }
  }
  return g;
}

template <typename T>
void Sequential<T>::zero_grad() {
  for (Layer<T>& layer : layers_) {
    layer.weight_grad.fill(T(0));
    layer.bias_grad.fill(T(0));
  }
}

template <typename T>
void Sequential<T>::clear_cache() {
  for (Layer<T>& layer : layers_) {
    layer.cached = false;
    layer.input = BasicTensor<T>();
    layer.bn = BatchNormCache{};
    layer.argmax.clear();
  }
}

template <typename T>
std::vector<ParamRef<T>> Sequential<T>::parameters(const std::string& prefix) {
  std::vector<ParamRef<T>> refs;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Layer<T>& layer = layers_[i];
    if (!layer.params.has_params()) continue;
    const std::string base = prefix + "." + std::to_string(i) + ".";
    const bool bn = layer.params.kind == LayerKind::kBatchNorm;
    refs.push_back({base + (bn ? "scale" : "weight"), &layer.params.weight,
                    &layer.weight_grad});
    refs.push_back({base + (bn ? "shift" : "bias"), &layer.params.bias,
                    &layer.bias_grad});
  }
  return refs;
}

template <typename T>
std::vector<BufferRef<T>> Sequential<T>::buffers(const std::string& prefix) {
  std::vector<BufferRef<T>> refs;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Layer<T>& layer = layers_[i];
    if (layer.params.kind != LayerKind::kBatchNorm) continue;
    const std::string base = prefix + "." + std::to_string(i) + ".";
    refs.push_back({base + "running_mean", &layer.params.running_mean});
    refs.push_back({base + "running_var", &layer.params.running_var});
  }
  return refs;
}

template <typename T>
std::size_t Sequential<T>::trainable_count() const {
  std::size_t total = 0;
  for (const Layer<T>& layer : layers_) total += layer.params.trainable_count();
  return total;
}

#define PRAE_INSTANTIATE_LAYERS(T)                                            \
  template struct LayerParams<T>;                                             \
  template class Sequential<T>;                                               \
  template BasicTensor<T> pointwise_linear_forward(const BasicTensor<T>&,     \
                                                   const LayerParams<T>&);    \
  template BasicTensor<T> pointwise_linear_backward(                          \
      const BasicTensor<T>&, const LayerParams<T>&, const BasicTensor<T>&,    \
      BasicTensor<T>&, BasicTensor<T>&);                                      \
  template BasicTensor<T> dense_forward(const BasicTensor<T>&,                \
                                        const LayerParams<T>&);               \
  template BasicTensor<T> dense_backward(                                     \
      const BasicTensor<T>&, const LayerParams<T>&, const BasicTensor<T>&,    \
      BasicTensor<T>&, BasicTensor<T>&);                                      \
  template PoolResult<T> max_pool_points(const BasicTensor<T>&);              \
  template BasicTensor<T> max_pool_backward(                                  \
      const Shape&, const std::vector<std::size_t>&, const BasicTensor<T>&);  \
  template BasicTensor<T> relu_forward(const BasicTensor<T>&);                \
  template BasicTensor<T> relu_backward(const BasicTensor<T>&,                \
                                        const BasicTensor<T>&);               \
  template BasicTensor<T> batchnorm_forward(                                  \
      const BasicTensor<T>&, LayerParams<T>&, Mode, BatchNormCache*);         \
  template BasicTensor<T> batchnorm_backward(                                 \
      const BatchNormCache&, const LayerParams<T>&, const BasicTensor<T>&,    \
      BasicTensor<T>&, BasicTensor<T>&);

PRAE_INSTANTIATE_LAYERS(float)
PRAE_INSTANTIATE_LAYERS(double)

#undef PRAE_INSTANTIATE_LAYERS

}  // namespace prae
