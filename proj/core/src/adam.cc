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

#include "prae/adam.h"

#include <cmath>

#include "prae/error.h"

namespace prae {

template <typename T>
void adam_step(BasicTensor<T>& param, const BasicTensor<T>& grad,
               AdamState<T>& state) {
  require_shape(grad.shape(), param.shape(), "adam_step gradient");
  if (!grad.all_finite()) {
    throw NumericError("adam_step: NaN/Inf gradient at step " +
                       std::to_string(state.step + 1));
  }
  if (state.m.shape() != param.shape()) state.m = BasicTensor<T>(param.shape());
  if (state.v.shape() != param.shape()) state.v = BasicTensor<T>(param.shape());

  const AdamHyper& h = state.hyper;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(h.beta1, t);
  const double correction2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    const double m = h.beta1 * state.m[i] + (1.0 - h.beta1) * g;
    const double v = h.beta2 * state.v[i] + (1.0 - h.beta2) * g * g;
    state.m[i] = static_cast<T>(m);
    state.v[i] = static_cast<T>(v);
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    param[i] = static_cast<T>(param[i] -
                              h.lr * m_hat / (std::sqrt(v_hat) + h.epsilon));
  }
}

template <typename T>
Adam<T>::Adam(AdamHyper hyper, const std::vector<ParamRef<T>>& params)
    : hyper_(hyper) {
  if (!(hyper.lr > 0.0)) throw ConfigError("learning rate must be > 0");
  states_.reserve(params.size());
  for (const ParamRef<T>& p : params) {
    AdamState<T> s;
    s.m = BasicTensor<T>(p.value->shape());
    s.v = BasicTensor<T>(p.value->shape());
    s.hyper = hyper;
    states_.push_back(std::move(s));
  }
}

template <typename T>
void Adam<T>::step(const std::vector<ParamRef<T>>& params) {
  if (params.size() != states_.size()) {
    throw ProtocolError("Adam::step: parameter list changed size");
  }
  // Validate every gradient first so a failure leaves all state untouched.
  for (const ParamRef<T>& p : params) {
    if (!p.grad->all_finite()) {
      throw NumericError("Adam: NaN/Inf gradient in " + p.name);
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    adam_step(*params[i].value, *params[i].grad, states_[i]);
  }
}

template void adam_step(BasicTensor<float>&, const BasicTensor<float>&,
                        AdamState<float>&);
template void adam_step(BasicTensor<double>&, const BasicTensor<double>&,
                        AdamState<double>&);
template class Adam<float>;
template class Adam<double>;

}  // namespace prae
