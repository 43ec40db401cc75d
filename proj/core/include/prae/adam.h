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

#ifndef PRAE_ADAM_H_
#define PRAE_ADAM_H_

#include <cstdint>
#include <vector>

#include "prae/layers.h"
#include "prae/tensor.h"

namespace prae {

struct AdamHyper {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  std::uint64_t step = 0;
  BasicTensor<T> m;
  BasicTensor<T> v;
  AdamHyper hyper;
};

// Bias-corrected Adam update of `param` in place. Moments are kept in the
// parameter's scalar type. Throws NumericError on a non-finite gradient
// before touching any state.
template <typename T>
void adam_step(BasicTensor<T>& param, const BasicTensor<T>& grad,
               AdamState<T>& state);

// One AdamState per parameter, stepped together.
template <typename T>
class Adam {
 public:
  Adam() = default;
  Adam(AdamHyper hyper, const std::vector<ParamRef<T>>& params);

  void step(const std::vector<ParamRef<T>>& params);

  std::vector<AdamState<T>>& states() { return states_; }
  const std::vector<AdamState<T>>& states() const { return states_; }
  const AdamHyper& hyper() const { return hyper_; }

 private:
  AdamHyper hyper_;
  std::vector<AdamState<T>> states_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace prae

#endif  // PRAE_ADAM_H_
