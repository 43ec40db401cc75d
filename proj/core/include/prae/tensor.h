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

#ifndef PRAE_TENSOR_H_
#define PRAE_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace prae {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense row-major array. T is float for training and inference; double is
// instantiated for gradient verification.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;
  explicit BasicTensor(Shape shape, T fill = T(0));
  BasicTensor(Shape shape, std::vector<T> data);

  const Shape& shape() const { return shape_; }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  T operator[](std::size_t i) const { return data_[i]; }

  // Index helpers for the layouts used by the layers: [B,C] and [B,C,N].
  T& at(std::size_t b, std::size_t c) { return data_[b * shape_[1] + c]; }
  T at(std::size_t b, std::size_t c) const {
    return data_[b * shape_[1] + c];
  }
  T& at(std::size_t b, std::size_t c, std::size_t n) {
    return data_[(b * shape_[1] + c) * shape_[2] + n];
  }
  T at(std::size_t b, std::size_t c, std::size_t n) const {
    return data_[(b * shape_[1] + c) * shape_[2] + n];
  }

  // Same data, new shape of identical element count.
  BasicTensor reshaped(Shape shape) const&;
  BasicTensor reshaped(Shape shape) &&;

  void fill(T value);
  bool all_finite() const;

  // Throws NumericError naming `where` if any element is NaN/Inf.
  void require_finite(const std::string& where) const;

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;

// Throws DimensionError when `actual` differs from `expected`.
void require_shape(const Shape& actual, const Shape& expected,
                   const std::string& where);

extern template class BasicTensor<float>;
extern template class BasicTensor<double>;

}  // namespace prae

#endif  // PRAE_TENSOR_H_
