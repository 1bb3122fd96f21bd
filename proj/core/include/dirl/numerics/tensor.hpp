// Copyright 2026 The dirl Authors.
//
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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dirl::numerics {

/// Dense row-major tensor of 64-bit reals. Rank is at most 3; in practice
/// the library uses vectors (rank 1) and matrices (rank 2). The element
/// count always equals the product of the dimensions.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor vec(std::size_t n);
  static Tensor matrix(std::size_t rows, std::size_t cols);
  static Tensor scalar(double value);
  static Tensor from(std::vector<double> values);  // rank-1

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t rows() const { return dim(0); }
  std::size_t cols() const { return dim(1); }
  std::size_t numel() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }

  void fill(double value);
  bool all_finite() const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string shape_str() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

/// In-place log-softmax over a rank-1 tensor using the max-subtraction
/// form, so a constant shift of the inputs leaves the result bit-identical
/// and exp of the outputs sums to 1 within 1e-12.
void log_softmax_inplace(std::span<double> x);
Tensor log_softmax(const Tensor& logits);

}  // namespace dirl::numerics
