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

#include "dirl/numerics/tensor.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dirl::numerics {

namespace {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), values_(shape_numel(shape_), 0.0) {
  if (shape_.size() > 3) {
    throw std::invalid_argument("Tensor: rank " + std::to_string(shape_.size()) +
                                " exceeds the supported maximum of 3");
  }
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (shape_.size() > 3) {
    throw std::invalid_argument("Tensor: rank exceeds the supported maximum of 3");
  }
  if (values_.size() != shape_numel(shape_)) {
    throw std::invalid_argument("Tensor: value count does not match shape " + shape_str());
  }
}

Tensor Tensor::vec(std::size_t n) { return Tensor({n}); }

Tensor Tensor::matrix(std::size_t rows, std::size_t cols) { return Tensor({rows, cols}); }

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::from(std::vector<double> values) {
  std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

double& Tensor::at(std::size_t r, std::size_t c) {
  if (rank() != 2) throw std::invalid_argument("Tensor::at(r,c) requires rank 2");
  return values_[r * cols() + c];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  if (rank() != 2) throw std::invalid_argument("Tensor::at(r,c) requires rank 2");
  return values_[r * cols() + c];
}

void Tensor::fill(double value) {
  for (double& v : values_) v = value;
}

bool Tensor::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) out << ", ";
    out << shape_[i];
  }
  out << "]";
  return out.str();
}

void log_softmax_inplace(std::span<double> x) {
  if (x.empty()) throw std::invalid_argument("log_softmax: empty input");
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  double lse = m + std::log(s);
  for (double& v : x) v -= lse;
}

Tensor log_softmax(const Tensor& logits) {
  if (logits.rank() != 1) throw std::invalid_argument("log_softmax: rank-1 input required");
  Tensor out = logits;
  log_softmax_inplace(out.data());
  return out;
}

}  // namespace dirl::numerics
