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

#include "dirl/numerics/param_store.hpp"

#include <cmath>
#include <stdexcept>

namespace dirl::numerics {

Param& ParamStore::add(const std::string& name, Tensor value) {
  if (entries_.count(name)) {
    throw std::invalid_argument("ParamStore::add: duplicate parameter '" + name + "'");
  }
  Tensor grad(value.shape());
  auto [it, ok] = entries_.emplace(name, Param{name, std::move(value), std::move(grad)});
  (void)ok;
  return it->second;
}

Param& ParamStore::get(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw std::invalid_argument("ParamStore::get: unknown parameter '" + name + "'");
  }
  return it->second;
}

const Param& ParamStore::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw std::invalid_argument("ParamStore::get: unknown parameter '" + name + "'");
  }
  return it->second;
}

void ParamStore::zero_grads() {
  for (auto& [name, p] : entries_) p.grad.fill(0.0);
}

double ParamStore::grad_norm() const {
  double sq = 0.0;
  for (const auto& [name, p] : entries_) {
    for (double g : p.grad.data()) sq += g * g;
  }
  return std::sqrt(sq);
}

std::size_t ParamStore::total_values() const {
  std::size_t n = 0;
  for (const auto& [name, p] : entries_) n += p.value.numel();
  return n;
}

bool ParamStore::all_finite() const {
  for (const auto& [name, p] : entries_) {
    if (!p.value.all_finite()) return false;
  }
  return true;
}

ParamStore ParamStore::clone() const {
  ParamStore out(rng_seed_);
  for (const auto& [name, p] : entries_) {
    Param& q = out.add(name, p.value);
    q.grad = p.grad;
  }
  return out;
}

void ParamStore::assign_values(const ParamStore& other) {
  if (other.size() != size()) {
    throw std::invalid_argument("ParamStore::assign_values: entry count mismatch");
  }
  auto it = entries_.begin();
  for (const auto& [name, p] : other.entries_) {
    if (it->first != name || !it->second.value.same_shape(p.value)) {
      throw std::invalid_argument("ParamStore::assign_values: layout mismatch at '" + name +
                                  "'");
    }
    it->second.value = p.value;
    ++it;
  }
}

Tensor uniform_init(std::vector<std::size_t> shape, Rng& rng, double lo, double hi) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace dirl::numerics
