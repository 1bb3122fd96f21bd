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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dirl/numerics/rng.hpp"
#include "dirl/numerics/tensor.hpp"

namespace dirl::numerics {

/// A named parameter with its gradient accumulator; both always share one
/// shape.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
};

/// Named map of parameters with deterministic (lexicographic) iteration
/// order. Entries are stable in memory once added, so layers may hold
/// Param pointers for the lifetime of the store.
class ParamStore {
 public:
  ParamStore() = default;
  explicit ParamStore(std::uint64_t rng_seed) : rng_seed_(rng_seed) {}

  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  Param& add(const std::string& name, Tensor value);
  Param& get(const std::string& name);
  const Param& get(const std::string& name) const;
  bool has(const std::string& name) const { return entries_.count(name) != 0; }
  std::size_t size() const { return entries_.size(); }

  void zero_grads();
  double grad_norm() const;
  std::size_t total_values() const;
  bool all_finite() const;

  /// Deep copy of values and grads (ParamStore is otherwise move-only so
  /// accidental copies of large stores cannot happen silently).
  ParamStore clone() const;
  /// Overwrite values with those of an identically shaped store.
  void assign_values(const ParamStore& other);

  std::uint64_t rng_seed() const { return rng_seed_; }
  void set_rng_seed(std::uint64_t seed) { rng_seed_ = seed; }

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::map<std::string, Param> entries_;
  std::uint64_t rng_seed_ = 0;
};

/// Fresh tensor with entries drawn uniformly from [lo, hi).
Tensor uniform_init(std::vector<std::size_t> shape, Rng& rng, double lo = -0.08,
                    double hi = 0.08);

}  // namespace dirl::numerics
