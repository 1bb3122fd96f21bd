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

#include "dirl/numerics/param_store.hpp"

namespace dirl::numerics {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam optimizer state: first/second moment per parameter plus the shared
/// step count used for bias correction.
class AdamState {
 public:
  AdamState(const ParamStore& store, AdamConfig config);

  /// One update from the gradients currently in the store. The store must
  /// keep the exact parameter layout it had at construction.
  void step(ParamStore& store);

  std::size_t step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  struct Moments {
    Tensor m;
    Tensor v;
  };
  std::map<std::string, Moments> moments_;
  AdamConfig config_;
  std::size_t step_ = 0;
};

/// Global-norm gradient clipping over every gradient in the store.
/// Returns the applied scale factor (1.0 when the norm is within bounds),
/// so applying it twice never rescales twice.
double clip_gradients(ParamStore& store, double max_norm);

}  // namespace dirl::numerics
