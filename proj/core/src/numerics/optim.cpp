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

#include "dirl/numerics/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace dirl::numerics {

AdamState::AdamState(const ParamStore& store, AdamConfig config) : config_(config) {
  for (const auto& [name, p] : store) {
    moments_.emplace(name, Moments{Tensor(p.value.shape()), Tensor(p.value.shape())});
  }
}

void AdamState::step(ParamStore& store) {
  if (store.size() != moments_.size()) {
    throw std::invalid_argument("AdamState::step: parameter layout changed");
  }
  ++step_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (auto& [name, p] : store) {
    auto it = moments_.find(name);
    if (it == moments_.end() || !it->second.m.same_shape(p.value)) {
      throw std::invalid_argument("AdamState::step: unknown or reshaped parameter '" + name +
                                  "'");
    }
    Moments& mom = it->second;
    for (std::size_t i = 0; i < p.value.numel(); ++i) {
      const double g = p.grad[i];
      mom.m[i] = b1 * mom.m[i] + (1.0 - b1) * g;
      mom.v[i] = b2 * mom.v[i] + (1.0 - b2) * g * g;
      const double mhat = mom.m[i] / corr1;
      const double vhat = mom.v[i] / corr2;
      p.value[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

double clip_gradients(ParamStore& store, double max_norm) {
  if (max_norm <= 0.0) throw std::invalid_argument("clip_gradients: max_norm must be > 0");
  const double norm = store.grad_norm();
  if (norm <= max_norm || norm == 0.0) return 1.0;
  const double factor = max_norm / norm;
  for (auto& [name, p] : store) {
    for (double& g : p.grad.data()) g *= factor;
  }
  return factor;
}

}  // namespace dirl::numerics
