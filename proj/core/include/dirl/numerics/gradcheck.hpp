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
#include <functional>
#include <string>

#include "dirl/numerics/param_store.hpp"

namespace dirl::numerics {

struct FiniteDiffOptions {
  double epsilon = 1e-5;
  /// Coordinates checked per parameter tensor (all of them when the tensor
  /// is smaller). Sampled deterministically from `seed`.
  std::size_t coords_per_param = 4;
  std::uint64_t seed = 0;
};

struct FiniteDiffReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_coord = 0;
  std::size_t coords_checked = 0;
};

/// Central-difference check of analytic gradients.
///
/// `loss(true)` must zero the store's gradients, run a forward+backward
/// pass and return the loss; `loss(false)` must return the loss without
/// touching gradients. The loss has to be deterministic: it is evaluated
/// twice up front and any bitwise difference raises a diagnostic error.
/// Relative error per coordinate is |analytic - numeric| divided by
/// max(|analytic|, |numeric|, 1e-8).
FiniteDiffReport finite_diff_check(ParamStore& store,
                                   const std::function<double(bool)>& loss,
                                   FiniteDiffOptions options = {});

}  // namespace dirl::numerics
