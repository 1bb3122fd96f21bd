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

#include "dirl/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "dirl/numerics/rng.hpp"

namespace dirl::numerics {

FiniteDiffReport finite_diff_check(ParamStore& store,
                                   const std::function<double(bool)>& loss,
                                   FiniteDiffOptions options) {
  const double l0 = loss(false);
  const double l1 = loss(false);
  if (!(l0 == l1)) {
    throw std::runtime_error(
        "finite_diff_check: loss is not deterministic under a fixed seed (" +
        std::to_string(l0) + " vs " + std::to_string(l1) + ")");
  }
  if (!std::isfinite(l0)) {
    throw std::runtime_error("finite_diff_check: loss is not finite");
  }

  loss(true);
  std::map<std::string, Tensor> analytic;
  for (const auto& [name, p] : store) analytic.emplace(name, p.grad);

  FiniteDiffReport report;
  for (auto& [name, p] : store) {
    Rng rng(hash_seed(options.seed, name));
    std::vector<std::size_t> coords;
    if (p.value.numel() <= options.coords_per_param) {
      for (std::size_t i = 0; i < p.value.numel(); ++i) coords.push_back(i);
    } else {
      for (std::size_t k = 0; k < options.coords_per_param; ++k) {
        coords.push_back(rng.below(p.value.numel()));
      }
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    }
    for (std::size_t i : coords) {
      const double saved = p.value[i];
      p.value[i] = saved + options.epsilon;
      const double lp = loss(false);
      p.value[i] = saved - options.epsilon;
      const double lm = loss(false);
      p.value[i] = saved;
      const double numeric = (lp - lm) / (2.0 * options.epsilon);
      const double a = analytic.at(name)[i];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      ++report.coords_checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = name;
        report.worst_coord = i;
      }
    }
  }
  // Leave the store holding the analytic gradients of the unperturbed point.
  loss(true);
  return report;
}

}  // namespace dirl::numerics
