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
#include <random>
#include <string_view>

namespace dirl::numerics {

/// Stable 64-bit hash of a label mixed into a seed. Used to derive
/// independent child streams so that every random draw in a run is a pure
/// function of the single top-level seed.
std::uint64_t hash_seed(std::uint64_t seed, std::string_view label);

/// Deterministic random source. The engine is std::mt19937_64 (its output
/// sequence is fixed by the standard) and all floating-point draws map raw
/// 64-bit output to doubles directly, so sequences are bit-reproducible
/// across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), n >= 1.
  std::size_t below(std::size_t n);

  /// Child stream derived from the parent's state and a label.
  Rng fork(std::string_view label) { return Rng(hash_seed(next(), label)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dirl::numerics
