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

#include <filesystem>

#include "dirl/numerics/param_store.hpp"

namespace dirl::numerics {

/// Checkpoint file layout (UTF-8 text, one header then one block per
/// parameter in lexicographic name order):
///
///   dirl-checkpoint 1
///   rng_seed <seed>
///   params <count>
///   param <name> <rank> <dim...>
///   <values, C hexfloat, space-separated>
///
/// Values round-trip bit-exactly through the hexfloat encoding.
void save_checkpoint(const ParamStore& store, const std::filesystem::path& path);

/// Load a checkpoint into a fresh store.
ParamStore load_checkpoint(const std::filesystem::path& path);

/// Load values into an existing store; names and shapes must match the
/// store's layout exactly.
void load_checkpoint_into(ParamStore& store, const std::filesystem::path& path);

}  // namespace dirl::numerics
