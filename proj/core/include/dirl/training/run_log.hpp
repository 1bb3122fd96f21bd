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

#ifndef DIRL_TRAINING_RUN_LOG_HPP_
#define DIRL_TRAINING_RUN_LOG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace dirl::training {

/// Append-only training log. Every record is stamped with the config hash
/// and seed, keys are emitted sorted, and nothing time- or host-dependent
/// is ever written, so identical runs produce byte-identical logs.
class RunLog {
 public:
  RunLog() = default;
  RunLog(std::string config_hash, std::uint64_t seed);

  void record(nlohmann::json fields);

  const std::vector<nlohmann::json>& entries() const { return entries_; }
  const std::string& config_hash() const { return config_hash_; }
  std::uint64_t seed() const { return seed_; }

  /// One compact JSON object per line, newline-terminated.
  std::string to_ndjson() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::string config_hash_;
  std::uint64_t seed_ = 0;
  std::vector<nlohmann::json> entries_;
};

}  // namespace dirl::training

#endif  // DIRL_TRAINING_RUN_LOG_HPP_
