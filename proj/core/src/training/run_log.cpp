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

#include "dirl/training/run_log.hpp"

#include <fstream>
#include <stdexcept>
#include <utility>

namespace dirl::training {

RunLog::RunLog(std::string config_hash, std::uint64_t seed)
    : config_hash_(std::move(config_hash)), seed_(seed) {}

void RunLog::record(nlohmann::json fields) {
  if (!fields.is_object()) {
    throw std::invalid_argument("RunLog: records must be JSON objects");
  }
  fields["config_hash"] = config_hash_;
  fields["seed"] = seed_;
  entries_.push_back(std::move(fields));
}

std::string RunLog::to_ndjson() const {
  std::string out;
  for (const nlohmann::json& e : entries_) {
    out += e.dump();
    out += "\n";
  }
  return out;
}

void RunLog::save(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("RunLog: cannot open " + path.string());
  }
  f << to_ndjson();
  if (!f) {
    throw std::runtime_error("RunLog: write failed for " + path.string());
  }
}

}  // namespace dirl::training
