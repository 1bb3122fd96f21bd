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

#include "dirl/numerics/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dirl::numerics {

namespace {

constexpr int kFormatVersion = 1;

[[noreturn]] void parse_error(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error("checkpoint '" + path.string() + "': " + what);
}

std::string hex_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace

void save_checkpoint(const ParamStore& store, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "dirl-checkpoint " << kFormatVersion << "\n";
  out << "rng_seed " << store.rng_seed() << "\n";
  out << "params " << store.size() << "\n";
  for (const auto& [name, p] : store) {
    out << "param " << name << " " << p.value.rank();
    for (std::size_t d : p.value.shape()) out << " " << d;
    out << "\n";
    const auto vals = p.value.data();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) out << " ";
      out << hex_double(vals[i]);
    }
    out << "\n";
  }
  // Write via a temp file and rename so partially written checkpoints
  // never appear under the final name.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("checkpoint: cannot open '" + tmp.string() + "'");
    f << out.str();
    if (!f.good()) throw std::runtime_error("checkpoint: write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

namespace {

struct ParsedCheckpoint {
  std::uint64_t rng_seed = 0;
  std::vector<std::pair<std::string, Tensor>> params;
};

ParsedCheckpoint parse_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) parse_error(path, "cannot open");
  ParsedCheckpoint out;

  std::string magic;
  int version = -1;
  if (!(f >> magic >> version)) parse_error(path, "missing header");
  if (magic != "dirl-checkpoint") parse_error(path, "bad magic '" + magic + "'");
  if (version != kFormatVersion) {
    parse_error(path, "unsupported format version " + std::to_string(version));
  }

  std::string key;
  if (!(f >> key >> out.rng_seed) || key != "rng_seed") parse_error(path, "missing rng_seed");
  std::size_t count = 0;
  if (!(f >> key >> count) || key != "params") parse_error(path, "missing params count");

  for (std::size_t i = 0; i < count; ++i) {
    std::string tag, name;
    std::size_t rank = 0;
    if (!(f >> tag >> name >> rank) || tag != "param") {
      parse_error(path, "bad param header at entry " + std::to_string(i));
    }
    if (rank > 3) parse_error(path, "rank too large for '" + name + "'");
    std::vector<std::size_t> shape(rank);
    std::size_t numel = 1;
    for (std::size_t d = 0; d < rank; ++d) {
      if (!(f >> shape[d])) parse_error(path, "bad shape for '" + name + "'");
      numel *= shape[d];
    }
    std::vector<double> values(numel);
    for (std::size_t v = 0; v < numel; ++v) {
      std::string token;
      if (!(f >> token)) parse_error(path, "truncated values for '" + name + "'");
      char* end = nullptr;
      values[v] = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') {
        parse_error(path, "bad value '" + token + "' in '" + name + "'");
      }
    }
    out.params.emplace_back(name, Tensor(std::move(shape), std::move(values)));
  }
  return out;
}

}  // namespace

ParamStore load_checkpoint(const std::filesystem::path& path) {
  ParsedCheckpoint parsed = parse_checkpoint(path);
  ParamStore store(parsed.rng_seed);
  for (auto& [name, tensor] : parsed.params) store.add(name, std::move(tensor));
  return store;
}

void load_checkpoint_into(ParamStore& store, const std::filesystem::path& path) {
  ParsedCheckpoint parsed = parse_checkpoint(path);
  if (parsed.params.size() != store.size()) {
    parse_error(path, "parameter count mismatch: file has " +
                          std::to_string(parsed.params.size()) + ", store has " +
                          std::to_string(store.size()));
  }
  for (auto& [name, tensor] : parsed.params) {
    if (!store.has(name)) parse_error(path, "unexpected parameter '" + name + "'");
    Param& p = store.get(name);
    if (!p.value.same_shape(tensor)) {
      parse_error(path, "shape mismatch for '" + name + "': file " + tensor.shape_str() +
                            ", store " + p.value.shape_str());
    }
    p.value = std::move(tensor);
  }
  store.set_rng_seed(parsed.rng_seed);
}

}  // namespace dirl::numerics
