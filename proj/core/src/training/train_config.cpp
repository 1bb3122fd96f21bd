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

#include "dirl/training/train_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirl::training {
namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view key, std::string_view value) {
  const std::string text(value);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.empty()) {
    throw std::invalid_argument("TrainConfig: bad number for " +
                                std::string(key));
  }
  return v;
}

int parse_int(std::string_view key, std::string_view value) {
  const std::string text(value);
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || text.empty()) {
    throw std::invalid_argument("TrainConfig: bad integer for " +
                                std::string(key));
  }
  return static_cast<int>(v);
}

std::uint64_t parse_seed(std::string_view key, std::string_view value) {
  const std::string text(value);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || text.empty()) {
    throw std::invalid_argument("TrainConfig: bad integer for " +
                                std::string(key));
  }
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("TrainConfig: bad boolean for " +
                              std::string(key));
}

Preset parse_preset(std::string_view value) {
  if (value == "desk") return Preset::desk;
  if (value == "paper") return Preset::paper;
  throw std::invalid_argument("TrainConfig: unknown preset '" +
                              std::string(value) + "'");
}

void apply_key(TrainConfig& c, std::string_view key, std::string_view value) {
  if (key == "preset") {
    c.preset = parse_preset(value);
  } else if (key == "seed") {
    c.seed = parse_seed(key, value);
  } else if (key == "embed_dim") {
    c.embed_dim = parse_int(key, value);
  } else if (key == "hidden_dim") {
    c.hidden_dim = parse_int(key, value);
  } else if (key == "enc_layers") {
    c.enc_layers = parse_int(key, value);
  } else if (key == "dec_layers") {
    c.dec_layers = parse_int(key, value);
  } else if (key == "max_len") {
    c.max_len = parse_int(key, value);
  } else if (key == "lr") {
    c.lr = parse_double(key, value);
  } else if (key == "clip_norm") {
    c.clip_norm = parse_double(key, value);
  } else if (key == "batch_size") {
    c.batch_size = parse_int(key, value);
  } else if (key == "max_epochs") {
    c.max_epochs = parse_int(key, value);
  } else if (key == "val_every") {
    c.val_every = parse_int(key, value);
  } else if (key == "adv_iterations") {
    c.adv_iterations = parse_int(key, value);
  } else if (key == "disc_steps") {
    c.disc_steps = parse_int(key, value);
  } else if (key == "gen_steps") {
    c.gen_steps = parse_int(key, value);
  } else if (key == "lambda") {
    c.lambda = parse_double(key, value);
  } else if (key == "gamma") {
    c.gamma = parse_double(key, value);
  } else if (key == "n_rollouts") {
    c.n_rollouts = parse_int(key, value);
  } else if (key == "beam_size") {
    c.beam_size = parse_int(key, value);
  } else if (key == "teacher_forcing") {
    c.teacher_forcing = parse_double(key, value);
  } else if (key == "use_baseline") {
    c.use_baseline = parse_bool(key, value);
  } else if (key == "dropout") {
    c.dropout = parse_double(key, value);
  } else {
    throw std::invalid_argument("TrainConfig: unknown key '" +
                                std::string(key) + "'");
  }
}

}  // namespace

TrainConfig TrainConfig::desk() { return TrainConfig{}; }

TrainConfig TrainConfig::paper() {
  TrainConfig c;
  c.preset = Preset::paper;
  c.embed_dim = 200;
  c.hidden_dim = 1024;
  c.max_len = 20;
  c.lr = 1e-3;
  c.batch_size = 64;
  c.beam_size = 8;
  c.dropout = 0.3;
  return c;
}

double default_lambda_ail() { return 0.01; }
double default_lambda_airl() { return 0.1; }

void validate(const TrainConfig& c) {
  if (c.lambda < 0.0) {
    throw std::invalid_argument("TrainConfig: lambda must be >= 0");
  }
  if (c.gamma < 0.0 || c.gamma > 1.0) {
    throw std::invalid_argument("TrainConfig: gamma must lie in [0, 1]");
  }
  if (!(c.lr > 0.0)) {
    throw std::invalid_argument("TrainConfig: lr must be positive");
  }
  if (!(c.clip_norm > 0.0)) {
    throw std::invalid_argument("TrainConfig: clip_norm must be positive");
  }
  if (c.n_rollouts < 1) {
    throw std::invalid_argument("TrainConfig: n_rollouts must be >= 1");
  }
  if (c.beam_size < 1) {
    throw std::invalid_argument("TrainConfig: beam_size must be >= 1");
  }
  if (c.batch_size < 1) {
    throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  }
  if (c.disc_steps < 1 || c.gen_steps < 1) {
    throw std::invalid_argument("TrainConfig: update ratios must be >= 1");
  }
  if (c.teacher_forcing < 0.0 || c.teacher_forcing > 1.0) {
    throw std::invalid_argument(
        "TrainConfig: teacher_forcing must lie in [0, 1]");
  }
  if (c.max_epochs < 0 || c.adv_iterations < 0) {
    throw std::invalid_argument("TrainConfig: budgets must be >= 0");
  }
  if (c.val_every < 1) {
    throw std::invalid_argument("TrainConfig: val_every must be >= 1");
  }
  if (c.embed_dim < 1 || c.hidden_dim < 1 || c.enc_layers < 1 ||
      c.dec_layers < 1 || c.max_len < 1) {
    throw std::invalid_argument("TrainConfig: model dimensions must be >= 1");
  }
  if (c.dropout < 0.0 || c.dropout >= 1.0) {
    throw std::invalid_argument("TrainConfig: dropout must lie in [0, 1)");
  }
}

std::string canonical_text(const TrainConfig& c) {
  std::string out;
  auto line = [&out](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  };
  line("preset", c.preset == Preset::desk ? "desk" : "paper");
  line("seed", std::to_string(c.seed));
  line("embed_dim", std::to_string(c.embed_dim));
  line("hidden_dim", std::to_string(c.hidden_dim));
  line("enc_layers", std::to_string(c.enc_layers));
  line("dec_layers", std::to_string(c.dec_layers));
  line("max_len", std::to_string(c.max_len));
  line("lr", format_double(c.lr));
  line("clip_norm", format_double(c.clip_norm));
  line("batch_size", std::to_string(c.batch_size));
  line("max_epochs", std::to_string(c.max_epochs));
  line("val_every", std::to_string(c.val_every));
  line("adv_iterations", std::to_string(c.adv_iterations));
  line("disc_steps", std::to_string(c.disc_steps));
  line("gen_steps", std::to_string(c.gen_steps));
  line("lambda", format_double(c.lambda));
  line("gamma", format_double(c.gamma));
  line("n_rollouts", std::to_string(c.n_rollouts));
  line("beam_size", std::to_string(c.beam_size));
  line("teacher_forcing", format_double(c.teacher_forcing));
  line("use_baseline", c.use_baseline ? "true" : "false");
  line("dropout", format_double(c.dropout));
  return out;
}

TrainConfig parse_config(std::string_view text) {
  struct Entry {
    std::string key;
    std::string value;
  };
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;

    const std::size_t eq = raw.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("TrainConfig: line without '=': " +
                                  std::string(raw));
    }
    Entry e;
    e.key = std::string(trim(raw.substr(0, eq)));
    e.value = std::string(trim(raw.substr(eq + 1)));
    if (e.key.empty()) {
      throw std::invalid_argument("TrainConfig: empty key");
    }
    if (!seen.insert(e.key).second) {
      throw std::invalid_argument("TrainConfig: duplicate key '" + e.key +
                                  "'");
    }
    entries.push_back(std::move(e));
  }

  // Resolve the preset first so explicit keys override its defaults no
  // matter where the preset line sits in the file.
  TrainConfig config;
  for (const Entry& e : entries) {
    if (e.key == "preset") {
      config = parse_preset(e.value) == Preset::desk ? TrainConfig::desk()
                                                     : TrainConfig::paper();
    }
  }
  for (const Entry& e : entries) {
    if (e.key == "preset") continue;
    apply_key(config, e.key, e.value);
  }
  validate(config);
  return config;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

std::string config_hash(const TrainConfig& config) {
  return fnv1a_hex(canonical_text(config));
}

}  // namespace dirl::training
