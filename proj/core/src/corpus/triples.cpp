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

#include "dirl/corpus/triples.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dirl::corpus {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::vector<std::string> tokenize(const std::string& field) {
  std::istringstream in(field);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

std::vector<RawTriple> load_raw_triples(const std::string& path,
                                        LengthBounds bounds,
                                        TripleLoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open triples file: " + path);
  }

  // An absent turn is allowed only in the first field; present turns must
  // carry at least one token even when min_len is 0.
  const std::size_t min_len = std::max<std::size_t>(bounds.min_len, 1);

  std::vector<RawTriple> out;
  TripleLoadStats local;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 3 tab-separated turns, got " +
                               std::to_string(fields.size()));
    }

    RawTriple triple;
    for (std::size_t i = 0; i < 3; ++i) triple.turns[i] = tokenize(fields[i]);

    bool in_bounds = true;
    for (std::size_t i = 0; i < 3; ++i) {
      if (i == 0 && triple.turns[0].empty()) continue;
      const std::size_t n = triple.turns[i].size();
      if (n < min_len || n > bounds.max_len) {
        in_bounds = false;
        break;
      }
    }
    if (!in_bounds) {
      ++local.dropped;
      continue;
    }
    ++local.kept;
    out.push_back(std::move(triple));
  }
  if (stats != nullptr) *stats = local;
  return out;
}

std::vector<Dialogue> load_triples(const std::string& path,
                                   const Vocabulary& vocab,
                                   LengthBounds bounds,
                                   TripleLoadStats* stats) {
  const auto raw = load_raw_triples(path, bounds, stats);
  std::vector<Dialogue> out;
  out.reserve(raw.size());
  for (const auto& triple : raw) {
    Dialogue d;
    if (!triple.turns[0].empty()) {
      d.context.push_back(vocab.encode(triple.turns[0]));
    }
    d.context.push_back(vocab.encode(triple.turns[1]));
    d.reply = vocab.encode(triple.turns[2]);
    d.reply.push_back(kEosId);
    out.push_back(std::move(d));
  }
  return out;
}

void save_triples(const std::string& path,
                  const std::vector<Dialogue>& dialogues,
                  const Vocabulary& vocab) {
  std::ostringstream out;
  for (const auto& d : dialogues) {
    validate_dialogue(d);
    std::vector<int> reply_body(d.reply.begin(), d.reply.end() - 1);
    if (d.context.size() == 1) {
      out << '\t' << join(vocab.decode(d.context[0]));
    } else {
      out << join(vocab.decode(d.context[0])) << '\t'
          << join(vocab.decode(d.context[1]));
    }
    out << '\t' << join(vocab.decode(reply_body)) << '\n';
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw std::runtime_error("cannot open triples file for writing: " + path);
  }
  file << out.str();
  file.flush();
  if (!file) {
    throw std::runtime_error("failed writing triples file: " + path);
  }
}

}  // namespace dirl::corpus
