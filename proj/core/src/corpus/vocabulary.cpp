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

#include "dirl/corpus/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dirl::corpus {

const std::vector<std::string>& Vocabulary::reserved_tokens() {
  static const std::vector<std::string> kReserved = {
      "⟨pad⟩",    "⟨bos⟩",    "⟨eos⟩",
      "⟨unk⟩",    "⟨/s⟩",     "⟨person⟩",
      "⟨number⟩"};
  return kReserved;
}

void Vocabulary::add_content_token(const std::string& token) {
  const int id = static_cast<int>(id_to_token_.size());
  if (!token_to_id_.emplace(token, id).second) {
    throw std::invalid_argument("duplicate vocabulary token: " + token);
  }
  id_to_token_.push_back(token);
}

Vocabulary Vocabulary::from_content_tokens(std::vector<std::string> tokens) {
  Vocabulary v;
  v.id_to_token_ = reserved_tokens();
  for (std::size_t i = 0; i < v.id_to_token_.size(); ++i) {
    v.token_to_id_.emplace(v.id_to_token_[i], static_cast<int>(i));
  }
  for (auto& t : tokens) {
    if (t.empty()) throw std::invalid_argument("empty vocabulary token");
    v.add_content_token(t);
  }
  return v;
}

Vocabulary Vocabulary::build(
    const std::vector<std::vector<std::string>>& corpus, std::size_t cap) {
  if (corpus.empty()) {
    throw std::invalid_argument("build_vocab: empty corpus");
  }
  if (cap <= static_cast<std::size_t>(kReservedCount)) {
    throw std::invalid_argument("build_vocab: cap must exceed reserved count");
  }

  // std::map keeps tokens sorted, which settles frequency ties
  // lexicographically after the stable sort below.
  std::map<std::string, std::size_t> counts;
  const auto& reserved = reserved_tokens();
  for (const auto& utt : corpus) {
    for (const auto& tok : utt) {
      if (std::find(reserved.begin(), reserved.end(), tok) != reserved.end()) {
        continue;
      }
      ++counts[tok];
    }
  }

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(),
                                                          counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });

  const std::size_t keep =
      std::min(ranked.size(), cap - static_cast<std::size_t>(kReservedCount));
  std::vector<std::string> content;
  content.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) content.push_back(ranked[i].first);
  return from_content_tokens(std::move(content));
}

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_id_.find(token) != token_to_id_.end();
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw std::out_of_range("vocabulary id out of range: " +
                            std::to_string(id));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocabulary::encode(
    const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocabulary::decode(const std::vector<int>& ids) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (int i : ids) tokens.push_back(token(i));
  return tokens;
}

void Vocabulary::save(const std::string& path) const {
  std::ostringstream out;
  out << "# dirl vocabulary v1\n";
  out << "# reserved block, ids 0-" << (kReservedCount - 1) << ":";
  for (const auto& t : reserved_tokens()) out << ' ' << t;
  out << "\n";
  out << "# content tokens follow; the n-th content line has id "
      << kReservedCount << " + n\n";
  for (std::size_t i = kReservedCount; i < id_to_token_.size(); ++i) {
    out << id_to_token_[i] << "\n";
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw std::runtime_error("cannot open vocabulary file for writing: " +
                             path);
  }
  file << out.str();
  file.flush();
  if (!file) {
    throw std::runtime_error("failed writing vocabulary file: " + path);
  }
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot open vocabulary file: " + path);
  }
  std::vector<std::string> content;
  std::string line;
  while (std::getline(file, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    content.push_back(line);
  }
  return from_content_tokens(std::move(content));
}

}  // namespace dirl::corpus
