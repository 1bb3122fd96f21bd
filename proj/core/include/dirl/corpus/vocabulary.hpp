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

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace dirl::corpus {

/// Reserved token ids. These occupy the lowest ids in every vocabulary, in
/// this exact order, so model code can hard-wire them.
inline constexpr int kPadId = 0;
inline constexpr int kBosId = 1;
inline constexpr int kEosId = 2;
inline constexpr int kUnkId = 3;
inline constexpr int kSepId = 4;
inline constexpr int kPersonId = 5;
inline constexpr int kNumberId = 6;
inline constexpr int kReservedCount = 7;

/// Token ↔ id bijection. Ids [0, kReservedCount) are the reserved block
/// ("⟨pad⟩", "⟨bos⟩", "⟨eos⟩", "⟨unk⟩", "⟨/s⟩", "⟨person⟩", "⟨number⟩");
/// content tokens follow in frequency order. Immutable after construction.
class Vocabulary {
 public:
  /// The reserved token strings, indexed by the id constants above.
  static const std::vector<std::string>& reserved_tokens();

  /// Builds a vocabulary from tokenized utterances, keeping the
  /// (cap − kReservedCount) most frequent tokens. Ties are broken by
  /// lexicographic token order. Corpus tokens that collide with a reserved
  /// token string are not added again; they already have an id.
  /// Throws std::invalid_argument on an empty corpus or cap ≤ kReservedCount.
  static Vocabulary build(const std::vector<std::vector<std::string>>& corpus,
                          std::size_t cap);

  /// Builds a vocabulary with an explicit content-token list (ids are
  /// assigned in the given order, starting at kReservedCount). Throws
  /// std::invalid_argument on duplicates or reserved-token collisions.
  static Vocabulary from_content_tokens(std::vector<std::string> tokens);

  /// Total size including the reserved block.
  std::size_t size() const { return id_to_token_.size(); }

  /// Id for a token; unknown tokens map to kUnkId.
  int id(const std::string& token) const;

  bool contains(const std::string& token) const;

  /// Token string for an id. Throws std::out_of_range on an invalid id.
  const std::string& token(int id) const;

  /// Element-wise id(), so decode(encode(u)) == u for in-vocabulary u.
  std::vector<int> encode(const std::vector<std::string>& tokens) const;
  std::vector<std::string> decode(const std::vector<int>& ids) const;

  /// File format: '#'-prefixed header comments (one of them records the
  /// reserved block order), then one content token per line. The n-th
  /// content line has id kReservedCount + n. Reserved tokens are never
  /// listed as content lines.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  Vocabulary() = default;
  void add_content_token(const std::string& token);

  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

}  // namespace dirl::corpus
