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

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "dirl/corpus/dialogue.hpp"
#include "dirl/corpus/vocabulary.hpp"

namespace dirl::corpus {

/// Three-turn dialogue file format: UTF-8, one dialogue per line,
/// `turn1<TAB>turn2<TAB>turn3`, tokens space-separated, already lowercased.
/// An empty first field means the context has a single turn (turn2 only).
/// Turns 2 and 3 must carry at least one token; a triple violating that or
/// the length bounds below is dropped.
struct RawTriple {
  std::array<std::vector<std::string>, 3> turns;

  bool operator==(const RawTriple&) const = default;
};

/// Per-turn token-count bounds. A triple whose present turns are not all
/// inside [min_len, max_len] is dropped (counted, not an error).
struct LengthBounds {
  std::size_t min_len = 4;
  std::size_t max_len = 80;
};

struct TripleLoadStats {
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

/// Reads a triples file without a vocabulary, for preprocessing passes that
/// run before the vocabulary exists. A line without exactly three
/// tab-separated fields raises std::runtime_error naming the path and
/// 1-based line number; an unreadable file raises std::runtime_error.
std::vector<RawTriple> load_raw_triples(const std::string& path,
                                        LengthBounds bounds = {},
                                        TripleLoadStats* stats = nullptr);

/// Reads a triples file and encodes it: context = turns 1–2 (or turn 2
/// alone when the first field is empty), reply = turn 3 with kEosId
/// appended. Out-of-vocabulary tokens encode to kUnkId.
std::vector<Dialogue> load_triples(const std::string& path,
                                   const Vocabulary& vocab,
                                   LengthBounds bounds = {},
                                   TripleLoadStats* stats = nullptr);

/// Writes dialogues in the triple format above. Single-turn contexts emit
/// an empty first field; the reply's trailing EOS is not written. The
/// output reloads to the same dialogues under bounds that admit them.
void save_triples(const std::string& path,
                  const std::vector<Dialogue>& dialogues,
                  const Vocabulary& vocab);

}  // namespace dirl::corpus
