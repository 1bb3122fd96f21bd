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

#include <vector>

#include "dirl/corpus/vocabulary.hpp"

namespace dirl::corpus {

/// One training example: the last one or two conversation turns as context,
/// and the turn that follows as the reply.
struct Dialogue {
  /// 1 or 2 utterances of token ids. No PAD ids appear in any utterance.
  std::vector<std::vector<int>> context;
  /// Token ids ending in kEosId.
  std::vector<int> reply;

  bool operator==(const Dialogue&) const = default;
};

/// Flattens the context into the single sequence the encoders consume:
/// two turns are joined by one kSepId, a single turn is passed through
/// unchanged. Throws std::invalid_argument on 0 or more than 2 utterances.
std::vector<int> encode_context(const Dialogue& dialogue);

/// Checks the Dialogue invariants (context size, no PAD ids, reply ends in
/// EOS and is non-empty). Throws std::invalid_argument on violation.
void validate_dialogue(const Dialogue& dialogue);

}  // namespace dirl::corpus
