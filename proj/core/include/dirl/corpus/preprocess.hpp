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

#include <string>
#include <unordered_set>
#include <vector>

namespace dirl::corpus {

using NameLexicon = std::unordered_set<std::string>;

/// Small built-in lexicon of common English first names, for runs without a
/// user-supplied one. All entries are lowercase.
const NameLexicon& default_name_lexicon();

/// Normalizes one tokenized utterance:
///   1. ASCII letters are lowercased (multi-byte UTF-8 is left untouched),
///   2. tokens in the name lexicon become "⟨person⟩",
///   3. tokens matching [0-9]+(\.[0-9]+)? become "⟨number⟩".
/// The replacement tags match neither rule, so the map is idempotent.
std::vector<std::string> normalize_utterance(
    const std::vector<std::string>& tokens, const NameLexicon& names);

}  // namespace dirl::corpus
