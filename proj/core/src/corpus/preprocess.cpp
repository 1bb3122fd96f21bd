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

#include "dirl/corpus/preprocess.hpp"

#include <regex>

#include "dirl/corpus/vocabulary.hpp"

namespace dirl::corpus {

const NameLexicon& default_name_lexicon() {
  static const NameLexicon kNames = {
      "james", "mary",    "john",   "patricia", "robert",  "jennifer",
      "michael", "linda", "david",  "elizabeth", "william", "barbara",
      "richard", "susan", "joseph", "jessica",  "thomas",  "sarah",
      "charles", "karen", "george", "nancy",    "frank",   "lisa",
      "edward", "betty",  "henry",  "margaret", "walter",  "ruth"};
  return kNames;
}

namespace {

std::string ascii_lower(const std::string& token) {
  std::string out = token;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_number_token(const std::string& token) {
  static const std::regex kNumber("[0-9]+(\\.[0-9]+)?");
  return std::regex_match(token, kNumber);
}

}  // namespace

std::vector<std::string> normalize_utterance(
    const std::vector<std::string>& tokens, const NameLexicon& names) {
  const auto& reserved = Vocabulary::reserved_tokens();
  const std::string& person = reserved[kPersonId];
  const std::string& number = reserved[kNumberId];

  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& raw : tokens) {
    std::string t = ascii_lower(raw);
    if (names.count(t) > 0) {
      out.push_back(person);
    } else if (is_number_token(t)) {
      out.push_back(number);
    } else {
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace dirl::corpus
