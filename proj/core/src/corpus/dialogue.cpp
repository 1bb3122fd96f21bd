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

#include "dirl/corpus/dialogue.hpp"

#include <stdexcept>
#include <string>

namespace dirl::corpus {

std::vector<int> encode_context(const Dialogue& dialogue) {
  const auto& ctx = dialogue.context;
  if (ctx.empty() || ctx.size() > 2) {
    throw std::invalid_argument("context must have 1 or 2 utterances, got " +
                                std::to_string(ctx.size()));
  }
  std::vector<int> flat = ctx[0];
  if (ctx.size() == 2) {
    flat.push_back(kSepId);
    flat.insert(flat.end(), ctx[1].begin(), ctx[1].end());
  }
  return flat;
}

void validate_dialogue(const Dialogue& dialogue) {
  const auto& ctx = dialogue.context;
  if (ctx.empty() || ctx.size() > 2) {
    throw std::invalid_argument("dialogue context must have 1 or 2 utterances");
  }
  for (const auto& utt : ctx) {
    if (utt.empty()) {
      throw std::invalid_argument("dialogue context utterance is empty");
    }
    for (int id : utt) {
      if (id == kPadId) {
        throw std::invalid_argument("PAD id inside a context utterance");
      }
    }
  }
  if (dialogue.reply.empty() || dialogue.reply.back() != kEosId) {
    throw std::invalid_argument("dialogue reply must end in EOS");
  }
  for (int id : dialogue.reply) {
    if (id == kPadId) {
      throw std::invalid_argument("PAD id inside a reply");
    }
  }
}

}  // namespace dirl::corpus
