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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dirl/corpus/dialogue.hpp"
#include "dirl/corpus/vocabulary.hpp"

namespace dirl::corpus {

/// Reply rules for the synthetic task. Both echo the last context token:
/// kEchoFixed repeats it echo_repeats times; kEchoStochastic repeats it
/// echo_repeats or echo_repeats_alt times, each with probability 0.5.
enum class ReplyRule { kEchoFixed, kEchoStochastic };

/// Generation recipe for the synthetic dialogue task. Contexts are 1–2
/// utterances of uniform random content tokens; replies follow the rule
/// exactly, so every (context, reply) pair has a closed-form probability.
struct ToyTaskSpec {
  int content_vocab = 20;
  int min_utt_len = 3;
  int max_utt_len = 6;
  int min_turns = 1;
  int max_turns = 2;
  ReplyRule rule = ReplyRule::kEchoFixed;
  int echo_repeats = 3;
  int echo_repeats_alt = 2;
  std::size_t n_train = 2000;
  std::size_t n_valid = 200;
  std::size_t n_test = 200;
  std::uint64_t seed = 1;

  bool operator==(const ToyTaskSpec&) const = default;
};

/// Throws std::invalid_argument when fields are out of range (vocab < 1,
/// inverted length bounds, turns outside 1–2, repeat counts < 1, empty
/// train split).
void validate_toy_spec(const ToyTaskSpec& spec);

/// Key=value serialization, one pair per line, keys in a fixed order.
/// parse_toy_spec rejects unknown keys and malformed values.
std::string format_toy_spec(const ToyTaskSpec& spec);
ToyTaskSpec parse_toy_spec(const std::string& text);

/// Exact scorer for the task. Works on token ids alone; the rule only
/// relates reply ids to the last context token id and kEosId.
class ToyOracle {
 public:
  explicit ToyOracle(ToyTaskSpec spec);

  /// All valid replies for the context with their probabilities. Replies
  /// end in kEosId. Candidates that coincide are merged, so probabilities
  /// sum to 1 and the list has no duplicates.
  std::vector<std::pair<std::vector<int>, double>> reply_distribution(
      const std::vector<std::vector<int>>& context) const;

  /// Valid replies only, in the reply_distribution order.
  std::vector<std::vector<int>> enumerate_replies(
      const std::vector<std::vector<int>>& context) const;

  /// Exact log-probability of the reply given the context; replies outside
  /// the rule score -infinity. Throws std::invalid_argument on a malformed
  /// context (wrong turn count or an empty utterance).
  double log_prob(const Dialogue& dialogue) const;

  const ToyTaskSpec& spec() const { return spec_; }

 private:
  ToyTaskSpec spec_;
};

/// A generated corpus. Split contexts are disjoint by construction: the
/// generator deduplicates contexts globally before assigning them to
/// splits.
struct ToyCorpus {
  ToyTaskSpec spec;
  Vocabulary vocab;
  std::vector<Dialogue> train;
  std::vector<Dialogue> valid;
  std::vector<Dialogue> test;
  ToyOracle oracle;
};

/// Samples the corpus. Content tokens are single letters "a", "b", … when
/// content_vocab ≤ 26, otherwise "w0", "w1", …. Equal specs (including the
/// seed) produce bit-identical corpora. Throws std::runtime_error when the
/// context space is too small to yield enough distinct contexts.
ToyCorpus gen_toy_corpus(const ToyTaskSpec& spec);

}  // namespace dirl::corpus
