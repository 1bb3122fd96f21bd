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

#ifndef DIRL_DISC_DISCRIMINATOR_HPP_
#define DIRL_DISC_DISCRIMINATOR_HPP_

#include <cstdint>
#include <vector>

#include "dirl/corpus/dialogue.hpp"
#include "dirl/numerics/layers.hpp"
#include "dirl/numerics/param_store.hpp"
#include "dirl/numerics/rng.hpp"
#include "dirl/numerics/tape.hpp"
#include "dirl/policy/generator.hpp"

namespace dirl::disc {

// Probabilities are clamped into [kProbFloor, 1 - kProbFloor] before any
// logarithm so rewards and Q-values stay finite.
inline constexpr double kProbFloor = 1e-6;

struct DiscriminatorConfig {
  int vocab_size = 0;
  int embed_dim = 16;
  int utt_hidden = 32;
  int ctx_hidden = 32;
  int utt_layers = 2;
  int ctx_layers = 2;
  int head_hidden = 32;
  int pad_id = 0;
  int eos_id = 2;
  // When set, disc_update places generator samples under the log D term and
  // expert samples under log(1 - D); this reproduces the mirrored adversarial
  // orientation, under which the score is the probability of a generated
  // dialogue. The default orientation trains classify as P(real).
  bool mirror_labels = false;
};

// Hierarchical binary classifier over dialogues. A recurrent utterance
// encoder summarizes each turn, a recurrent context encoder consumes exactly
// three summaries (first turn or a zero vector, last turn, reply) and a small
// feed-forward head turns the final state into one logit.
class Discriminator {
 public:
  Discriminator(const DiscriminatorConfig& config, std::uint64_t seed);

  Discriminator(const Discriminator&) = delete;
  Discriminator& operator=(const Discriminator&) = delete;
  Discriminator(Discriminator&&) = default;
  Discriminator& operator=(Discriminator&&) = default;

  const DiscriminatorConfig& config() const { return config_; }
  numerics::ParamStore& params() { return params_; }
  const numerics::ParamStore& params() const { return params_; }

  // Pre-sigmoid score of (context, reply). The reply may be a partial
  // sequence; it must be non-empty, as must the one or two context turns.
  numerics::Var classify_logit(numerics::Tape& tape,
                               const std::vector<std::vector<int>>& context,
                               const std::vector<int>& reply) const;

  // Probability that the dialogue is real, clamped away from 0 and 1.
  double classify(const std::vector<std::vector<int>>& context,
                  const std::vector<int>& reply) const;

  // Cross-entropy over both batches, 0.5 * (real term + fake term), each term
  // a per-example mean. Populates gradients and returns the loss; the caller
  // applies an optimizer step.
  double disc_update(const std::vector<corpus::Dialogue>& real_batch,
                     const std::vector<corpus::Dialogue>& fake_batch);

  // Expected log score of completions of the prefix under the generator's
  // sampling distribution, estimated from n_rollouts Monte Carlo samples.
  // A prefix that already ends with EOS is scored directly without rollouts
  // or any draw from the rng.
  double q_value(const policy::Generator& generator,
                 const std::vector<std::vector<int>>& context,
                 const std::vector<int>& prefix, int n_rollouts,
                 numerics::Rng& rng) const;

 private:
  numerics::Var utterance_summary(numerics::Tape& tape,
                                  const std::vector<int>& utterance) const;
  void validate_input(const std::vector<std::vector<int>>& context,
                      const std::vector<int>& reply) const;

  DiscriminatorConfig config_;
  numerics::ParamStore params_;
  numerics::Embedding embed_;
  numerics::GruStack utt_encoder_;
  numerics::GruStack ctx_encoder_;
  numerics::Mlp head_;
};

}  // namespace dirl::disc

#endif  // DIRL_DISC_DISCRIMINATOR_HPP_
