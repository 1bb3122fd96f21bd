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

#ifndef DIRL_REWARD_REWARD_MODEL_HPP_
#define DIRL_REWARD_REWARD_MODEL_HPP_

#include <cstdint>
#include <vector>

#include "dirl/numerics/layers.hpp"
#include "dirl/numerics/optim.hpp"
#include "dirl/numerics/param_store.hpp"
#include "dirl/numerics/rng.hpp"
#include "dirl/numerics/tape.hpp"
#include "dirl/policy/generator.hpp"

namespace dirl::reward {

struct RewardConfig {
  int vocab_size = 0;
  int embed_dim = 16;
  // Hidden size of both the context input encoder (input_layers deep) and
  // the single-layer state encoder it initializes.
  int hidden_dim = 32;
  int input_layers = 2;
  int branch_dim = 32;
  int head_hidden = 32;
  int pad_id = 0;
  int eos_id = 2;
};

// A trajectory drawn from the proposal distribution together with the log
// density it was drawn at.
struct Proposal {
  policy::Trajectory trajectory;
  double log_q = 0.0;
};

struct WeightedSample {
  policy::Trajectory trajectory;
  double reward = 0.0;
  double log_q = 0.0;
  // reward - log_q, before normalization.
  double log_weight = 0.0;
  double normalized_weight = 0.0;
};

struct ImportanceReport {
  std::vector<WeightedSample> samples;
  // log of the mean unnormalized weight: the sampled log-partition estimate.
  double log_z_hat = 0.0;
  // (sum w)^2 / (sum w^2), between 1 and the sample count.
  double ess = 0.0;
};

// Scores one state-action pair at a time: a recurrent input encoder
// compresses the flat context into the initial hidden state of a one-layer
// recurrent state encoder that then consumes the generated tokens; the state
// and the acting token's embedding pass through separate branch layers whose
// concatenation a small head maps to the scalar reward.
class RewardModel {
 public:
  RewardModel(const RewardConfig& config, std::uint64_t seed);

  RewardModel(const RewardModel&) = delete;
  RewardModel& operator=(const RewardModel&) = delete;
  RewardModel(RewardModel&&) = default;
  RewardModel& operator=(RewardModel&&) = default;

  const RewardConfig& config() const { return config_; }
  numerics::ParamStore& params() { return params_; }
  const numerics::ParamStore& params() const { return params_; }

  // Reward of taking `action` after the tokens of `prefix` were generated.
  // The prefix must not contain EOS.
  double step_reward(const std::vector<int>& context,
                     const std::vector<int>& prefix, int action) const;

  // One reward per position of a complete reply, EOS step included. Each
  // entry is bit-identical to the step_reward call with the matching prefix.
  std::vector<double> step_rewards(const std::vector<int>& context,
                                   const std::vector<int>& reply) const;

  // Left-to-right sum of step_rewards; the additivity is exact, not a
  // tolerance.
  double trajectory_reward(const std::vector<int>& context,
                           const std::vector<int>& reply) const;

  // Same value as trajectory_reward built on the caller's tape, so gradients
  // can flow through every step.
  numerics::Var trajectory_reward_var(numerics::Tape& tape,
                                      const std::vector<int>& context,
                                      const std::vector<int>& reply) const;

  // Expected reward-to-go from the last prefix position, estimated over
  // n_rollouts policy completions. An empty prefix yields the expected whole
  // trajectory reward; a prefix ending in EOS is scored exactly from its
  // final step with no rollouts and no rng draws.
  double partial_reward_mc(const policy::Generator& generator,
                           const std::vector<int>& context,
                           const std::vector<int>& prefix, int n_rollouts,
                           numerics::Rng& rng) const;

  // Self-normalized weights w_j = exp(reward_j - log_q_j) computed in log
  // space. Normalized weights sum to one.
  ImportanceReport importance_weights(
      const std::vector<Proposal>& samples) const;

  // -mean demo reward + log mean exp(reward_j - log_q_j), the sampled
  // maximum-entropy objective, stabilized by a constant shift.
  numerics::Var reward_loss(numerics::Tape& tape,
                            const std::vector<policy::Example>& demo,
                            const std::vector<Proposal>& samples) const;

  // The same objective evaluated without a tape; suits large sample counts.
  double reward_loss_value(const std::vector<policy::Example>& demo,
                           const std::vector<Proposal>& samples) const;

  // One optimization step: gradients of reward_loss, clipped, applied
  // through the caller's Adam state. Returns the loss.
  double reward_update(const std::vector<policy::Example>& demo,
                       const std::vector<Proposal>& samples,
                       numerics::AdamState& adam, double clip_norm);

 private:
  numerics::Var context_state(numerics::Tape& tape,
                              const std::vector<int>& context) const;
  numerics::Var pair_reward(numerics::Tape& tape, numerics::Var state,
                            int action) const;

  RewardConfig config_;
  numerics::ParamStore params_;
  numerics::Embedding embed_;
  numerics::GruStack input_encoder_;
  numerics::GruCell state_cell_;
  numerics::Mlp state_branch_;
  numerics::Mlp action_branch_;
  numerics::Mlp head_;
};

}  // namespace dirl::reward

#endif  // DIRL_REWARD_REWARD_MODEL_HPP_
