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

#ifndef DIRL_TRAINING_TRAINER_HPP_
#define DIRL_TRAINING_TRAINER_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirl/corpus/dialogue.hpp"
#include "dirl/disc/discriminator.hpp"
#include "dirl/numerics/optim.hpp"
#include "dirl/numerics/rng.hpp"
#include "dirl/numerics/tape.hpp"
#include "dirl/policy/generator.hpp"
#include "dirl/reward/reward_model.hpp"
#include "dirl/training/run_log.hpp"
#include "dirl/training/train_config.hpp"

namespace dirl::training {

/// Raised when a loss or parameter stops being finite. The catching side
/// still holds the last finite parameters (restored before throwing).
struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Arithmetic mean of every per-step weight seen so far. Updates read
/// value() before folding their own weights in, so a batch of identical
/// weights is centered to exactly zero from the second update on.
struct RunningBaseline {
  double mean = 0.0;
  std::size_t count = 0;

  double value() const { return count == 0 ? 0.0 : mean; }
  void update(double x) {
    ++count;
    mean += (x - mean) / static_cast<double>(count);
  }
};

/// Warns once when the effective sample size stays below `floor` for
/// `window` consecutive observations; recovering resets the streak.
struct EssMonitor {
  double floor = 1.5;
  int window = 50;
  int streak = 0;
  bool warned = false;

  /// Returns true exactly when the warning should be emitted.
  bool observe(double ess);
};

struct PretrainResult {
  int steps = 0;
  double best_val_loss = 0.0;
  double val_accuracy = 0.0;
};

/// Mean per-token negative log-likelihood over a held-out batch.
double validation_loss(const policy::Generator& gen,
                       const std::vector<policy::Example>& batch);

/// Fraction of reply positions (EOS included) where the teacher-forced
/// argmax equals the reference token.
double next_token_accuracy(const policy::Generator& gen,
                           const std::vector<policy::Example>& batch);

/// Shuffled-minibatch likelihood training with periodic validation. The
/// best-validation parameters are restored on return. A non-finite loss or
/// parameter restores the best checkpoint and throws TrainingDiverged.
PretrainResult pretrain_mle(policy::Generator& gen,
                            const std::vector<policy::Example>& train,
                            const std::vector<policy::Example>& val,
                            const TrainConfig& config, RunLog& log);

/// One clipped likelihood step on expert replies; identical in value to
/// mle_step on the same batch.
double teacher_forcing_step(policy::Generator& gen,
                            const std::vector<policy::Example>& batch,
                            numerics::AdamState& adam, double clip_norm);

/// Interleave rule: fire on every k-th iteration (counted from zero) with
/// k = ceil(1 / ratio); ratio 0 never fires.
bool should_teacher_force(int iteration, double ratio);

/// REINFORCE surrogate sum_t weight_t * log pi(a_t | s_t) with the weights
/// as constants; one weight per action, zeros contribute exactly nothing.
numerics::Var weighted_logprob_sum(numerics::Tape& tape,
                                   const policy::Generator& gen,
                                   const std::vector<int>& context,
                                   const std::vector<int>& actions,
                                   const std::vector<double>& weights);

/// A dialogue context as turns, the shape the discriminator consumes.
using TurnContext = std::vector<std::vector<int>>;

struct GenUpdateStats {
  double surrogate = 0.0;    // -mean weighted log-probability, pre-update
  double mean_weight = 0.0;  // before baseline subtraction
  double grad_norm = 0.0;    // after clipping
  std::size_t n_steps = 0;   // policy-chosen actions in the batch
};

/// One policy-gradient update where the per-step weight is the expected
/// discriminator log-score of completions minus lambda times the step
/// log-probability. Forced terminal EOS steps carry weight zero.
GenUpdateStats generator_grad_ail(policy::Generator& gen,
                                  const disc::Discriminator& disc,
                                  const std::vector<TurnContext>& contexts,
                                  const TrainConfig& config,
                                  numerics::AdamState& adam,
                                  RunningBaseline& baseline,
                                  numerics::Rng& rng);

/// Same update shape with the weight = sampled reward-to-go minus lambda
/// times the step log-probability.
GenUpdateStats generator_grad_airl(policy::Generator& gen,
                                   const reward::RewardModel& model,
                                   const std::vector<TurnContext>& contexts,
                                   const TrainConfig& config,
                                   numerics::AdamState& adam,
                                   RunningBaseline& baseline,
                                   numerics::Rng& rng);

/// One discriminator update on real dialogues against freshly sampled
/// generator replies for the same contexts. Returns the loss.
double disc_adversarial_step(disc::Discriminator& disc,
                             const policy::Generator& gen,
                             const std::vector<corpus::Dialogue>& real_batch,
                             const TrainConfig& config,
                             numerics::AdamState& adam, numerics::Rng& rng);

struct RewardStepStats {
  double loss = 0.0;
  double ess = 0.0;
  double log_z_hat = 0.0;
  double demo_mean_reward = 0.0;
  double sample_mean_reward = 0.0;
};

/// One reward-model update: demonstrations against fresh generator
/// proposals weighted by their model log-probability.
RewardStepStats reward_adversarial_step(
    reward::RewardModel& model, const policy::Generator& gen,
    const std::vector<corpus::Dialogue>& demo_batch, const TrainConfig& config,
    numerics::AdamState& adam, numerics::Rng& rng);

/// Adversarial imitation: alternates discriminator and policy-gradient
/// updates at the configured ratio with teacher forcing interleaved, and
/// logs scores, entropy and losses per iteration.
void train_dg_ail(policy::Generator& gen, disc::Discriminator& disc,
                  const std::vector<corpus::Dialogue>& train,
                  const std::vector<corpus::Dialogue>& val,
                  const TrainConfig& config, RunLog& log);

/// Adversarial inverse reinforcement learning: alternates reward-model and
/// policy-gradient updates, logging reward separation and the effective
/// sample size of the importance weights.
void train_dg_airl(policy::Generator& gen, reward::RewardModel& model,
                   const std::vector<corpus::Dialogue>& train,
                   const std::vector<corpus::Dialogue>& val,
                   const TrainConfig& config, RunLog& log);

/// Content hash of all parameter values (names, shapes, exact bits); the
/// identity stamped into summary records.
std::string params_digest(const numerics::ParamStore& store);

}  // namespace dirl::training

#endif  // DIRL_TRAINING_TRAINER_HPP_
