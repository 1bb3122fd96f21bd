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

#include "dirl/reward/reward_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirl/numerics/tensor.hpp"

namespace dirl::reward {
namespace {

using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

void validate_config(const RewardConfig& c) {
  if (c.vocab_size < 2) {
    throw std::invalid_argument("RewardConfig: vocab_size must be >= 2");
  }
  if (c.embed_dim < 1 || c.hidden_dim < 1 || c.branch_dim < 1 ||
      c.head_hidden < 1) {
    throw std::invalid_argument("RewardConfig: dimensions must be >= 1");
  }
  if (c.input_layers < 1) {
    throw std::invalid_argument("RewardConfig: input_layers must be >= 1");
  }
  const bool pad_ok = c.pad_id >= 0 && c.pad_id < c.vocab_size;
  const bool eos_ok = c.eos_id >= 0 && c.eos_id < c.vocab_size;
  if (!pad_ok || !eos_ok || c.pad_id == c.eos_id) {
    throw std::invalid_argument(
        "RewardConfig: pad_id and eos_id must be distinct vocabulary ids");
  }
}

void check_range(const std::vector<int>& ids, int vocab_size,
                 const char* what) {
  for (int id : ids) {
    if (id < 0 || id >= vocab_size) {
      throw std::invalid_argument(std::string("RewardModel: ") + what +
                                  " token out of vocabulary");
    }
  }
}

void validate_context(const std::vector<int>& context, int vocab_size) {
  if (context.empty()) {
    throw std::invalid_argument("RewardModel: context must be non-empty");
  }
  check_range(context, vocab_size, "context");
}

void validate_prefix(const std::vector<int>& prefix, const RewardConfig& c) {
  check_range(prefix, c.vocab_size, "prefix");
  for (int id : prefix) {
    if (id == c.eos_id) {
      throw std::invalid_argument("RewardModel: prefix must not contain EOS");
    }
  }
}

void validate_reply(const std::vector<int>& reply, const RewardConfig& c) {
  if (reply.empty()) {
    throw std::invalid_argument("RewardModel: reply must be non-empty");
  }
  check_range(reply, c.vocab_size, "reply");
  if (reply.back() != c.eos_id) {
    throw std::invalid_argument("RewardModel: reply must end with EOS");
  }
  for (std::size_t i = 0; i + 1 < reply.size(); ++i) {
    if (reply[i] == c.eos_id) {
      throw std::invalid_argument(
          "RewardModel: reply must not contain interior EOS");
    }
  }
}

}  // namespace

RewardModel::RewardModel(const RewardConfig& config, std::uint64_t seed)
    : config_(config) {
  validate_config(config_);
  numerics::Rng init_rng(numerics::hash_seed(seed, "reward.init"));
  params_.set_rng_seed(seed);
  const auto v = static_cast<std::size_t>(config_.vocab_size);
  const auto e = static_cast<std::size_t>(config_.embed_dim);
  const auto h = static_cast<std::size_t>(config_.hidden_dim);
  const auto b = static_cast<std::size_t>(config_.branch_dim);
  embed_ = numerics::Embedding::create(params_, "embed.table", v, e, init_rng);
  input_encoder_ = numerics::GruStack::create(
      params_, "input", e, h, static_cast<std::size_t>(config_.input_layers),
      init_rng);
  state_cell_ = numerics::GruCell::create(params_, "state.l0", e, h, init_rng);
  state_branch_ =
      numerics::Mlp::create(params_, "state_branch", {h, b}, false, init_rng);
  action_branch_ =
      numerics::Mlp::create(params_, "action_branch", {e, b}, false, init_rng);
  head_ = numerics::Mlp::create(
      params_, "head",
      {2 * b, static_cast<std::size_t>(config_.head_hidden), 1}, true,
      init_rng);
}

Var RewardModel::context_state(Tape& tape,
                               const std::vector<int>& context) const {
  validate_context(context, config_.vocab_size);
  std::vector<Var> hidden = input_encoder_.zero_state(tape);
  Var top{};
  for (int id : context) {
    top = input_encoder_.step(tape, embed_.lookup(tape, id), hidden);
  }
  return top;
}

Var RewardModel::pair_reward(Tape& tape, Var state, int action) const {
  Var action_vec = embed_.lookup(tape, action);
  Var sb = state_branch_.forward(tape, state);
  Var ab = action_branch_.forward(tape, action_vec);
  Var out = head_.forward(tape, tape.concat(sb, ab));
  return tape.pick(out, 0);
}

double RewardModel::step_reward(const std::vector<int>& context,
                                const std::vector<int>& prefix,
                                int action) const {
  validate_prefix(prefix, config_);
  if (action < 0 || action >= config_.vocab_size) {
    throw std::invalid_argument("RewardModel: action out of vocabulary");
  }
  Tape tape(Tape::Mode::no_grad);
  Var state = context_state(tape, context);
  for (int id : prefix) {
    state = state_cell_.step(tape, embed_.lookup(tape, id), state);
  }
  return tape.scalar(pair_reward(tape, state, action));
}

std::vector<double> RewardModel::step_rewards(
    const std::vector<int>& context, const std::vector<int>& reply) const {
  validate_reply(reply, config_);
  Tape tape(Tape::Mode::no_grad);
  Var state = context_state(tape, context);
  std::vector<double> rewards;
  rewards.reserve(reply.size());
  for (std::size_t i = 0; i < reply.size(); ++i) {
    rewards.push_back(tape.scalar(pair_reward(tape, state, reply[i])));
    if (i + 1 < reply.size()) {
      state = state_cell_.step(tape, embed_.lookup(tape, reply[i]), state);
    }
  }
  return rewards;
}

double RewardModel::trajectory_reward(const std::vector<int>& context,
                                      const std::vector<int>& reply) const {
  double total = 0.0;
  for (double r : step_rewards(context, reply)) {
    total += r;
  }
  return total;
}

Var RewardModel::trajectory_reward_var(Tape& tape,
                                       const std::vector<int>& context,
                                       const std::vector<int>& reply) const {
  validate_reply(reply, config_);
  Var state = context_state(tape, context);
  Var total{};
  for (std::size_t i = 0; i < reply.size(); ++i) {
    Var r = pair_reward(tape, state, reply[i]);
    total = (i == 0) ? r : tape.add(total, r);
    if (i + 1 < reply.size()) {
      state = state_cell_.step(tape, embed_.lookup(tape, reply[i]), state);
    }
  }
  return total;
}

double RewardModel::partial_reward_mc(const policy::Generator& generator,
                                      const std::vector<int>& context,
                                      const std::vector<int>& prefix,
                                      int n_rollouts,
                                      numerics::Rng& rng) const {
  if (n_rollouts < 1) {
    throw std::invalid_argument("RewardModel: n_rollouts must be >= 1");
  }
  if (!prefix.empty() && prefix.back() == config_.eos_id) {
    // A finished prefix has no continuation to average over; its
    // reward-to-go is exactly the final step's reward.
    return step_rewards(context, prefix).back();
  }
  validate_prefix(prefix, config_);
  const std::vector<policy::Trajectory> rollouts =
      generator.mc_rollouts(context, prefix, n_rollouts, rng);
  const std::size_t start = prefix.empty() ? 0 : prefix.size() - 1;
  double total = 0.0;
  for (const policy::Trajectory& t : rollouts) {
    const std::vector<double> rewards = step_rewards(context, t.actions);
    for (std::size_t i = start; i < rewards.size(); ++i) {
      total += rewards[i];
    }
  }
  return total / static_cast<double>(rollouts.size());
}

ImportanceReport RewardModel::importance_weights(
    const std::vector<Proposal>& samples) const {
  if (samples.empty()) {
    throw std::invalid_argument(
        "RewardModel: importance_weights needs at least one sample");
  }
  ImportanceReport report;
  report.samples.reserve(samples.size());
  double max_log_w = -std::numeric_limits<double>::infinity();
  for (const Proposal& p : samples) {
    if (!std::isfinite(p.log_q)) {
      throw std::invalid_argument("RewardModel: log_q must be finite");
    }
    WeightedSample ws;
    ws.trajectory = p.trajectory;
    ws.log_q = p.log_q;
    ws.reward =
        trajectory_reward(p.trajectory.context, p.trajectory.actions);
    ws.log_weight = ws.reward - ws.log_q;
    max_log_w = std::max(max_log_w, ws.log_weight);
    report.samples.push_back(std::move(ws));
  }
  // Shifting by the max keeps every exponential in range; the shift cancels
  // in the normalized weights and in the effective sample size.
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (WeightedSample& ws : report.samples) {
    const double u = std::exp(ws.log_weight - max_log_w);
    ws.normalized_weight = u;
    sum_w += u;
    sum_w2 += u * u;
  }
  for (WeightedSample& ws : report.samples) {
    ws.normalized_weight /= sum_w;
  }
  report.log_z_hat = max_log_w + std::log(sum_w) -
                     std::log(static_cast<double>(samples.size()));
  report.ess = (sum_w * sum_w) / sum_w2;
  return report;
}

Var RewardModel::reward_loss(Tape& tape,
                             const std::vector<policy::Example>& demo,
                             const std::vector<Proposal>& samples) const {
  if (demo.empty() || samples.empty()) {
    throw std::invalid_argument(
        "RewardModel: reward_loss needs non-empty demo and sample batches");
  }
  Var demo_sum{};
  for (std::size_t i = 0; i < demo.size(); ++i) {
    Var r = trajectory_reward_var(tape, demo[i].context, demo[i].reply);
    demo_sum = (i == 0) ? r : tape.add(demo_sum, r);
  }
  Var demo_mean = tape.scale(demo_sum, 1.0 / static_cast<double>(demo.size()));

  std::vector<Var> shifted_args;
  shifted_args.reserve(samples.size());
  double max_arg = -std::numeric_limits<double>::infinity();
  for (const Proposal& p : samples) {
    if (!std::isfinite(p.log_q)) {
      throw std::invalid_argument("RewardModel: log_q must be finite");
    }
    Var r =
        trajectory_reward_var(tape, p.trajectory.context, p.trajectory.actions);
    Var arg = tape.add(r, tape.leaf(Tensor::scalar(-p.log_q)));
    max_arg = std::max(max_arg, tape.scalar(arg));
    shifted_args.push_back(arg);
  }
  // The shift is a constant taken from the forward values, so it leaves the
  // gradient untouched while keeping every exp argument at or below zero.
  Var exp_sum{};
  for (std::size_t j = 0; j < shifted_args.size(); ++j) {
    Var e = tape.exp(
        tape.add(shifted_args[j], tape.leaf(Tensor::scalar(-max_arg))));
    exp_sum = (j == 0) ? e : tape.add(exp_sum, e);
  }
  Var log_mean_exp = tape.log(
      tape.scale(exp_sum, 1.0 / static_cast<double>(samples.size())));
  Var sampled_term = tape.add(log_mean_exp, tape.leaf(Tensor::scalar(max_arg)));
  return tape.add(tape.scale(demo_mean, -1.0), sampled_term);
}

double RewardModel::reward_loss_value(
    const std::vector<policy::Example>& demo,
    const std::vector<Proposal>& samples) const {
  if (demo.empty() || samples.empty()) {
    throw std::invalid_argument(
        "RewardModel: reward_loss needs non-empty demo and sample batches");
  }
  double demo_sum = 0.0;
  for (const policy::Example& ex : demo) {
    demo_sum += trajectory_reward(ex.context, ex.reply);
  }
  const double demo_mean = demo_sum * (1.0 / static_cast<double>(demo.size()));

  std::vector<double> args;
  args.reserve(samples.size());
  double max_arg = -std::numeric_limits<double>::infinity();
  for (const Proposal& p : samples) {
    if (!std::isfinite(p.log_q)) {
      throw std::invalid_argument("RewardModel: log_q must be finite");
    }
    const double arg =
        trajectory_reward(p.trajectory.context, p.trajectory.actions) +
        (-p.log_q);
    max_arg = std::max(max_arg, arg);
    args.push_back(arg);
  }
  double exp_sum = 0.0;
  for (double a : args) {
    exp_sum += std::exp(a - max_arg);
  }
  const double sampled_term =
      std::log(exp_sum * (1.0 / static_cast<double>(samples.size()))) +
      max_arg;
  return -demo_mean + sampled_term;
}

double RewardModel::reward_update(const std::vector<policy::Example>& demo,
                                  const std::vector<Proposal>& samples,
                                  numerics::AdamState& adam,
                                  double clip_norm) {
  if (!(clip_norm > 0.0)) {
    throw std::invalid_argument("RewardModel: clip_norm must be positive");
  }
  params_.zero_grads();
  Tape tape(Tape::Mode::record);
  Var loss = reward_loss(tape, demo, samples);
  tape.backward(loss);
  numerics::clip_gradients(params_, clip_norm);
  adam.step(params_);
  return tape.scalar(loss);
}

}  // namespace dirl::reward
