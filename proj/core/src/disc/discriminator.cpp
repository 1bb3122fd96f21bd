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

#include "dirl/disc/discriminator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dirl::disc {

using numerics::Rng;
using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

namespace {

void validate_config(const DiscriminatorConfig& c) {
  if (c.vocab_size < 2) {
    throw std::invalid_argument("discriminator: vocab_size must be >= 2");
  }
  if (c.embed_dim < 1 || c.utt_hidden < 1 || c.ctx_hidden < 1 ||
      c.head_hidden < 1) {
    throw std::invalid_argument("discriminator: dimensions must be >= 1");
  }
  if (c.utt_layers < 1 || c.ctx_layers < 1) {
    throw std::invalid_argument("discriminator: need at least one layer");
  }
  if (c.pad_id < 0 || c.pad_id >= c.vocab_size || c.eos_id < 0 ||
      c.eos_id >= c.vocab_size || c.pad_id == c.eos_id) {
    throw std::invalid_argument("discriminator: bad pad/eos ids");
  }
}

double clamp_prob(double p) {
  return std::min(std::max(p, kProbFloor), 1.0 - kProbFloor);
}

}  // namespace

Discriminator::Discriminator(const DiscriminatorConfig& config,
                             std::uint64_t seed)
    : config_(config) {
  validate_config(config_);
  Rng rng(numerics::hash_seed(seed, "discriminator.init"));
  params_.set_rng_seed(seed);
  embed_ = numerics::Embedding::create(
      params_, "embed.table", static_cast<std::size_t>(config_.vocab_size),
      static_cast<std::size_t>(config_.embed_dim), rng);
  utt_encoder_ = numerics::GruStack::create(
      params_, "utt", static_cast<std::size_t>(config_.embed_dim),
      static_cast<std::size_t>(config_.utt_hidden),
      static_cast<std::size_t>(config_.utt_layers), rng);
  ctx_encoder_ = numerics::GruStack::create(
      params_, "ctx", static_cast<std::size_t>(config_.utt_hidden),
      static_cast<std::size_t>(config_.ctx_hidden),
      static_cast<std::size_t>(config_.ctx_layers), rng);
  head_ = numerics::Mlp::create(
      params_, "head",
      {static_cast<std::size_t>(config_.ctx_hidden),
       static_cast<std::size_t>(config_.head_hidden), 1},
      true, rng);
}

void Discriminator::validate_input(
    const std::vector<std::vector<int>>& context,
    const std::vector<int>& reply) const {
  if (context.empty() || context.size() > 2) {
    throw std::invalid_argument("discriminator: context must have 1 or 2 turns");
  }
  if (reply.empty()) {
    throw std::invalid_argument("discriminator: empty reply");
  }
  auto check_ids = [&](const std::vector<int>& tokens, const char* what) {
    if (tokens.empty()) {
      throw std::invalid_argument(std::string("discriminator: empty ") + what);
    }
    for (int id : tokens) {
      if (id < 0 || id >= config_.vocab_size) {
        throw std::invalid_argument(std::string("discriminator: ") + what +
                                    " token id out of range");
      }
    }
  };
  for (const auto& turn : context) check_ids(turn, "context turn");
  check_ids(reply, "reply");
}

Var Discriminator::utterance_summary(Tape& tape,
                                     const std::vector<int>& utterance) const {
  std::vector<Var> hidden = utt_encoder_.zero_state(tape);
  Var top;
  for (int id : utterance) {
    top = utt_encoder_.step(tape, embed_.lookup(tape, id), hidden);
  }
  return top;
}

Var Discriminator::classify_logit(Tape& tape,
                                  const std::vector<std::vector<int>>& context,
                                  const std::vector<int>& reply) const {
  validate_input(context, reply);
  // The context encoder always sees three slots in turn order; a one-turn
  // context contributes a zero summary in the first slot.
  std::vector<Var> summaries;
  summaries.reserve(3);
  if (context.size() == 2) {
    summaries.push_back(utterance_summary(tape, context[0]));
  } else {
    summaries.push_back(
        tape.leaf(Tensor::vec(static_cast<std::size_t>(config_.utt_hidden))));
  }
  summaries.push_back(utterance_summary(tape, context.back()));
  summaries.push_back(utterance_summary(tape, reply));

  std::vector<Var> hidden = ctx_encoder_.zero_state(tape);
  Var state;
  for (Var s : summaries) state = ctx_encoder_.step(tape, s, hidden);
  return tape.pick(head_.forward(tape, state), 0);
}

double Discriminator::classify(const std::vector<std::vector<int>>& context,
                               const std::vector<int>& reply) const {
  Tape tape(Tape::Mode::no_grad);
  Var p = tape.sigmoid(classify_logit(tape, context, reply));
  return clamp_prob(tape.scalar(p));
}

double Discriminator::disc_update(
    const std::vector<corpus::Dialogue>& real_batch,
    const std::vector<corpus::Dialogue>& fake_batch) {
  if (real_batch.empty() || fake_batch.empty()) {
    throw std::invalid_argument("discriminator: empty update batch");
  }
  params_.zero_grads();
  Tape tape(Tape::Mode::record);

  // softplus(-z) = -log sigmoid(z) and softplus(z) = -log(1 - sigmoid(z)),
  // so the cross-entropy never sees a saturated probability.
  auto batch_term = [&](const std::vector<corpus::Dialogue>& batch,
                        bool label_real) {
    Var sum;
    bool have = false;
    for (const corpus::Dialogue& d : batch) {
      Var z = classify_logit(tape, d.context, d.reply);
      Var term = label_real ? tape.softplus(tape.scale(z, -1.0))
                            : tape.softplus(z);
      sum = have ? tape.add(sum, term) : term;
      have = true;
    }
    return tape.scale(sum, 1.0 / static_cast<double>(batch.size()));
  };

  const bool real_under_log_d = !config_.mirror_labels;
  Var loss = tape.scale(tape.add(batch_term(real_batch, real_under_log_d),
                                 batch_term(fake_batch, !real_under_log_d)),
                        0.5);
  tape.backward(loss);
  return tape.scalar(loss);
}

double Discriminator::q_value(const policy::Generator& generator,
                              const std::vector<std::vector<int>>& context,
                              const std::vector<int>& prefix, int n_rollouts,
                              numerics::Rng& rng) const {
  if (n_rollouts < 1) {
    throw std::invalid_argument("discriminator: n_rollouts must be >= 1");
  }
  if (!prefix.empty() && prefix.back() == config_.eos_id) {
    return std::log(classify(context, prefix));
  }
  corpus::Dialogue shell;
  shell.context = context;
  const std::vector<int> flat = corpus::encode_context(shell);
  double total = 0.0;
  for (const policy::Trajectory& t :
       generator.mc_rollouts(flat, prefix, n_rollouts, rng)) {
    total += std::log(classify(context, t.actions));
  }
  return total / static_cast<double>(n_rollouts);
}

}  // namespace dirl::disc
