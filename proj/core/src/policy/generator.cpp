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

#include "dirl/policy/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dirl::policy {

using numerics::Rng;
using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

namespace {

constexpr double kPadPenalty = -1e9;

void validate_config(const GeneratorConfig& c) {
  if (c.vocab_size < 2) {
    throw std::invalid_argument("generator: vocab_size must be >= 2");
  }
  if (c.embed_dim < 1 || c.hidden_dim < 1) {
    throw std::invalid_argument("generator: embedding and hidden dims must be >= 1");
  }
  if (c.enc_layers < 1 || c.dec_layers < 1) {
    throw std::invalid_argument("generator: layer counts must be >= 1");
  }
  if (c.enc_layers != c.dec_layers) {
    throw std::invalid_argument(
        "generator: encoder and decoder layer counts must match for the "
        "state handoff");
  }
  if (c.pad_id < 0 || c.pad_id >= c.vocab_size || c.eos_id < 0 ||
      c.eos_id >= c.vocab_size || c.pad_id == c.eos_id) {
    throw std::invalid_argument("generator: bad pad/eos ids");
  }
  if (c.max_len < 1) {
    throw std::invalid_argument("generator: max_len must be >= 1");
  }
}

void validate_actions(const GeneratorConfig& c, const std::vector<int>& actions) {
  if (actions.empty() || actions.back() != c.eos_id) {
    throw std::invalid_argument("action sequence must end with EOS");
  }
  for (int a : actions) {
    if (a < 0 || a >= c.vocab_size) {
      throw std::invalid_argument("action id out of vocabulary range: " +
                                  std::to_string(a));
    }
  }
}

}  // namespace

Generator::Generator(GeneratorConfig config, std::uint64_t seed)
    : config_(config), params_(seed) {
  validate_config(config_);
  Rng init(numerics::hash_seed(seed, "generator.init"));

  const auto V = static_cast<std::size_t>(config_.vocab_size);
  const auto E = static_cast<std::size_t>(config_.embed_dim);
  const auto H = static_cast<std::size_t>(config_.hidden_dim);

  embed_ = numerics::Embedding::create(params_, "embed.table", V, E, init);
  encoder_ = numerics::GruStack::create(
      params_, "enc", E, H, static_cast<std::size_t>(config_.enc_layers), init);
  decoder_ = numerics::GruStack::create(
      params_, "dec", E, H, static_cast<std::size_t>(config_.dec_layers), init);
  start_ = &params_.add("dec.start", numerics::uniform_init({E}, init));
  out_w_ = &params_.add("out.w", numerics::uniform_init({V, 2 * H}, init));
  out_b_ = &params_.add("out.b", numerics::uniform_init({V}, init));

  pad_mask_ = Tensor::vec(V);
  pad_mask_.data()[static_cast<std::size_t>(config_.pad_id)] = kPadPenalty;
}

int Generator::resolve_max_len(int max_len) const {
  if (max_len < 0) return config_.max_len;
  if (max_len < 1) {
    throw std::invalid_argument("generator: max_len must be >= 1");
  }
  return max_len;
}

Generator::DecodeState Generator::begin_decode(
    Tape& tape, const std::vector<int>& context) const {
  if (context.empty()) {
    throw std::invalid_argument("generator: empty context");
  }
  DecodeState state;
  state.hidden = encoder_.zero_state(tape);
  state.enc_states.reserve(context.size());
  for (int id : context) {
    Var x = embed_.lookup(tape, id);
    state.enc_states.push_back(encoder_.step(tape, x, state.hidden));
  }
  // The decoder starts from the final encoder hidden state of each layer.
  state.prev_action = kStartOfReply;
  return state;
}

Var Generator::next_logprobs(Tape& tape, DecodeState& state) const {
  Var x = state.prev_action == kStartOfReply
              ? tape.param(*start_)
              : embed_.lookup(tape, state.prev_action);
  Var top = decoder_.step(tape, x, state.hidden);
  Var attended = numerics::attention_context(tape, top, state.enc_states);
  Var features = tape.concat(top, attended);
  Var logits =
      tape.add(tape.matvec(tape.param(*out_w_), features), tape.param(*out_b_));
  Var masked = tape.add(logits, tape.leaf(pad_mask_));
  return tape.log_softmax(masked);
}

std::vector<Var> Generator::step_logprob_vars(
    Tape& tape, const std::vector<int>& context,
    const std::vector<int>& actions) const {
  validate_actions(config_, actions);
  DecodeState state = begin_decode(tape, context);
  std::vector<Var> steps;
  steps.reserve(actions.size());
  for (int a : actions) {
    Var logprobs = next_logprobs(tape, state);
    steps.push_back(tape.pick(logprobs, static_cast<std::size_t>(a)));
    state.prev_action = a;
  }
  return steps;
}

double Generator::sequence_logprob(const std::vector<int>& context,
                                   const std::vector<int>& reply) const {
  Tape tape(Tape::Mode::no_grad);
  double total = 0.0;
  for (Var v : step_logprob_vars(tape, context, reply)) {
    total += tape.scalar(v);
  }
  return total;
}

int Generator::sample_action(const Tensor& logprobs, bool mask_eos, Rng& rng,
                             double* recorded_logp) const {
  const auto probs = logprobs.data();
  const auto eos = static_cast<std::size_t>(config_.eos_id);

  double renorm = 1.0;
  double log_renorm = 0.0;
  if (mask_eos) {
    const double p_eos = std::exp(probs[eos]);
    renorm = 1.0 - p_eos;
    if (renorm <= 0.0) {
      throw std::runtime_error(
          "generator: cannot mask EOS, it carries all probability mass");
    }
    log_renorm = std::log1p(-p_eos);
  }

  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t chosen = 0;
  bool found = false;
  std::size_t last_positive = 0;
  bool any_positive = false;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (mask_eos && i == eos) continue;
    const double p = std::exp(probs[i]) / renorm;
    if (p > 0.0) {
      last_positive = i;
      any_positive = true;
    }
    cum += p;
    if (u < cum) {
      chosen = i;
      found = true;
      break;
    }
  }
  if (!found) {
    // Rounding left cum marginally below 1; take the last feasible id.
    if (!any_positive) {
      throw std::runtime_error("generator: degenerate step distribution");
    }
    chosen = last_positive;
  }
  *recorded_logp = probs[chosen] - log_renorm;
  return static_cast<int>(chosen);
}

Trajectory Generator::sample_reply(const std::vector<int>& context, Rng& rng,
                                   SampleOptions options) const {
  const int max_len = resolve_max_len(options.max_len);
  if (options.min_len < 0 || options.min_len > max_len) {
    throw std::invalid_argument("generator: min_len must lie in [0, max_len]");
  }

  Tape tape(Tape::Mode::no_grad);
  DecodeState state = begin_decode(tape, context);

  Trajectory traj;
  traj.context = context;
  bool ended = false;
  for (int step = 0; step < max_len && !ended; ++step) {
    Var logprobs = next_logprobs(tape, state);
    const bool mask_eos =
        static_cast<int>(traj.actions.size()) < options.min_len;
    double logp = 0.0;
    const int action = sample_action(tape.value(logprobs), mask_eos, rng, &logp);
    traj.actions.push_back(action);
    traj.step_logps.push_back(logp);
    state.prev_action = action;
    ended = action == config_.eos_id;
  }
  if (!ended) {
    // Length cap reached: terminate deterministically. The step has
    // sampling density 1, hence log-density 0.
    traj.actions.push_back(config_.eos_id);
    traj.step_logps.push_back(0.0);
    traj.eos_forced = true;
  }
  for (double lp : traj.step_logps) traj.total_logp += lp;
  return traj;
}

std::vector<Trajectory> Generator::mc_rollouts(const std::vector<int>& context,
                                               const std::vector<int>& prefix,
                                               int n_rollouts,
                                               Rng& rng) const {
  if (n_rollouts < 1) {
    throw std::invalid_argument("generator: n_rollouts must be >= 1");
  }
  const int max_len = config_.max_len;
  if (static_cast<int>(prefix.size()) > max_len) {
    throw std::invalid_argument("generator: rollout prefix exceeds max_len");
  }
  for (int a : prefix) {
    if (a < 0 || a >= config_.vocab_size) {
      throw std::invalid_argument("generator: rollout prefix id out of range");
    }
    if (a == config_.eos_id) {
      throw std::invalid_argument(
          "generator: rollout prefix already contains EOS");
    }
  }

  // Rollouts within a chunk share the encoded context and prefix nodes;
  // chunking bounds tape growth when n_rollouts is large.
  constexpr int kChunk = 32;

  std::vector<Trajectory> rollouts;
  rollouts.reserve(static_cast<std::size_t>(n_rollouts));
  for (int done = 0; done < n_rollouts; done += kChunk) {
    const int batch = std::min(kChunk, n_rollouts - done);
    Tape tape(Tape::Mode::no_grad);
    DecodeState base = begin_decode(tape, context);

    std::vector<double> prefix_logps;
    prefix_logps.reserve(prefix.size());
    for (int a : prefix) {
      Var logprobs = next_logprobs(tape, base);
      prefix_logps.push_back(
          tape.value(logprobs).data()[static_cast<std::size_t>(a)]);
      base.prev_action = a;
    }

    for (int j = 0; j < batch; ++j) {
      DecodeState state = base;
      Trajectory traj;
      traj.context = context;
      traj.actions = prefix;
      traj.step_logps = prefix_logps;

      bool ended = false;
      while (static_cast<int>(traj.actions.size()) < max_len && !ended) {
        Var logprobs = next_logprobs(tape, state);
        double logp = 0.0;
        const int action =
            sample_action(tape.value(logprobs), false, rng, &logp);
        traj.actions.push_back(action);
        traj.step_logps.push_back(logp);
        state.prev_action = action;
        ended = action == config_.eos_id;
      }
      if (!ended) {
        traj.actions.push_back(config_.eos_id);
        traj.step_logps.push_back(0.0);
        traj.eos_forced = true;
      }
      for (double lp : traj.step_logps) traj.total_logp += lp;
      rollouts.push_back(std::move(traj));
    }
  }
  return rollouts;
}

Trajectory Generator::beam_search(const std::vector<int>& context,
                                  int beam_size, int max_len) const {
  if (beam_size < 1) {
    throw std::invalid_argument("generator: beam_size must be >= 1");
  }
  max_len = resolve_max_len(max_len);

  struct Hypothesis {
    DecodeState state;
    std::vector<int> actions;
    std::vector<double> step_logps;
    double total = 0.0;
  };
  struct Expansion {
    double score;
    std::size_t parent;
    int action;
  };

  Tape tape(Tape::Mode::no_grad);
  std::vector<Hypothesis> live;
  live.push_back(Hypothesis{begin_decode(tape, context), {}, {}, 0.0});

  std::vector<Hypothesis> completed;
  auto complete = [&](const Hypothesis& parent, double eos_logp) {
    Hypothesis done = parent;
    done.actions.push_back(config_.eos_id);
    done.step_logps.push_back(eos_logp);
    done.total += eos_logp;
    completed.push_back(std::move(done));
  };

  for (int step = 0; step < max_len && !live.empty(); ++step) {
    std::vector<Expansion> expansions;
    expansions.reserve(live.size() *
                       static_cast<std::size_t>(config_.vocab_size));
    std::vector<Tensor> logprobs(live.size());
    for (std::size_t h = 0; h < live.size(); ++h) {
      Var lp = next_logprobs(tape, live[h].state);
      logprobs[h] = tape.value(lp);
      const auto probs = logprobs[h].data();
      for (int a = 0; a < config_.vocab_size; ++a) {
        if (a == config_.pad_id) continue;
        expansions.push_back(Expansion{
            live[h].total + probs[static_cast<std::size_t>(a)], h, a});
      }
    }
    std::sort(expansions.begin(), expansions.end(),
              [](const Expansion& x, const Expansion& y) {
                if (x.score != y.score) return x.score > y.score;
                if (x.parent != y.parent) return x.parent < y.parent;
                return x.action < y.action;
              });

    std::vector<Hypothesis> next_live;
    const std::size_t width = static_cast<std::size_t>(beam_size);
    std::size_t taken = 0;
    for (const Expansion& e : expansions) {
      if (taken == width) break;
      ++taken;
      const Hypothesis& parent = live[e.parent];
      const double logp =
          logprobs[e.parent].data()[static_cast<std::size_t>(e.action)];
      if (e.action == config_.eos_id) {
        // An EOS expansion inside the cut retires its hypothesis and keeps
        // occupying one of the beam_size slots. Slot-consuming completion is
        // what makes beam_size 1 follow the per-step argmax chain exactly.
        complete(parent, logp);
        continue;
      }
      Hypothesis child;
      child.state = parent.state;
      child.state.prev_action = e.action;
      child.actions = parent.actions;
      child.actions.push_back(e.action);
      child.step_logps = parent.step_logps;
      child.step_logps.push_back(logp);
      child.total = e.score;
      next_live.push_back(std::move(child));
    }
    live = std::move(next_live);
  }

  // Hypotheses that used up the cap are closed with the model's own EOS
  // log-probability, so their scores stay comparable to free completions.
  for (auto& hyp : live) {
    Var lp = next_logprobs(tape, hyp.state);
    complete(hyp,
             tape.value(lp).data()[static_cast<std::size_t>(config_.eos_id)]);
  }
  if (completed.empty()) {
    throw std::logic_error("generator: beam search completed no hypothesis");
  }

  auto selection_score = [&](const Hypothesis& h) {
    return config_.beam_length_norm
               ? h.total / static_cast<double>(h.actions.size())
               : h.total;
  };
  const Hypothesis* best = &completed[0];
  for (const Hypothesis& h : completed) {
    const double s = selection_score(h);
    const double b = selection_score(*best);
    if (s > b || (s == b && h.actions < best->actions)) best = &h;
  }

  Trajectory traj;
  traj.context = context;
  traj.actions = best->actions;
  traj.step_logps = best->step_logps;
  traj.total_logp = best->total;
  traj.eos_forced = false;
  return traj;
}

EntropyEstimate Generator::causal_entropy_estimate(
    const std::vector<std::vector<int>>& contexts, int n_samples, Rng& rng,
    SampleOptions options) const {
  if (contexts.empty()) {
    throw std::invalid_argument("generator: entropy estimate needs contexts");
  }
  if (n_samples < 1) {
    throw std::invalid_argument("generator: n_samples must be >= 1");
  }

  EntropyEstimate est;
  double total = 0.0;
  std::size_t steps = 0;
  for (int i = 0; i < n_samples; ++i) {
    const auto& ctx = contexts[static_cast<std::size_t>(i) % contexts.size()];
    Trajectory traj = sample_reply(ctx, rng, options);
    total -= traj.total_logp;
    steps += traj.actions.size();
  }
  est.n_trajectories = static_cast<std::size_t>(n_samples);
  est.n_steps = steps;
  est.per_trajectory = total / static_cast<double>(n_samples);
  est.per_step = total / static_cast<double>(steps);
  return est;
}

Var Generator::mle_loss(Tape& tape, const std::vector<Example>& batch) const {
  if (batch.empty()) {
    throw std::invalid_argument("generator: empty MLE batch");
  }
  bool have = false;
  Var sum;
  std::size_t tokens = 0;
  for (const Example& ex : batch) {
    for (Var v : step_logprob_vars(tape, ex.context, ex.reply)) {
      sum = have ? tape.add(sum, v) : v;
      have = true;
      ++tokens;
    }
  }
  return tape.scale(sum, -1.0 / static_cast<double>(tokens));
}

double Generator::mle_step(const std::vector<Example>& batch) {
  params_.zero_grads();
  Tape tape(Tape::Mode::record);
  Var loss = mle_loss(tape, batch);
  tape.backward(loss);
  return tape.scalar(loss);
}

}  // namespace dirl::policy
