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

#include "dirl/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <utility>

namespace dirl::training {
namespace {

using numerics::AdamConfig;
using numerics::AdamState;
using numerics::Rng;
using numerics::Tape;
using numerics::Var;
using policy::Example;
using policy::Generator;
using policy::Trajectory;

std::vector<int> flatten_context(const TurnContext& turns) {
  corpus::Dialogue shell;
  shell.context = turns;
  return corpus::encode_context(shell);
}

/// Deterministic cycling minibatch source: reshuffles the order whenever a
/// full pass completes.
class BatchCycler {
 public:
  BatchCycler(std::size_t n, Rng rng) : order_(n), rng_(std::move(rng)) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    cursor_ = n;  // force a shuffle before the first batch
  }

  std::vector<std::size_t> take(std::size_t count) {
    std::vector<std::size_t> out;
    out.reserve(count);
    while (out.size() < count) {
      if (cursor_ >= order_.size()) {
        shuffle();
        cursor_ = 0;
      }
      out.push_back(order_[cursor_++]);
    }
    return out;
  }

 private:
  void shuffle() {
    for (std::size_t i = order_.size(); i > 1; --i) {
      std::swap(order_[i - 1], order_[rng_.below(i)]);
    }
  }

  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  Rng rng_;
};

int argmax_index(const numerics::Tensor& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.numel(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<int>(best);
}

struct SampledItem {
  std::vector<int> flat;
  Trajectory traj;
  std::vector<double> raw;  // one weight per policy-chosen step
};

/// Shared policy-gradient skeleton: sample one trajectory per context,
/// weight each chosen step by q(prefix) - lambda * log pi, subtract the
/// running baseline, and ascend the weighted log-likelihood. The q
/// callback sees the turn context, the flat context, the trajectory and
/// the step index.
GenUpdateStats run_policy_gradient(
    Generator& gen, const std::vector<TurnContext>& contexts,
    const TrainConfig& config, AdamState& adam, RunningBaseline& baseline,
    Rng& rng,
    const std::function<double(const TurnContext&, const std::vector<int>&,
                               const Trajectory&, std::size_t)>& q_of) {
  validate(config);
  if (contexts.empty()) {
    throw std::invalid_argument("policy gradient: empty context batch");
  }

  std::vector<SampledItem> items;
  items.reserve(contexts.size());
  for (const TurnContext& turns : contexts) {
    SampledItem item;
    item.flat = flatten_context(turns);
    item.traj = gen.sample_reply(item.flat, rng);
    const std::size_t chosen =
        item.traj.actions.size() - (item.traj.eos_forced ? 1 : 0);
    item.raw.reserve(chosen);
    for (std::size_t t = 0; t < chosen; ++t) {
      const double q = q_of(turns, item.flat, item.traj, t);
      item.raw.push_back(q -
                         config.lambda * item.traj.step_logps[t]);
    }
    items.push_back(std::move(item));
  }

  const double b = config.use_baseline ? baseline.value() : 0.0;

  Tape tape(Tape::Mode::record);
  Var total{};
  bool first = true;
  std::size_t n_steps = 0;
  double weight_sum = 0.0;
  for (const SampledItem& item : items) {
    std::vector<double> weights(item.traj.actions.size(), 0.0);
    for (std::size_t t = 0; t < item.raw.size(); ++t) {
      weights[t] = item.raw[t] - b;
      weight_sum += item.raw[t];
    }
    n_steps += item.raw.size();
    Var s = weighted_logprob_sum(tape, gen, item.flat, item.traj.actions,
                                 weights);
    total = first ? s : tape.add(total, s);
    first = false;
  }
  Var loss = tape.scale(total, -1.0 / static_cast<double>(n_steps));
  gen.params().zero_grads();
  tape.backward(loss);

  GenUpdateStats stats;
  stats.surrogate = tape.scalar(loss);
  stats.mean_weight = weight_sum / static_cast<double>(n_steps);
  stats.n_steps = n_steps;
  numerics::clip_gradients(gen.params(), config.clip_norm);
  stats.grad_norm = gen.params().grad_norm();
  adam.step(gen.params());

  if (config.use_baseline) {
    for (const SampledItem& item : items) {
      for (double w : item.raw) baseline.update(w);
    }
  }
  return stats;
}

nlohmann::json sample_dump(const Generator& gen,
                           const std::vector<std::vector<int>>& probe_flat,
                           int beam_size) {
  nlohmann::json replies = nlohmann::json::array();
  const std::size_t n = std::min<std::size_t>(2, probe_flat.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Trajectory t = gen.beam_search(probe_flat[i], beam_size);
    replies.push_back(t.actions);
  }
  return replies;
}

}  // namespace

bool EssMonitor::observe(double ess) {
  if (ess < floor) {
    ++streak;
  } else {
    streak = 0;
  }
  if (streak >= window && !warned) {
    warned = true;
    return true;
  }
  return false;
}

double validation_loss(const Generator& gen,
                       const std::vector<Example>& batch) {
  Tape tape(Tape::Mode::no_grad);
  return tape.scalar(gen.mle_loss(tape, batch));
}

double next_token_accuracy(const Generator& gen,
                           const std::vector<Example>& batch) {
  if (batch.empty()) {
    throw std::invalid_argument("next_token_accuracy: empty batch");
  }
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const Example& ex : batch) {
    Tape tape(Tape::Mode::no_grad);
    Generator::DecodeState state = gen.begin_decode(tape, ex.context);
    for (int gold : ex.reply) {
      const Var lp = gen.next_logprobs(tape, state);
      if (argmax_index(tape.value(lp)) == gold) ++correct;
      ++total;
      state.prev_action = gold;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

PretrainResult pretrain_mle(Generator& gen, const std::vector<Example>& train,
                            const std::vector<Example>& val,
                            const TrainConfig& config, RunLog& log) {
  validate(config);
  if (train.empty() || val.empty()) {
    throw std::invalid_argument("pretrain_mle: empty corpus split");
  }

  AdamConfig acfg;
  acfg.lr = config.lr;
  AdamState adam(gen.params(), acfg);
  BatchCycler cycler(train.size(),
                     Rng(numerics::hash_seed(config.seed, "pretrain.shuffle")));

  numerics::ParamStore best = gen.params().clone();
  PretrainResult result;
  result.best_val_loss = validation_loss(gen, val);

  auto run_validation = [&](int step, double train_loss) {
    const double val_loss = validation_loss(gen, val);
    const double acc = next_token_accuracy(gen, val);
    log.record({{"event", "pretrain_val"},
                {"step", step},
                {"train_loss", train_loss},
                {"val_loss", val_loss},
                {"val_next_token_accuracy", acc}});
    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      best = gen.params().clone();
    }
  };

  const std::size_t batches_per_epoch =
      (train.size() + static_cast<std::size_t>(config.batch_size) - 1) /
      static_cast<std::size_t>(config.batch_size);
  int step = 0;
  double last_loss = 0.0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    for (std::size_t bi = 0; bi < batches_per_epoch; ++bi) {
      std::vector<Example> batch;
      batch.reserve(static_cast<std::size_t>(config.batch_size));
      for (std::size_t idx :
           cycler.take(static_cast<std::size_t>(config.batch_size))) {
        batch.push_back(train[idx]);
      }
      last_loss = gen.mle_step(batch);
      numerics::clip_gradients(gen.params(), config.clip_norm);
      adam.step(gen.params());
      ++step;
      if (!std::isfinite(last_loss) || !gen.params().all_finite()) {
        gen.params().assign_values(best);
        log.record({{"event", "abort"}, {"step", step}});
        throw TrainingDiverged("pretrain_mle: non-finite loss at step " +
                               std::to_string(step));
      }
      if (step % config.val_every == 0) run_validation(step, last_loss);
    }
  }
  if (step % config.val_every != 0 && step > 0) {
    run_validation(step, last_loss);
  }

  gen.params().assign_values(best);
  result.steps = step;
  result.val_accuracy = next_token_accuracy(gen, val);
  log.record({{"event", "pretrain_done"},
              {"steps", step},
              {"best_val_loss", result.best_val_loss},
              {"val_next_token_accuracy", result.val_accuracy}});
  return result;
}

double teacher_forcing_step(Generator& gen, const std::vector<Example>& batch,
                            AdamState& adam, double clip_norm) {
  const double loss = gen.mle_step(batch);
  numerics::clip_gradients(gen.params(), clip_norm);
  adam.step(gen.params());
  return loss;
}

bool should_teacher_force(int iteration, double ratio) {
  if (ratio <= 0.0) return false;
  const int k = static_cast<int>(std::ceil(1.0 / ratio));
  return iteration % k == 0;
}

Var weighted_logprob_sum(Tape& tape, const Generator& gen,
                         const std::vector<int>& context,
                         const std::vector<int>& actions,
                         const std::vector<double>& weights) {
  if (weights.size() != actions.size()) {
    throw std::invalid_argument(
        "weighted_logprob_sum: one weight per action required");
  }
  const std::vector<Var> logps = gen.step_logprob_vars(tape, context, actions);
  Var total{};
  for (std::size_t t = 0; t < logps.size(); ++t) {
    Var term = tape.scale(logps[t], weights[t]);
    total = t == 0 ? term : tape.add(total, term);
  }
  return total;
}

GenUpdateStats generator_grad_ail(Generator& gen,
                                  const disc::Discriminator& disc,
                                  const std::vector<TurnContext>& contexts,
                                  const TrainConfig& config, AdamState& adam,
                                  RunningBaseline& baseline, Rng& rng) {
  return run_policy_gradient(
      gen, contexts, config, adam, baseline, rng,
      [&](const TurnContext& turns, const std::vector<int>&,
          const Trajectory& traj, std::size_t t) {
        const std::vector<int> prefix(traj.actions.begin(),
                                      traj.actions.begin() +
                                          static_cast<std::ptrdiff_t>(t + 1));
        return disc.q_value(gen, turns, prefix, config.n_rollouts, rng);
      });
}

GenUpdateStats generator_grad_airl(Generator& gen,
                                   const reward::RewardModel& model,
                                   const std::vector<TurnContext>& contexts,
                                   const TrainConfig& config, AdamState& adam,
                                   RunningBaseline& baseline, Rng& rng) {
  return run_policy_gradient(
      gen, contexts, config, adam, baseline, rng,
      [&](const TurnContext&, const std::vector<int>& flat,
          const Trajectory& traj, std::size_t t) {
        const std::vector<int> prefix(traj.actions.begin(),
                                      traj.actions.begin() +
                                          static_cast<std::ptrdiff_t>(t + 1));
        return model.partial_reward_mc(gen, flat, prefix, config.n_rollouts,
                                       rng);
      });
}

double disc_adversarial_step(disc::Discriminator& disc, const Generator& gen,
                             const std::vector<corpus::Dialogue>& real_batch,
                             const TrainConfig& config, AdamState& adam,
                             Rng& rng) {
  validate(config);
  if (real_batch.empty()) {
    throw std::invalid_argument("disc_adversarial_step: empty batch");
  }
  std::vector<corpus::Dialogue> fake;
  fake.reserve(real_batch.size());
  for (const corpus::Dialogue& d : real_batch) {
    const Trajectory t = gen.sample_reply(corpus::encode_context(d), rng);
    fake.push_back({d.context, t.actions});
  }
  const double loss = disc.disc_update(real_batch, fake);
  numerics::clip_gradients(disc.params(), config.clip_norm);
  adam.step(disc.params());
  return loss;
}

RewardStepStats reward_adversarial_step(
    reward::RewardModel& model, const Generator& gen,
    const std::vector<corpus::Dialogue>& demo_batch, const TrainConfig& config,
    AdamState& adam, Rng& rng) {
  validate(config);
  if (demo_batch.empty()) {
    throw std::invalid_argument("reward_adversarial_step: empty batch");
  }
  std::vector<Example> demo;
  std::vector<reward::Proposal> proposals;
  demo.reserve(demo_batch.size());
  proposals.reserve(demo_batch.size());
  for (const corpus::Dialogue& d : demo_batch) {
    const std::vector<int> flat = corpus::encode_context(d);
    demo.push_back({flat, d.reply});
    Trajectory t = gen.sample_reply(flat, rng);
    const double log_q = gen.sequence_logprob(flat, t.actions);
    proposals.push_back({std::move(t), log_q});
  }

  const reward::ImportanceReport report = model.importance_weights(proposals);
  RewardStepStats stats;
  stats.ess = report.ess;
  stats.log_z_hat = report.log_z_hat;
  for (const reward::WeightedSample& ws : report.samples) {
    stats.sample_mean_reward +=
        ws.reward / static_cast<double>(report.samples.size());
  }
  for (const Example& ex : demo) {
    stats.demo_mean_reward += model.trajectory_reward(ex.context, ex.reply) /
                              static_cast<double>(demo.size());
  }
  stats.loss = model.reward_update(demo, proposals, adam, config.clip_norm);
  return stats;
}

namespace {

/// Everything shared between the two adversarial loops: batch cycling,
/// probe contexts, per-iteration entropy, divergence rollback, dumps.
struct AdversarialHarness {
  AdversarialHarness(const std::vector<corpus::Dialogue>& train,
                     const std::vector<corpus::Dialogue>& val,
                     const TrainConfig& config, std::string_view stream_label)
      : train_(train),
        val_(val),
        config_(config),
        rng_(numerics::hash_seed(config.seed, stream_label)),
        cycler_(train.size(),
                Rng(numerics::hash_seed(config.seed, "train.batches"))) {
    if (train.empty() || val.empty()) {
      throw std::invalid_argument("adversarial training: empty corpus split");
    }
    const std::size_t n_probe = std::min<std::size_t>(8, val.size());
    for (std::size_t i = 0; i < n_probe; ++i) {
      probe_flat_.push_back(corpus::encode_context(val[i]));
    }
    dump_every_ = std::max(1, config.adv_iterations / 5);
  }

  std::vector<corpus::Dialogue> next_batch() {
    std::vector<corpus::Dialogue> batch;
    batch.reserve(static_cast<std::size_t>(config_.batch_size));
    for (std::size_t idx :
         cycler_.take(static_cast<std::size_t>(config_.batch_size))) {
      batch.push_back(train_[idx]);
    }
    return batch;
  }

  static std::vector<TurnContext> contexts_of(
      const std::vector<corpus::Dialogue>& batch) {
    std::vector<TurnContext> out;
    out.reserve(batch.size());
    for (const corpus::Dialogue& d : batch) out.push_back(d.context);
    return out;
  }

  static std::vector<Example> examples_of(
      const std::vector<corpus::Dialogue>& batch) {
    std::vector<Example> out;
    out.reserve(batch.size());
    for (const corpus::Dialogue& d : batch) {
      out.push_back({corpus::encode_context(d), d.reply});
    }
    return out;
  }

  double entropy_probe(const Generator& gen, int iteration) const {
    Rng ent(numerics::hash_seed(
        config_.seed, "train.entropy." + std::to_string(iteration)));
    return gen
        .causal_entropy_estimate(probe_flat_, 32, ent)
        .per_trajectory;
  }

  const std::vector<corpus::Dialogue>& train_;
  const std::vector<corpus::Dialogue>& val_;
  const TrainConfig& config_;
  Rng rng_;
  BatchCycler cycler_;
  std::vector<std::vector<int>> probe_flat_;
  int dump_every_ = 1;
};

}  // namespace

void train_dg_ail(Generator& gen, disc::Discriminator& disc,
                  const std::vector<corpus::Dialogue>& train,
                  const std::vector<corpus::Dialogue>& val,
                  const TrainConfig& config, RunLog& log) {
  validate(config);
  AdversarialHarness h(train, val, config, "train.dg_ail");
  AdamConfig acfg;
  acfg.lr = config.lr;
  AdamState gen_adam(gen.params(), acfg);
  AdamState disc_adam(disc.params(), acfg);
  RunningBaseline baseline;

  numerics::ParamStore good_gen = gen.params().clone();
  numerics::ParamStore good_disc = disc.params().clone();

  for (int iter = 0; iter < config.adv_iterations; ++iter) {
    double d_loss = 0.0;
    std::vector<corpus::Dialogue> last_real;
    for (int s = 0; s < config.disc_steps; ++s) {
      last_real = h.next_batch();
      d_loss = disc_adversarial_step(disc, gen, last_real, config, disc_adam,
                                     h.rng_);
    }

    GenUpdateStats gstats;
    for (int s = 0; s < config.gen_steps; ++s) {
      const std::vector<corpus::Dialogue> batch = h.next_batch();
      gstats = generator_grad_ail(gen, disc, h.contexts_of(batch), config,
                                  gen_adam, baseline, h.rng_);
    }

    nlohmann::json rec = {{"event", "iteration"},
                          {"iteration", iter},
                          {"d_loss", d_loss},
                          {"g_surrogate", gstats.surrogate},
                          {"mean_weight", gstats.mean_weight},
                          {"g_grad_norm", gstats.grad_norm},
                          {"n_steps", gstats.n_steps}};

    if (should_teacher_force(iter, config.teacher_forcing)) {
      rec["teacher_forcing_loss"] = teacher_forcing_step(
          gen, h.examples_of(h.next_batch()), gen_adam, config.clip_norm);
    }

    // Probe scores on a slice of the last real batch against fresh samples.
    double real_score = 0.0;
    double fake_score = 0.0;
    const std::size_t n_probe = std::min<std::size_t>(8, last_real.size());
    for (std::size_t i = 0; i < n_probe; ++i) {
      const corpus::Dialogue& d = last_real[i];
      real_score += disc.classify(d.context, d.reply);
      const Trajectory t =
          gen.sample_reply(corpus::encode_context(d), h.rng_);
      fake_score += disc.classify(d.context, t.actions);
    }
    rec["d_score_real"] = real_score / static_cast<double>(n_probe);
    rec["d_score_fake"] = fake_score / static_cast<double>(n_probe);
    rec["entropy"] = h.entropy_probe(gen, iter);

    const bool finite = gen.params().all_finite() &&
                        disc.params().all_finite() &&
                        std::isfinite(d_loss) &&
                        std::isfinite(gstats.surrogate);
    if (!finite) {
      gen.params().assign_values(good_gen);
      disc.params().assign_values(good_disc);
      log.record({{"event", "abort"}, {"iteration", iter}});
      throw TrainingDiverged("train_dg_ail: non-finite state at iteration " +
                             std::to_string(iter));
    }
    good_gen = gen.params().clone();
    good_disc = disc.params().clone();

    if (iter % h.dump_every_ == 0) {
      rec["samples"] = sample_dump(gen, h.probe_flat_, config.beam_size);
    }
    log.record(std::move(rec));
  }

  log.record({{"event", "summary"},
              {"iterations", config.adv_iterations},
              {"generator_digest", params_digest(gen.params())},
              {"critic_digest", params_digest(disc.params())}});
}

void train_dg_airl(Generator& gen, reward::RewardModel& model,
                   const std::vector<corpus::Dialogue>& train,
                   const std::vector<corpus::Dialogue>& val,
                   const TrainConfig& config, RunLog& log) {
  validate(config);
  AdversarialHarness h(train, val, config, "train.dg_airl");
  AdamConfig acfg;
  acfg.lr = config.lr;
  AdamState gen_adam(gen.params(), acfg);
  AdamState reward_adam(model.params(), acfg);
  RunningBaseline baseline;
  EssMonitor ess_monitor;

  numerics::ParamStore good_gen = gen.params().clone();
  numerics::ParamStore good_reward = model.params().clone();

  for (int iter = 0; iter < config.adv_iterations; ++iter) {
    RewardStepStats rstats;
    for (int s = 0; s < config.disc_steps; ++s) {
      rstats = reward_adversarial_step(model, gen, h.next_batch(), config,
                                       reward_adam, h.rng_);
    }

    GenUpdateStats gstats;
    for (int s = 0; s < config.gen_steps; ++s) {
      const std::vector<corpus::Dialogue> batch = h.next_batch();
      gstats = generator_grad_airl(gen, model, h.contexts_of(batch), config,
                                   gen_adam, baseline, h.rng_);
    }

    nlohmann::json rec = {{"event", "iteration"},
                          {"iteration", iter},
                          {"r_loss", rstats.loss},
                          {"ess", rstats.ess},
                          {"log_z_hat", rstats.log_z_hat},
                          {"demo_mean_reward", rstats.demo_mean_reward},
                          {"sample_mean_reward", rstats.sample_mean_reward},
                          {"g_surrogate", gstats.surrogate},
                          {"mean_weight", gstats.mean_weight},
                          {"g_grad_norm", gstats.grad_norm},
                          {"n_steps", gstats.n_steps}};

    if (should_teacher_force(iter, config.teacher_forcing)) {
      rec["teacher_forcing_loss"] = teacher_forcing_step(
          gen, h.examples_of(h.next_batch()), gen_adam, config.clip_norm);
    }
    rec["entropy"] = h.entropy_probe(gen, iter);

    if (ess_monitor.observe(rstats.ess)) {
      log.record({{"event", "warning"},
                  {"iteration", iter},
                  {"message", "importance weights degenerate"},
                  {"ess_floor", ess_monitor.floor},
                  {"window", ess_monitor.window}});
    }

    const bool finite = gen.params().all_finite() &&
                        model.params().all_finite() &&
                        std::isfinite(rstats.loss) &&
                        std::isfinite(gstats.surrogate);
    if (!finite) {
      gen.params().assign_values(good_gen);
      model.params().assign_values(good_reward);
      log.record({{"event", "abort"}, {"iteration", iter}});
      throw TrainingDiverged("train_dg_airl: non-finite state at iteration " +
                             std::to_string(iter));
    }
    good_gen = gen.params().clone();
    good_reward = model.params().clone();

    if (iter % h.dump_every_ == 0) {
      rec["samples"] = sample_dump(gen, h.probe_flat_, config.beam_size);
    }
    log.record(std::move(rec));
  }

  log.record({{"event", "summary"},
              {"iterations", config.adv_iterations},
              {"generator_digest", params_digest(gen.params())},
              {"critic_digest", params_digest(model.params())}});
}

std::string params_digest(const numerics::ParamStore& store) {
  std::string text;
  char buf[40];
  for (const auto& [name, param] : store) {
    text += name;
    text += ':';
    for (std::size_t d : param.value.shape()) {
      std::snprintf(buf, sizeof(buf), "%zu,", d);
      text += buf;
    }
    text += ';';
    for (std::size_t i = 0; i < param.value.numel(); ++i) {
      std::snprintf(buf, sizeof(buf), "%a ", param.value[i]);
      text += buf;
    }
    text += '\n';
  }
  return fnv1a_hex(text);
}

}  // namespace dirl::training
