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

#include <cstdint>
#include <vector>

#include "dirl/numerics/layers.hpp"
#include "dirl/numerics/param_store.hpp"
#include "dirl/numerics/rng.hpp"
#include "dirl/numerics/tape.hpp"
#include "dirl/numerics/tensor.hpp"

namespace dirl::policy {

/// Generator hyperparameters. pad_id and eos_id default to the reserved
/// vocabulary layout; tiny test vocabularies may relocate them. max_len
/// caps the number of freely chosen actions per reply (twice the default
/// synthetic task's reply length); a reply that exhausts it is closed by a
/// forced EOS, so action sequences hold at most max_len + 1 entries.
struct GeneratorConfig {
  int vocab_size = 0;
  int embed_dim = 16;
  int hidden_dim = 32;
  int enc_layers = 2;
  int dec_layers = 2;
  int pad_id = 0;
  int eos_id = 2;
  int max_len = 8;
  /// When set, beam search picks the completed hypothesis with the best
  /// per-token score instead of the best total.
  bool beam_length_norm = false;
};

/// One decoded reply. step_logps hold the log-density of each action under
/// the distribution it was actually drawn from: the model's distribution
/// for free steps, a renormalized one where sampling options masked EOS,
/// and exactly 0.0 for a forced terminal EOS (taken with probability 1).
/// total_logp is their sum, which makes exp(total_logp) the exact sampling
/// density of the whole sequence. For trajectories with eos_forced unset,
/// total_logp coincides with sequence_logprob on the same reply.
struct Trajectory {
  std::vector<int> context;
  std::vector<int> actions;
  std::vector<double> step_logps;
  double total_logp = 0.0;
  bool eos_forced = false;

  bool operator==(const Trajectory&) const = default;
};

/// Sampling controls. max_len < 0 uses the model's configured cap.
/// min_len masks EOS (renormalizing the remaining mass) until the reply
/// holds that many non-EOS actions, which realizes fixed-length policies.
struct SampleOptions {
  int max_len = -1;
  int min_len = 0;
};

struct EntropyEstimate {
  double per_trajectory = 0.0;
  double per_step = 0.0;
  std::size_t n_trajectories = 0;
  std::size_t n_steps = 0;
};

/// A (context, reply) pair for likelihood training. The context is already
/// flattened to a single id sequence and the reply ends with EOS.
struct Example {
  std::vector<int> context;
  std::vector<int> reply;
};

/// Recurrent encoder-decoder policy over token actions. The encoder is a
/// GRU stack over the flattened context; the decoder is a GRU stack with
/// scaled dot-product attention over the encoder states, and its first
/// input is a learned start vector rather than a BOS token, so the action
/// space stays exactly the vocabulary. PAD is masked to an effective
/// -infinity before normalization and never carries probability mass.
///
/// Every forward evaluation, whether for training losses or for sampling
/// and search, is built through the same tape code path; evaluation-only
/// callers use a no-grad tape.
class Generator {
 public:
  /// Index marking "no previous action" at the first decoder step.
  static constexpr int kStartOfReply = -1;

  /// Decoder cursor. Value-semantic: copying it forks the decode at the
  /// current position while sharing all already-built tape nodes.
  struct DecodeState {
    std::vector<numerics::Var> enc_states;
    std::vector<numerics::Var> hidden;
    int prev_action = kStartOfReply;
  };

  /// Initializes parameters uniformly in [-0.08, 0.08] from the seed.
  Generator(GeneratorConfig config, std::uint64_t seed);

  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;
  Generator(Generator&&) = default;
  Generator& operator=(Generator&&) = default;

  const GeneratorConfig& config() const { return config_; }
  numerics::ParamStore& params() { return params_; }
  const numerics::ParamStore& params() const { return params_; }

  /// Encodes a non-empty flattened context: one encoder state per input
  /// position, decoder hidden state seeded from the final encoder state of
  /// each layer. Throws std::invalid_argument on an empty context.
  DecodeState begin_decode(numerics::Tape& tape,
                           const std::vector<int>& context) const;

  /// Advances one decoder step from state.prev_action and returns the
  /// log-probability vector over the vocabulary (PAD forced to effective
  /// zero probability). The caller chooses an action and writes it to
  /// state.prev_action before the next call.
  numerics::Var next_logprobs(numerics::Tape& tape, DecodeState& state) const;

  /// Teacher-forced per-step log-probabilities log pi(a_t | s_t) of the
  /// given action sequence, one scalar Var per action, EOS step included.
  /// Requires actions to end with EOS and all ids to lie in the
  /// vocabulary.
  std::vector<numerics::Var> step_logprob_vars(
      numerics::Tape& tape, const std::vector<int>& context,
      const std::vector<int>& actions) const;

  /// Sum of step_logprob_vars values: the model's log-probability of
  /// generating exactly this reply.
  double sequence_logprob(const std::vector<int>& context,
                          const std::vector<int>& reply) const;

  /// Ancestral sampling until EOS, with a forced EOS once max_len free
  /// actions have been taken.
  Trajectory sample_reply(const std::vector<int>& context, numerics::Rng& rng,
                          SampleOptions options = {}) const;

  /// Deterministic beam search over complete replies with at most max_len
  /// free actions (max_len < 0 uses the configured cap). Hypotheses that
  /// exhaust the cap are closed with EOS at the model's own EOS
  /// log-probability, so every returned score equals sequence_logprob of
  /// the returned reply and eos_forced is never set. Ties break toward
  /// lower token ids. beam_size 1 is greedy decoding.
  Trajectory beam_search(const std::vector<int>& context, int beam_size,
                         int max_len = -1) const;

  /// Completes a reply prefix n_rollouts times by sampling. The prefix
  /// (which must not contain EOS and must fit within max_len) is preserved
  /// verbatim; its step_logps are the model's teacher-forced values.
  /// Rollouts with an empty prefix are distributed as sample_reply.
  std::vector<Trajectory> mc_rollouts(const std::vector<int>& context,
                                      const std::vector<int>& prefix,
                                      int n_rollouts,
                                      numerics::Rng& rng) const;

  /// Monte Carlo estimate of the causal entropy E[-log pi]: trajectories
  /// are sampled round-robin over the contexts and their negated
  /// total_logp values averaged. per_step divides by the total number of
  /// actions instead. Non-negative up to rounding, since every recorded
  /// step log-probability is <= 0.
  EntropyEstimate causal_entropy_estimate(
      const std::vector<std::vector<int>>& contexts, int n_samples,
      numerics::Rng& rng, SampleOptions options = {}) const;

  /// Mean per-token negative log-likelihood of the replies given their
  /// contexts, teacher-forced, averaged over all reply tokens in the
  /// batch.
  numerics::Var mle_loss(numerics::Tape& tape,
                         const std::vector<Example>& batch) const;

  /// Zeroes gradients, evaluates mle_loss on a recording tape and runs
  /// backward. Returns the loss value; the caller applies the optimizer.
  double mle_step(const std::vector<Example>& batch);

 private:
  GeneratorConfig config_;
  numerics::ParamStore params_;
  numerics::Embedding embed_;
  numerics::GruStack encoder_;
  numerics::GruStack decoder_;
  numerics::Param* start_ = nullptr;
  numerics::Param* out_w_ = nullptr;
  numerics::Param* out_b_ = nullptr;
  numerics::Tensor pad_mask_;

  int resolve_max_len(int max_len) const;
  int sample_action(const numerics::Tensor& logprobs, bool mask_eos,
                    numerics::Rng& rng, double* recorded_logp) const;
};

}  // namespace dirl::policy
