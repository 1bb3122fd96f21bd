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

#include "dirl/cli/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirl/corpus/dialogue.hpp"
#include "dirl/corpus/toy_task.hpp"
#include "dirl/corpus/triples.hpp"
#include "dirl/corpus/vocabulary.hpp"
#include "dirl/disc/discriminator.hpp"
#include "dirl/eval/metrics.hpp"
#include "dirl/eval/report.hpp"
#include "dirl/numerics/checkpoint.hpp"
#include "dirl/numerics/gradcheck.hpp"
#include "dirl/numerics/rng.hpp"
#include "dirl/numerics/tape.hpp"
#include "dirl/policy/generator.hpp"
#include "dirl/reward/reward_model.hpp"
#include "dirl/training/run_log.hpp"
#include "dirl/training/train_config.hpp"
#include "dirl/training/trainer.hpp"

namespace dirl::cli {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

// Write-then-rename, so readers never observe a half-written file.
void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw std::runtime_error("cannot write " + tmp.string());
    }
    f << content;
    f.flush();
    if (!f) {
      throw std::runtime_error("short write to " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string file_digest(const fs::path& path) {
  return training::fnv1a_hex(read_file(path));
}

std::string iso_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// What ran, on which inputs, producing which outputs. Output digests let a
/// re-run be audited for reproducibility without keeping the files around.
/// Wall-clock timestamps live only here; training logs stay time-free.
class ManifestBuilder {
 public:
  ManifestBuilder(std::string command, std::string config_hash,
                  std::uint64_t seed)
      : started_(iso_utc_now()) {
    json_["artifact_version"] = 1;
    json_["command"] = std::move(command);
    json_["config_hash"] = std::move(config_hash);
    json_["config_path"] = "";
    json_["seed"] = seed;
    json_["inputs"] = nlohmann::json::object();
  }

  void config_path(const fs::path& path) {
    json_["config_path"] = path.string();
  }

  void input(const fs::path& path) {
    json_["inputs"][path.string()] = file_digest(path);
  }

  void input_if_exists(const fs::path& path) {
    if (fs::exists(path)) input(path);
  }

  void output(const fs::path& path) { outputs_.push_back(path); }

  /// Digests the declared outputs and writes manifest.json atomically.
  void write(const fs::path& dir) {
    nlohmann::json outs = nlohmann::json::object();
    for (const fs::path& p : outputs_) {
      outs[p.string()] = file_digest(p);
    }
    json_["outputs"] = std::move(outs);
    json_["started_at"] = started_;
    json_["finished_at"] = iso_utc_now();
    write_file_atomic(dir / "manifest.json", json_.dump(2) + "\n");
  }

 private:
  std::string started_;
  nlohmann::json json_;
  std::vector<fs::path> outputs_;
};

/// Flag values shared across subcommands; only the parsed subcommand's
/// options are ever read.
struct CommandArgs {
  std::string config_path;
  std::string preset;
  std::string data;
  std::string out;
  std::string checkpoint;
  std::uint64_t seed = 0;
  int n_rollouts = 0;
  double lambda = 0.0;
  std::string replies;
  std::string targets;
  std::string emb = "generator";
  std::string spec = "default";
};

/// Count of a flag that may not be registered on this subcommand.
std::size_t flag_count(const CLI::App& sub, const std::string& name) {
  const CLI::Option* opt = sub.get_option_no_throw(name);
  return opt == nullptr ? 0 : opt->count();
}

/// Precedence: preset flag, then config file, then individual flag
/// overrides. --config and --preset are mutually exclusive at parse time.
training::TrainConfig resolve_config(const CLI::App& sub,
                                     const CommandArgs& a) {
  training::TrainConfig cfg = training::TrainConfig::desk();
  if (flag_count(sub, "--preset") > 0 && a.preset == "paper") {
    cfg = training::TrainConfig::paper();
  }
  if (flag_count(sub, "--config") > 0) {
    cfg = training::parse_config(read_file(a.config_path));
  }
  if (flag_count(sub, "--seed") > 0) cfg.seed = a.seed;
  if (flag_count(sub, "--n-rollouts") > 0) cfg.n_rollouts = a.n_rollouts;
  if (flag_count(sub, "--lambda") > 0) cfg.lambda = a.lambda;
  training::validate(cfg);
  return cfg;
}

policy::GeneratorConfig generator_config(const training::TrainConfig& c,
                                         std::size_t vocab) {
  policy::GeneratorConfig g;
  g.vocab_size = static_cast<int>(vocab);
  g.embed_dim = c.embed_dim;
  g.hidden_dim = c.hidden_dim;
  g.enc_layers = c.enc_layers;
  g.dec_layers = c.dec_layers;
  g.max_len = c.max_len;
  return g;
}

disc::DiscriminatorConfig discriminator_config(const training::TrainConfig& c,
                                               std::size_t vocab) {
  disc::DiscriminatorConfig d;
  d.vocab_size = static_cast<int>(vocab);
  d.embed_dim = c.embed_dim;
  d.utt_hidden = c.hidden_dim;
  d.ctx_hidden = c.hidden_dim;
  d.utt_layers = c.enc_layers;
  d.ctx_layers = c.enc_layers;
  d.head_hidden = c.hidden_dim;
  return d;
}

reward::RewardConfig reward_config(const training::TrainConfig& c,
                                   std::size_t vocab) {
  reward::RewardConfig r;
  r.vocab_size = static_cast<int>(vocab);
  r.embed_dim = c.embed_dim;
  r.hidden_dim = c.hidden_dim;
  r.input_layers = c.enc_layers;
  r.branch_dim = c.hidden_dim;
  r.head_hidden = c.hidden_dim;
  return r;
}

policy::Generator build_generator(const training::TrainConfig& cfg,
                                  std::size_t vocab,
                                  const std::string& checkpoint) {
  policy::Generator gen(generator_config(cfg, vocab),
                        numerics::hash_seed(cfg.seed, "model.generator"));
  if (!checkpoint.empty()) {
    numerics::load_checkpoint_into(gen.params(), checkpoint);
  }
  return gen;
}

// Files written by preprocess/toygen carry already-filtered utterances;
// reading them back applies no length policy.
corpus::LengthBounds open_bounds() {
  return {1, std::numeric_limits<std::size_t>::max()};
}

struct DataSet {
  corpus::Vocabulary vocab;
  std::vector<corpus::Dialogue> train;
  std::vector<corpus::Dialogue> valid;
  std::vector<corpus::Dialogue> test;
};

DataSet load_data(const fs::path& dir, bool need_valid) {
  const fs::path vocab_path = dir / "vocab.txt";
  if (!fs::exists(vocab_path)) {
    throw std::runtime_error("missing " + vocab_path.string());
  }
  DataSet d{corpus::Vocabulary::load(vocab_path.string()), {}, {}, {}};
  d.train =
      corpus::load_triples((dir / "train.tsv").string(), d.vocab, open_bounds());
  if (fs::exists(dir / "valid.tsv")) {
    d.valid = corpus::load_triples((dir / "valid.tsv").string(), d.vocab,
                                   open_bounds());
  }
  if (fs::exists(dir / "test.tsv")) {
    d.test = corpus::load_triples((dir / "test.tsv").string(), d.vocab,
                                  open_bounds());
  }
  if (d.train.empty()) {
    throw std::runtime_error("no training dialogues under " + dir.string());
  }
  if (need_valid && d.valid.empty()) {
    throw std::runtime_error("no validation dialogues under " + dir.string());
  }
  return d;
}

std::vector<policy::Example> to_examples(
    const std::vector<corpus::Dialogue>& dialogues) {
  std::vector<policy::Example> out;
  out.reserve(dialogues.size());
  for (const corpus::Dialogue& d : dialogues) {
    out.push_back({corpus::encode_context(d), d.reply});
  }
  return out;
}

/// One line per rollout dump: the iteration it was taken at and the beam
/// replies for the probe contexts.
std::string samples_ndjson(const training::RunLog& log) {
  std::string out;
  for (const nlohmann::json& e : log.entries()) {
    if (!e.contains("samples")) continue;
    nlohmann::json rec;
    rec["iteration"] = e.value("iteration", -1);
    rec["samples"] = e.at("samples");
    out += rec.dump() + "\n";
  }
  return out;
}

int cmd_toygen(const CLI::App& sub, const CommandArgs& a) {
  corpus::ToyTaskSpec spec;
  if (a.spec != "default") {
    spec = corpus::parse_toy_spec(read_file(a.spec));
  }
  if (flag_count(sub, "--seed") > 0) spec.seed = a.seed;
  const corpus::ToyCorpus c = corpus::gen_toy_corpus(spec);

  const fs::path out = a.out;
  fs::create_directories(out);
  ManifestBuilder manifest(
      "toygen", training::fnv1a_hex(corpus::format_toy_spec(spec)), spec.seed);
  if (a.spec != "default") manifest.input(a.spec);

  write_file_atomic(out / "spec.cfg", corpus::format_toy_spec(spec));
  c.vocab.save((out / "vocab.txt").string());
  corpus::save_triples((out / "train.tsv").string(), c.train, c.vocab);
  corpus::save_triples((out / "valid.tsv").string(), c.valid, c.vocab);
  corpus::save_triples((out / "test.tsv").string(), c.test, c.vocab);
  for (const char* name :
       {"spec.cfg", "vocab.txt", "train.tsv", "valid.tsv", "test.tsv"}) {
    manifest.output(out / name);
  }
  manifest.write(out);

  std::printf(
      "toygen: %zu train / %zu valid / %zu test dialogues, vocab %zu -> %s\n",
      c.train.size(), c.valid.size(), c.test.size(), c.vocab.size(),
      out.string().c_str());
  return 0;
}

int cmd_preprocess(const CLI::App& sub, const CommandArgs& a) {
  const training::TrainConfig cfg = resolve_config(sub, a);
  const std::size_t vocab_cap =
      cfg.preset == training::Preset::paper ? 20000 : 64;

  corpus::TripleLoadStats stats;
  const corpus::LengthBounds bounds{1, 80};
  const std::vector<corpus::RawTriple> raw =
      corpus::load_raw_triples(a.data, bounds, &stats);
  if (raw.empty()) {
    throw std::runtime_error("no usable dialogues in " + a.data);
  }

  std::vector<std::vector<std::string>> token_lists;
  for (const corpus::RawTriple& t : raw) {
    for (const auto& turn : t.turns) {
      if (!turn.empty()) token_lists.push_back(turn);
    }
  }
  const corpus::Vocabulary vocab = corpus::Vocabulary::build(token_lists,
                                                             vocab_cap);
  const std::vector<corpus::Dialogue> all =
      corpus::load_triples(a.data, vocab, bounds);

  // Positional 8/1/1 split, so re-runs reproduce it without an RNG.
  std::vector<corpus::Dialogue> train;
  std::vector<corpus::Dialogue> valid;
  std::vector<corpus::Dialogue> test;
  for (std::size_t i = 0; i < all.size(); ++i) {
    switch (i % 10) {
      case 8: valid.push_back(all[i]); break;
      case 9: test.push_back(all[i]); break;
      default: train.push_back(all[i]);
    }
  }
  if (train.empty()) {
    throw std::runtime_error("too few dialogues to split: " + a.data);
  }

  const fs::path out = a.out;
  fs::create_directories(out);
  ManifestBuilder manifest("preprocess", training::config_hash(cfg), cfg.seed);
  if (flag_count(sub, "--config") > 0) {
    manifest.config_path(a.config_path);
    manifest.input(a.config_path);
  }
  manifest.input(a.data);

  vocab.save((out / "vocab.txt").string());
  corpus::save_triples((out / "train.tsv").string(), train, vocab);
  corpus::save_triples((out / "valid.tsv").string(), valid, vocab);
  corpus::save_triples((out / "test.tsv").string(), test, vocab);
  for (const char* name : {"vocab.txt", "train.tsv", "valid.tsv", "test.tsv"}) {
    manifest.output(out / name);
  }
  manifest.write(out);

  std::printf(
      "preprocess: kept %zu, dropped %zu, vocab %zu, split %zu/%zu/%zu -> %s\n",
      stats.kept, stats.dropped, vocab.size(), train.size(), valid.size(),
      test.size(), out.string().c_str());
  return 0;
}

int cmd_pretrain(const CLI::App& sub, const CommandArgs& a) {
  const training::TrainConfig cfg = resolve_config(sub, a);
  const DataSet data = load_data(a.data, /*need_valid=*/true);
  policy::Generator gen = build_generator(cfg, data.vocab.size(), a.checkpoint);

  const fs::path out = a.out;
  fs::create_directories(out);
  ManifestBuilder manifest("pretrain", training::config_hash(cfg), cfg.seed);
  if (flag_count(sub, "--config") > 0) {
    manifest.config_path(a.config_path);
    manifest.input(a.config_path);
  }
  for (const char* name : {"vocab.txt", "train.tsv", "valid.tsv"}) {
    manifest.input(fs::path(a.data) / name);
  }
  if (!a.checkpoint.empty()) manifest.input(a.checkpoint);

  training::RunLog log(training::config_hash(cfg), cfg.seed);
  training::PretrainResult result{};
  std::string divergence;
  try {
    result = training::pretrain_mle(gen, to_examples(data.train),
                                    to_examples(data.valid), cfg, log);
  } catch (const training::TrainingDiverged& e) {
    divergence = e.what();
  }

  write_file_atomic(out / "config.cfg", training::canonical_text(cfg));
  numerics::save_checkpoint(gen.params(), out / "checkpoint.ckpt");
  log.save(out / "runlog.ndjson");
  for (const char* name : {"config.cfg", "checkpoint.ckpt", "runlog.ndjson"}) {
    manifest.output(out / name);
  }
  manifest.write(out);

  if (!divergence.empty()) {
    std::fprintf(stderr, "error: %s\n", divergence.c_str());
    return 1;
  }
  std::printf(
      "pretrain: %d steps, best val loss %.6f, next-token accuracy %.4f -> "
      "%s\n",
      result.steps, result.best_val_loss, result.val_accuracy,
      out.string().c_str());
  return 0;
}

int cmd_train_adversarial(const CLI::App& sub, const CommandArgs& a,
                          bool airl) {
  const training::TrainConfig cfg = resolve_config(sub, a);
  const DataSet data = load_data(a.data, /*need_valid=*/true);
  policy::Generator gen = build_generator(cfg, data.vocab.size(), a.checkpoint);

  const fs::path out = a.out;
  fs::create_directories(out);
  ManifestBuilder manifest(airl ? "train-airl" : "train-ail",
                           training::config_hash(cfg), cfg.seed);
  if (flag_count(sub, "--config") > 0) {
    manifest.config_path(a.config_path);
    manifest.input(a.config_path);
  }
  for (const char* name : {"vocab.txt", "train.tsv", "valid.tsv"}) {
    manifest.input(fs::path(a.data) / name);
  }
  if (!a.checkpoint.empty()) manifest.input(a.checkpoint);

  training::RunLog log(training::config_hash(cfg), cfg.seed);
  std::optional<disc::Discriminator> critic_disc;
  std::optional<reward::RewardModel> critic_reward;
  std::string divergence;
  try {
    if (airl) {
      critic_reward.emplace(reward_config(cfg, data.vocab.size()),
                            numerics::hash_seed(cfg.seed, "model.reward"));
      training::train_dg_airl(gen, *critic_reward, data.train, data.valid, cfg,
                              log);
    } else {
      critic_disc.emplace(
          discriminator_config(cfg, data.vocab.size()),
          numerics::hash_seed(cfg.seed, "model.discriminator"));
      training::train_dg_ail(gen, *critic_disc, data.train, data.valid, cfg,
                             log);
    }
  } catch (const training::TrainingDiverged& e) {
    divergence = e.what();  // models hold the last finite parameters
  }

  write_file_atomic(out / "config.cfg", training::canonical_text(cfg));
  numerics::save_checkpoint(gen.params(), out / "checkpoint.ckpt");
  numerics::save_checkpoint(
      airl ? critic_reward->params() : critic_disc->params(),
      out / "critic.ckpt");
  log.save(out / "runlog.ndjson");
  write_file_atomic(out / "plotdata.tsv", eval::plot_data_tsv(log.entries()));
  write_file_atomic(out / "samples.ndjson", samples_ndjson(log));
  for (const char* name : {"config.cfg", "checkpoint.ckpt", "critic.ckpt",
                           "runlog.ndjson", "plotdata.tsv", "samples.ndjson"}) {
    manifest.output(out / name);
  }
  manifest.write(out);

  if (!divergence.empty()) {
    std::fprintf(stderr, "error: %s\n", divergence.c_str());
    return 1;
  }
  std::printf("%s: %d iterations on %zu dialogues -> %s\n",
              airl ? "train-airl" : "train-ail", cfg.adv_iterations,
              data.train.size(), out.string().c_str());
  return 0;
}

int cmd_generate(const CLI::App& sub, const CommandArgs& a) {
  const training::TrainConfig cfg = resolve_config(sub, a);
  const DataSet data = load_data(a.data, /*need_valid=*/false);
  policy::Generator gen = build_generator(cfg, data.vocab.size(), a.checkpoint);

  const char* split = "test.tsv";
  const std::vector<corpus::Dialogue>* prompts = &data.test;
  if (prompts->empty()) {
    split = "valid.tsv";
    prompts = &data.valid;
  }
  if (prompts->empty()) {
    split = "train.tsv";
    prompts = &data.train;
  }

  std::vector<corpus::Dialogue> decoded;
  decoded.reserve(prompts->size());
  for (const corpus::Dialogue& d : *prompts) {
    const policy::Trajectory t =
        gen.beam_search(corpus::encode_context(d), cfg.beam_size);
    decoded.push_back({d.context, t.actions});
  }

  const fs::path out = a.out;
  fs::create_directories(out);
  ManifestBuilder manifest("generate", training::config_hash(cfg), cfg.seed);
  if (flag_count(sub, "--config") > 0) {
    manifest.config_path(a.config_path);
    manifest.input(a.config_path);
  }
  manifest.input(fs::path(a.data) / "vocab.txt");
  manifest.input(fs::path(a.data) / split);
  manifest.input(a.checkpoint);

  corpus::save_triples((out / "replies.tsv").string(), decoded, data.vocab);
  manifest.output(out / "replies.tsv");
  manifest.write(out);

  std::printf("generate: %zu replies (beam %d) from %s -> %s\n",
              decoded.size(), cfg.beam_size, split, out.string().c_str());
  return 0;
}

std::vector<std::vector<std::string>> read_utterance_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot read " + p.string());
  }
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string token;
    while (ss >> token) tokens.push_back(token);
    out.push_back(std::move(tokens));
  }
  return out;
}

int cmd_evaluate(const CLI::App& sub, const CommandArgs& a) {
  const training::TrainConfig cfg = resolve_config(sub, a);
  const auto reply_tokens = read_utterance_file(a.replies);
  const auto target_tokens = read_utterance_file(a.targets);
  if (reply_tokens.empty() || reply_tokens.size() != target_tokens.size()) {
    throw std::runtime_error("replies and targets must pair up line by line");
  }

  // The data directory's saved vocabulary when given; otherwise one built
  // from the files themselves, which covers every token they contain.
  std::optional<corpus::Vocabulary> vocab;
  if (flag_count(sub, "--data") > 0) {
    vocab = corpus::Vocabulary::load((fs::path(a.data) / "vocab.txt").string());
  } else {
    std::vector<std::vector<std::string>> utterances;
    std::set<std::string> unique;
    for (const auto* side : {&reply_tokens, &target_tokens}) {
      for (const auto& toks : *side) {
        if (toks.empty()) continue;
        utterances.push_back(toks);
        unique.insert(toks.begin(), toks.end());
      }
    }
    vocab = corpus::Vocabulary::build(utterances,
                                      corpus::kReservedCount + unique.size());
  }

  std::optional<policy::Generator> gen;
  std::optional<eval::EmbeddingSource> emb;
  if (a.emb == "generator") {
    gen.emplace(generator_config(cfg, vocab->size()),
                numerics::hash_seed(cfg.seed, "model.generator"));
    if (!a.checkpoint.empty()) {
      numerics::load_checkpoint_into(gen->params(), a.checkpoint);
    }
    emb = eval::EmbeddingSource::from_generator(*gen, *vocab);
  } else {
    emb = eval::EmbeddingSource::from_file(a.emb);
  }

  std::vector<std::vector<int>> reply_ids;
  std::vector<std::vector<int>> target_ids;
  for (const auto& toks : reply_tokens) {
    std::vector<int> ids = vocab->encode(toks);
    ids.push_back(corpus::kEosId);
    reply_ids.push_back(std::move(ids));
  }
  for (const auto& toks : target_tokens) {
    std::vector<int> ids = vocab->encode(toks);
    ids.push_back(corpus::kEosId);
    target_ids.push_back(std::move(ids));
  }

  const eval::MetricReport report =
      eval::evaluate_pairs(reply_ids, target_ids, *vocab, *emb);
  std::fputs(report.table().c_str(), stdout);

  if (flag_count(sub, "--out") > 0) {
    const fs::path out = a.out;
    fs::create_directories(out);
    ManifestBuilder manifest("evaluate", training::config_hash(cfg), cfg.seed);
    if (flag_count(sub, "--config") > 0) {
      manifest.config_path(a.config_path);
      manifest.input(a.config_path);
    }
    manifest.input(a.replies);
    manifest.input(a.targets);
    if (flag_count(sub, "--data") > 0) {
      manifest.input(fs::path(a.data) / "vocab.txt");
    }
    if (!a.checkpoint.empty()) manifest.input(a.checkpoint);
    if (a.emb != "generator") manifest.input(a.emb);
    write_file_atomic(out / "report.ndjson", report.to_ndjson());
    manifest.output(out / "report.ndjson");
    manifest.write(out);
  }
  return 0;
}

/// The discriminator's update loss re-evaluated without touching gradients,
/// with the same op order, for difference-quotient probes.
double disc_loss_value(const disc::Discriminator& d,
                       const std::vector<corpus::Dialogue>& real,
                       const std::vector<corpus::Dialogue>& fake) {
  numerics::Tape tape(numerics::Tape::Mode::no_grad);
  auto batch_term = [&](const std::vector<corpus::Dialogue>& batch,
                        bool label_real) {
    numerics::Var sum;
    bool have = false;
    for (const corpus::Dialogue& dlg : batch) {
      numerics::Var z = d.classify_logit(tape, dlg.context, dlg.reply);
      numerics::Var term = label_real ? tape.softplus(tape.scale(z, -1.0))
                                      : tape.softplus(z);
      sum = have ? tape.add(sum, term) : term;
      have = true;
    }
    return tape.scale(sum, 1.0 / static_cast<double>(batch.size()));
  };
  const bool real_under_log_d = !d.config().mirror_labels;
  return tape.scalar(tape.scale(tape.add(batch_term(real, real_under_log_d),
                                         batch_term(fake, !real_under_log_d)),
                                0.5));
}

int cmd_gradcheck(const CLI::App& sub, const CommandArgs& a) {
  const training::TrainConfig cfg = resolve_config(sub, a);
  const std::size_t vocab = 12;

  numerics::FiniteDiffOptions opts;
  // Deep recurrences leave some sampled coordinates with gradients near
  // 1e-8; a wide step keeps the quotient roundoff under the tolerance.
  opts.epsilon = 1e-3;
  opts.coords_per_param = 3;
  opts.seed = numerics::hash_seed(cfg.seed, "gradcheck.coords");

  const double tolerance = 1e-4;
  bool ok = true;
  auto report_line = [&](const char* model,
                         const numerics::FiniteDiffReport& r) {
    std::printf("gradcheck %-13s max_rel_error=%.3e coords=%zu worst=%s\n",
                model, r.max_rel_error, r.coords_checked,
                r.worst_param.c_str());
    ok = ok && r.max_rel_error < tolerance;
  };

  {
    policy::Generator gen(generator_config(cfg, vocab),
                          numerics::hash_seed(cfg.seed, "gradcheck.generator"));
    const std::vector<policy::Example> batch = {
        {{7, 4, 9}, {5, 8, 2}},
        {{8, 10, 4, 11}, {6, 2}},
    };
    auto loss = [&](bool with_grads) {
      if (with_grads) return gen.mle_step(batch);
      numerics::Tape tape(numerics::Tape::Mode::no_grad);
      return tape.scalar(gen.mle_loss(tape, batch));
    };
    report_line("generator", numerics::finite_diff_check(gen.params(), loss,
                                                         opts));
  }

  {
    disc::Discriminator d(
        discriminator_config(cfg, vocab),
        numerics::hash_seed(cfg.seed, "gradcheck.discriminator"));
    const std::vector<corpus::Dialogue> real = {
        {{{7, 4}, {9, 5}}, {5, 8, 2}},
        {{{8}}, {6, 7, 2}},
    };
    const std::vector<corpus::Dialogue> fake = {
        {{{7, 4}, {9, 5}}, {10, 2}},
        {{{8}}, {11, 4, 5, 2}},
    };
    auto loss = [&](bool with_grads) {
      if (with_grads) return d.disc_update(real, fake);
      return disc_loss_value(d, real, fake);
    };
    report_line("discriminator",
                numerics::finite_diff_check(d.params(), loss, opts));
  }

  {
    reward::RewardModel model(
        reward_config(cfg, vocab),
        numerics::hash_seed(cfg.seed, "gradcheck.reward"));
    const std::vector<policy::Example> demo = {
        {{7, 4}, {5, 8, 2}},
        {{8, 10}, {6, 2}},
    };
    std::vector<reward::Proposal> samples;
    {
      policy::Trajectory t;
      t.context = {7, 4};
      t.actions = {9, 2};
      samples.push_back({t, -1.25});
      t.context = {8, 10};
      t.actions = {11, 5, 2};
      samples.push_back({t, -2.5});
    }
    auto loss = [&](bool with_grads) {
      if (!with_grads) return model.reward_loss_value(demo, samples);
      model.params().zero_grads();
      numerics::Tape tape(numerics::Tape::Mode::record);
      const numerics::Var l = model.reward_loss(tape, demo, samples);
      tape.backward(l);
      return tape.scalar(l);
    };
    report_line("reward",
                numerics::finite_diff_check(model.params(), loss, opts));
  }

  std::printf("gradcheck: %s (tolerance %.0e)\n", ok ? "PASS" : "FAIL",
              tolerance);
  return ok ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CommandArgs a;
  CLI::App app{
      "Adversarial imitation and inverse reinforcement learning for "
      "dialogue generation",
      "dirl"};
  app.require_subcommand(1);

  auto add_config_flags = [&a](CLI::App* sub) {
    CLI::Option* config = sub->add_option(
        "--config", a.config_path, "Training config file (key = value lines)");
    CLI::Option* preset =
        sub->add_option("--preset", a.preset, "Scale preset")
            ->check(CLI::IsMember({"desk", "paper"}));
    config->excludes(preset);
    sub->add_option("--seed", a.seed, "Seed overriding the config");
  };
  auto add_adv_flags = [&a](CLI::App* sub) {
    sub->add_option("--n-rollouts", a.n_rollouts,
                    "Completion rollouts per generated step")
        ->check(CLI::PositiveNumber);
    sub->add_option("--lambda", a.lambda, "Causal entropy coefficient")
        ->check(CLI::NonNegativeNumber);
  };

  CLI::App* toygen =
      app.add_subcommand("toygen", "Sample a synthetic echo-task corpus");
  toygen->add_option("--out", a.out, "Output directory")->required();
  toygen->add_option("--spec", a.spec, "Task spec file, or 'default'");
  toygen->add_option("--seed", a.seed, "Seed overriding the spec");

  CLI::App* preprocess = app.add_subcommand(
      "preprocess", "Tokenize a triples file and build the vocabulary");
  preprocess->add_option("--data", a.data, "Raw triples file")->required();
  preprocess->add_option("--out", a.out, "Output directory")->required();
  add_config_flags(preprocess);

  CLI::App* pretrain = app.add_subcommand(
      "pretrain", "Likelihood pretraining of the generator");
  pretrain->add_option("--data", a.data, "Preprocessed data directory")
      ->required();
  pretrain->add_option("--out", a.out, "Run directory")->required();
  pretrain->add_option("--checkpoint", a.checkpoint,
                       "Generator checkpoint to resume from");
  add_config_flags(pretrain);

  CLI::App* train_ail = app.add_subcommand(
      "train-ail", "Adversarial imitation with a discriminator critic");
  CLI::App* train_airl = app.add_subcommand(
      "train-airl",
      "Adversarial inverse reinforcement learning with a reward critic");
  for (CLI::App* sub : {train_ail, train_airl}) {
    sub->add_option("--data", a.data, "Preprocessed data directory")
        ->required();
    sub->add_option("--out", a.out, "Run directory")->required();
    sub->add_option("--checkpoint", a.checkpoint,
                    "Pretrained generator checkpoint");
    add_config_flags(sub);
    add_adv_flags(sub);
  }

  CLI::App* generate =
      app.add_subcommand("generate", "Beam-decode replies for a data split");
  generate->add_option("--data", a.data, "Preprocessed data directory")
      ->required();
  generate->add_option("--checkpoint", a.checkpoint, "Generator checkpoint")
      ->required();
  generate->add_option("--out", a.out, "Output directory")->required();
  add_config_flags(generate);

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Embedding-metric report for reply/target files");
  evaluate->add_option("--replies", a.replies, "Generated replies, one per line")
      ->required();
  evaluate->add_option("--targets", a.targets, "Reference replies, one per line")
      ->required();
  evaluate->add_option("--emb", a.emb,
                       "'generator' or a token-vector text file");
  evaluate->add_option("--data", a.data,
                       "Data directory providing the vocabulary");
  evaluate->add_option("--checkpoint", a.checkpoint,
                       "Generator checkpoint for --emb generator");
  evaluate->add_option("--out", a.out, "Report directory");
  add_config_flags(evaluate);

  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "Finite-difference audit of every training gradient");
  add_config_flags(gradcheck);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    std::fputs(app.help().c_str(), stdout);
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::fputs(app.help("", CLI::AppFormatMode::All).c_str(), stdout);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    if (*toygen) return cmd_toygen(*toygen, a);
    if (*preprocess) return cmd_preprocess(*preprocess, a);
    if (*pretrain) return cmd_pretrain(*pretrain, a);
    if (*train_ail) return cmd_train_adversarial(*train_ail, a, false);
    if (*train_airl) return cmd_train_adversarial(*train_airl, a, true);
    if (*generate) return cmd_generate(*generate, a);
    if (*evaluate) return cmd_evaluate(*evaluate, a);
    if (*gradcheck) return cmd_gradcheck(*gradcheck, a);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace dirl::cli
