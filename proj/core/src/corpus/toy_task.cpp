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

#include "dirl/corpus/toy_task.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dirl/numerics/rng.hpp"

namespace dirl::corpus {

void validate_toy_spec(const ToyTaskSpec& spec) {
  if (spec.content_vocab < 1) {
    throw std::invalid_argument("toy spec: content_vocab must be >= 1");
  }
  if (spec.min_utt_len < 1 || spec.max_utt_len < spec.min_utt_len) {
    throw std::invalid_argument("toy spec: bad utterance length bounds");
  }
  if (spec.min_turns < 1 || spec.max_turns > 2 ||
      spec.max_turns < spec.min_turns) {
    throw std::invalid_argument("toy spec: turns must lie in 1..2");
  }
  if (spec.echo_repeats < 1 || spec.echo_repeats_alt < 1) {
    throw std::invalid_argument("toy spec: repeat counts must be >= 1");
  }
  if (spec.n_train == 0) {
    throw std::invalid_argument("toy spec: n_train must be >= 1");
  }
}

namespace {

const char* rule_name(ReplyRule rule) {
  return rule == ReplyRule::kEchoFixed ? "echo_fixed" : "echo_stochastic";
}

ReplyRule rule_from_name(const std::string& name) {
  if (name == "echo_fixed") return ReplyRule::kEchoFixed;
  if (name == "echo_stochastic") return ReplyRule::kEchoStochastic;
  throw std::invalid_argument("toy spec: unknown rule '" + name + "'");
}

long long parse_integer(const std::string& value, const std::string& key) {
  std::size_t pos = 0;
  long long parsed = 0;
  try {
    parsed = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("toy spec: bad value for " + key + ": '" +
                                value + "'");
  }
  if (pos != value.size()) {
    throw std::invalid_argument("toy spec: bad value for " + key + ": '" +
                                value + "'");
  }
  return parsed;
}

}  // namespace

std::string format_toy_spec(const ToyTaskSpec& spec) {
  std::ostringstream out;
  out << "content_vocab=" << spec.content_vocab << "\n";
  out << "min_utt_len=" << spec.min_utt_len << "\n";
  out << "max_utt_len=" << spec.max_utt_len << "\n";
  out << "min_turns=" << spec.min_turns << "\n";
  out << "max_turns=" << spec.max_turns << "\n";
  out << "rule=" << rule_name(spec.rule) << "\n";
  out << "echo_repeats=" << spec.echo_repeats << "\n";
  out << "echo_repeats_alt=" << spec.echo_repeats_alt << "\n";
  out << "n_train=" << spec.n_train << "\n";
  out << "n_valid=" << spec.n_valid << "\n";
  out << "n_test=" << spec.n_test << "\n";
  out << "seed=" << spec.seed << "\n";
  return out.str();
}

ToyTaskSpec parse_toy_spec(const std::string& text) {
  ToyTaskSpec spec;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("toy spec line " + std::to_string(lineno) +
                                  ": expected key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (!seen.insert(key).second) {
      throw std::invalid_argument("toy spec: duplicate key '" + key + "'");
    }

    if (key == "content_vocab") {
      spec.content_vocab = static_cast<int>(parse_integer(value, key));
    } else if (key == "min_utt_len") {
      spec.min_utt_len = static_cast<int>(parse_integer(value, key));
    } else if (key == "max_utt_len") {
      spec.max_utt_len = static_cast<int>(parse_integer(value, key));
    } else if (key == "min_turns") {
      spec.min_turns = static_cast<int>(parse_integer(value, key));
    } else if (key == "max_turns") {
      spec.max_turns = static_cast<int>(parse_integer(value, key));
    } else if (key == "rule") {
      spec.rule = rule_from_name(value);
    } else if (key == "echo_repeats") {
      spec.echo_repeats = static_cast<int>(parse_integer(value, key));
    } else if (key == "echo_repeats_alt") {
      spec.echo_repeats_alt = static_cast<int>(parse_integer(value, key));
    } else if (key == "n_train") {
      spec.n_train = static_cast<std::size_t>(parse_integer(value, key));
    } else if (key == "n_valid") {
      spec.n_valid = static_cast<std::size_t>(parse_integer(value, key));
    } else if (key == "n_test") {
      spec.n_test = static_cast<std::size_t>(parse_integer(value, key));
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_integer(value, key));
    } else {
      throw std::invalid_argument("toy spec: unknown key '" + key + "'");
    }
  }
  validate_toy_spec(spec);
  return spec;
}

ToyOracle::ToyOracle(ToyTaskSpec spec) : spec_(std::move(spec)) {
  validate_toy_spec(spec_);
}

std::vector<std::pair<std::vector<int>, double>> ToyOracle::reply_distribution(
    const std::vector<std::vector<int>>& context) const {
  if (context.empty() || context.size() > 2) {
    throw std::invalid_argument("oracle: context must have 1 or 2 utterances");
  }
  for (const auto& utt : context) {
    if (utt.empty()) {
      throw std::invalid_argument("oracle: empty context utterance");
    }
  }

  const int last = context.back().back();
  auto make_reply = [last](int repeats) {
    std::vector<int> reply(static_cast<std::size_t>(repeats), last);
    reply.push_back(kEosId);
    return reply;
  };

  std::vector<std::pair<std::vector<int>, double>> dist;
  dist.emplace_back(make_reply(spec_.echo_repeats), 1.0);
  if (spec_.rule == ReplyRule::kEchoStochastic) {
    auto alt = make_reply(spec_.echo_repeats_alt);
    if (alt == dist[0].first) {
      // Both branches produce the same reply; it keeps probability 1.
    } else {
      dist[0].second = 0.5;
      dist.emplace_back(std::move(alt), 0.5);
    }
  }
  return dist;
}

std::vector<std::vector<int>> ToyOracle::enumerate_replies(
    const std::vector<std::vector<int>>& context) const {
  std::vector<std::vector<int>> replies;
  for (auto& [reply, prob] : reply_distribution(context)) {
    (void)prob;
    replies.push_back(reply);
  }
  return replies;
}

double ToyOracle::log_prob(const Dialogue& dialogue) const {
  for (const auto& [reply, prob] : reply_distribution(dialogue.context)) {
    if (reply == dialogue.reply) return std::log(prob);
  }
  return -std::numeric_limits<double>::infinity();
}

ToyCorpus gen_toy_corpus(const ToyTaskSpec& spec) {
  validate_toy_spec(spec);

  std::vector<std::string> content;
  content.reserve(static_cast<std::size_t>(spec.content_vocab));
  for (int i = 0; i < spec.content_vocab; ++i) {
    if (spec.content_vocab <= 26) {
      content.push_back(std::string(1, static_cast<char>('a' + i)));
    } else {
      content.push_back("w" + std::to_string(i));
    }
  }
  Vocabulary vocab = Vocabulary::from_content_tokens(std::move(content));

  numerics::Rng rng(numerics::hash_seed(spec.seed, "toy_corpus"));

  const std::size_t total = spec.n_train + spec.n_valid + spec.n_test;
  std::set<std::vector<int>> seen_contexts;
  std::vector<Dialogue> all;
  all.reserve(total);

  // Duplicate contexts are resampled; the cap turns an undersized context
  // space into an error instead of an unbounded loop.
  const std::size_t max_attempts = 200 * total + 1000;
  std::size_t attempts = 0;
  while (all.size() < total) {
    if (++attempts > max_attempts) {
      throw std::runtime_error(
          "gen_toy_corpus: context space too small for requested corpus size");
    }

    Dialogue d;
    const int turns =
        spec.min_turns +
        static_cast<int>(rng.below(
            static_cast<std::size_t>(spec.max_turns - spec.min_turns) + 1));
    for (int t = 0; t < turns; ++t) {
      const int len =
          spec.min_utt_len +
          static_cast<int>(rng.below(
              static_cast<std::size_t>(spec.max_utt_len - spec.min_utt_len) +
              1));
      std::vector<int> utt;
      utt.reserve(static_cast<std::size_t>(len));
      for (int k = 0; k < len; ++k) {
        utt.push_back(kReservedCount +
                      static_cast<int>(rng.below(
                          static_cast<std::size_t>(spec.content_vocab))));
      }
      d.context.push_back(std::move(utt));
    }
    if (!seen_contexts.insert(encode_context(d)).second) continue;

    int repeats = spec.echo_repeats;
    if (spec.rule == ReplyRule::kEchoStochastic && rng.uniform() < 0.5) {
      repeats = spec.echo_repeats_alt;
    }
    const int last = d.context.back().back();
    d.reply.assign(static_cast<std::size_t>(repeats), last);
    d.reply.push_back(kEosId);
    all.push_back(std::move(d));
  }

  ToyCorpus corpus{spec, std::move(vocab), {}, {}, {}, ToyOracle(spec)};
  auto it = all.begin();
  corpus.train.assign(it, it + static_cast<std::ptrdiff_t>(spec.n_train));
  it += static_cast<std::ptrdiff_t>(spec.n_train);
  corpus.valid.assign(it, it + static_cast<std::ptrdiff_t>(spec.n_valid));
  it += static_cast<std::ptrdiff_t>(spec.n_valid);
  corpus.test.assign(it, it + static_cast<std::ptrdiff_t>(spec.n_test));
  return corpus;
}

}  // namespace dirl::corpus
