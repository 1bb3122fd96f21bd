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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirl/corpus/dialogue.hpp"
#include "dirl/corpus/preprocess.hpp"
#include "dirl/corpus/toy_task.hpp"
#include "dirl/corpus/triples.hpp"
#include "dirl/corpus/vocabulary.hpp"

namespace fs = std::filesystem;
using namespace dirl::corpus;

namespace {

// ln(0.5) to 20 significant digits.
constexpr double kLnHalf = -0.69314718055994530942;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(bool(out));
  out << text;
}

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name)
      : path(fs::temp_directory_path() / name) {}
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

}  // namespace

TEST_CASE("reserved token block occupies the lowest ids in fixed order") {
  const auto& reserved = Vocabulary::reserved_tokens();
  REQUIRE(reserved.size() == static_cast<std::size_t>(kReservedCount));
  CHECK(reserved[kPadId] == "⟨pad⟩");
  CHECK(reserved[kBosId] == "⟨bos⟩");
  CHECK(reserved[kEosId] == "⟨eos⟩");
  CHECK(reserved[kUnkId] == "⟨unk⟩");
  CHECK(reserved[kSepId] == "⟨/s⟩");
  CHECK(reserved[kPersonId] == "⟨person⟩");
  CHECK(reserved[kNumberId] == "⟨number⟩");

  Vocabulary v = Vocabulary::from_content_tokens({"alpha", "beta"});
  REQUIRE(v.size() == static_cast<std::size_t>(kReservedCount) + 2);
  for (int i = 0; i < kReservedCount; ++i) {
    CHECK(v.token(i) == reserved[static_cast<std::size_t>(i)]);
    CHECK(v.id(reserved[static_cast<std::size_t>(i)]) == i);
  }
  CHECK(v.id("alpha") == kReservedCount);
  CHECK(v.id("beta") == kReservedCount + 1);
}

TEST_CASE("vocabulary is a bijection and decode inverts encode") {
  Vocabulary v = Vocabulary::from_content_tokens({"the", "cat", "sat"});

  std::vector<std::string> utt = {"the", "cat", "sat", "the"};
  CHECK(v.decode(v.encode(utt)) == utt);

  // Every id maps to a distinct token and back.
  std::set<std::string> tokens;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    const std::string& t = v.token(i);
    CHECK(v.id(t) == i);
    CHECK(tokens.insert(t).second);
  }

  CHECK(v.id("dog") == kUnkId);
  CHECK_FALSE(v.contains("dog"));
  CHECK(v.contains("cat"));
  CHECK_THROWS_AS(v.token(-1), std::out_of_range);
  CHECK_THROWS_AS(v.token(static_cast<int>(v.size())), std::out_of_range);

  CHECK_THROWS_AS(Vocabulary::from_content_tokens({"x", "x"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Vocabulary::from_content_tokens({"⟨eos⟩"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Vocabulary::from_content_tokens({""}),
                  std::invalid_argument);
}

TEST_CASE("build_vocab keeps the most frequent tokens under the cap") {
  // Hand-counted corpus: a appears 3 times, b twice, c once.
  std::vector<std::vector<std::string>> corpus = {
      {"a", "b", "c"}, {"a", "b"}, {"a"}};

  Vocabulary v = Vocabulary::build(
      corpus, static_cast<std::size_t>(kReservedCount) + 2);
  REQUIRE(v.size() == static_cast<std::size_t>(kReservedCount) + 2);
  CHECK(v.contains("a"));
  CHECK(v.contains("b"));
  CHECK(v.id("c") == kUnkId);
  // Higher count wins the lower id.
  CHECK(v.id("a") == kReservedCount);
  CHECK(v.id("b") == kReservedCount + 1);

  // A generous cap admits every distinct token, so nothing maps to UNK.
  Vocabulary all = Vocabulary::build(corpus, 100);
  for (const auto& utt : corpus) {
    for (const auto& tok : utt) CHECK(all.id(tok) != kUnkId);
  }

  CHECK_THROWS_AS(Vocabulary::build({}, 100), std::invalid_argument);
  CHECK_THROWS_AS(
      Vocabulary::build(corpus, static_cast<std::size_t>(kReservedCount)),
      std::invalid_argument);
}

TEST_CASE("build_vocab breaks frequency ties lexicographically") {
  std::vector<std::vector<std::string>> corpus = {
      {"zeta", "beta"}, {"zeta", "beta"}, {"mid"}};

  // beta and zeta tie at count 2; the single slot goes to beta.
  Vocabulary one = Vocabulary::build(
      corpus, static_cast<std::size_t>(kReservedCount) + 1);
  CHECK(one.contains("beta"));
  CHECK_FALSE(one.contains("zeta"));

  Vocabulary two = Vocabulary::build(
      corpus, static_cast<std::size_t>(kReservedCount) + 2);
  CHECK(two.id("beta") == kReservedCount);
  CHECK(two.id("zeta") == kReservedCount + 1);
  CHECK_FALSE(two.contains("mid"));
}

TEST_CASE("build_vocab is invariant to corpus line order") {
  std::vector<std::vector<std::string>> corpus = {
      {"red", "green", "blue"}, {"green", "blue"}, {"blue"}, {"red", "cyan"}};
  std::vector<std::vector<std::string>> shuffled = {
      corpus[2], corpus[0], corpus[3], corpus[1]};

  Vocabulary a = Vocabulary::build(corpus, 100);
  Vocabulary b = Vocabulary::build(shuffled, 100);
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    CHECK(a.token(i) == b.token(i));
  }
}

TEST_CASE("build_vocab does not duplicate reserved tokens seen in the corpus") {
  std::vector<std::vector<std::string>> corpus = {
      {"⟨person⟩", "says", "hi"}, {"⟨person⟩", "says"}};
  Vocabulary v = Vocabulary::build(corpus, 100);
  CHECK(v.id("⟨person⟩") == kPersonId);
  CHECK(v.size() == static_cast<std::size_t>(kReservedCount) + 2);
  CHECK(v.contains("says"));
  CHECK(v.contains("hi"));
}

TEST_CASE("vocabulary file round-trips through save and load") {
  Vocabulary v = Vocabulary::from_content_tokens({"one", "two", "three"});
  TempFile file("dirl_vocab_test.txt");
  v.save(file.path);

  // Header comments document the reserved block; content lines are the
  // non-reserved tokens only, in id order.
  const std::string text = slurp(file.path);
  CHECK(text.find("# ") == 0);
  CHECK(text.find("⟨pad⟩") != std::string::npos);
  CHECK(text.find("one\ntwo\nthree\n") != std::string::npos);

  Vocabulary loaded = Vocabulary::load(file.path);
  REQUIRE(loaded.size() == v.size());
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    CHECK(loaded.token(i) == v.token(i));
  }

  CHECK_THROWS_AS(Vocabulary::load("/nonexistent/vocab.txt"),
                  std::runtime_error);
}

TEST_CASE("normalize_utterance tags names and numbers") {
  NameLexicon names = {"john"};

  // Rule application by hand: john is in the lexicon, 25 is numeric.
  std::vector<std::string> in = {"hi", "john", "i", "am", "25"};
  std::vector<std::string> want = {"hi", "⟨person⟩", "i", "am",
                                   "⟨number⟩"};
  CHECK(normalize_utterance(in, names) == want);

  // Nothing to tag: the utterance passes through unchanged.
  std::vector<std::string> plain = {"how", "are", "you"};
  CHECK(normalize_utterance(plain, names) == plain);

  // Lowercasing happens before lexicon lookup.
  std::vector<std::string> upper = {"JoHn", "SAYS", "Hi"};
  std::vector<std::string> upper_want = {"⟨person⟩", "says", "hi"};
  CHECK(normalize_utterance(upper, names) == upper_want);
}

TEST_CASE("normalize_utterance numeric rule matches whole tokens only") {
  NameLexicon names;
  auto norm1 = [&](const std::string& t) {
    return normalize_utterance({t}, names)[0];
  };
  const std::string number = "⟨number⟩";

  CHECK(norm1("0") == number);
  CHECK(norm1("007") == number);
  CHECK(norm1("3.14") == number);
  CHECK(norm1("25") == number);

  CHECK(norm1("3.14.5") == "3.14.5");
  CHECK(norm1(".5") == ".5");
  CHECK(norm1("5.") == "5.");
  CHECK(norm1("a1") == "a1");
  CHECK(norm1("25a") == "25a");
  CHECK(norm1("-3") == "-3");
}

TEST_CASE("normalize_utterance is idempotent") {
  NameLexicon names = {"john", "mary"};
  std::vector<std::string> in = {"john",  "MARY",  "42",
                                 "3.14",  "hello", "⟨person⟩",
                                 "⟨number⟩"};
  auto once = normalize_utterance(in, names);
  auto twice = normalize_utterance(once, names);
  CHECK(once == twice);
  // Existing tags are left as-is.
  CHECK(once[5] == "⟨person⟩");
  CHECK(once[6] == "⟨number⟩");
}

TEST_CASE("encode_context joins two turns with a single separator") {
  Dialogue two;
  two.context = {{10, 11, 12}, {13, 14}};
  two.reply = {10, kEosId};
  std::vector<int> want = {10, 11, 12, kSepId, 13, 14};
  CHECK(encode_context(two) == want);

  Dialogue one;
  one.context = {{10, 11, 12}};
  one.reply = {10, kEosId};
  CHECK(encode_context(one) == one.context[0]);

  Dialogue none;
  none.reply = {10, kEosId};
  CHECK_THROWS_AS(encode_context(none), std::invalid_argument);

  Dialogue three;
  three.context = {{10}, {11}, {12}};
  three.reply = {10, kEosId};
  CHECK_THROWS_AS(encode_context(three), std::invalid_argument);
}

TEST_CASE("out-of-vocabulary tokens encode to UNK inside a context") {
  Vocabulary v = Vocabulary::from_content_tokens({"hello", "world"});
  Dialogue d;
  d.context = {v.encode({"hello", "world"}), v.encode({"hello", "mars"})};
  d.reply = {v.id("world"), kEosId};

  auto flat = encode_context(d);
  REQUIRE(flat.size() == 5);
  CHECK(flat[2] == kSepId);
  CHECK(flat[4] == kUnkId);
}

TEST_CASE("validate_dialogue enforces shape, PAD exclusion, and EOS") {
  Dialogue good;
  good.context = {{10, 11}, {12}};
  good.reply = {12, 12, kEosId};
  CHECK_NOTHROW(validate_dialogue(good));

  Dialogue no_eos = good;
  no_eos.reply = {12, 12};
  CHECK_THROWS_AS(validate_dialogue(no_eos), std::invalid_argument);

  Dialogue empty_reply = good;
  empty_reply.reply = {};
  CHECK_THROWS_AS(validate_dialogue(empty_reply), std::invalid_argument);

  Dialogue pad_in_ctx = good;
  pad_in_ctx.context[0] = {10, kPadId};
  CHECK_THROWS_AS(validate_dialogue(pad_in_ctx), std::invalid_argument);

  Dialogue pad_in_reply = good;
  pad_in_reply.reply = {kPadId, kEosId};
  CHECK_THROWS_AS(validate_dialogue(pad_in_reply), std::invalid_argument);

  Dialogue empty_utt = good;
  empty_utt.context = {{}};
  CHECK_THROWS_AS(validate_dialogue(empty_utt), std::invalid_argument);
}

TEST_CASE("load_triples reads a hand-built fixture") {
  Vocabulary v = Vocabulary::from_content_tokens(
      {"how", "are", "you", "today", "i", "am", "fine", "thanks", "for",
       "asking", "sir"});
  TempFile file("dirl_triples_test.tsv");
  spit(file.path,
       "how are you today\ti am fine thanks\tthanks for asking sir\n"
       "i am fine sir\thow are you today\ti am fine thanks\n"
       "thanks for asking sir\ti am fine today\thow are you sir\n");

  TripleLoadStats stats;
  auto dialogues = load_triples(file.path, v, LengthBounds{}, &stats);
  CHECK(stats.kept == 3);
  CHECK(stats.dropped == 0);
  REQUIRE(dialogues.size() == 3);

  const Dialogue& d = dialogues[0];
  REQUIRE(d.context.size() == 2);
  CHECK(d.context[0] == v.encode({"how", "are", "you", "today"}));
  CHECK(d.context[1] == v.encode({"i", "am", "fine", "thanks"}));
  std::vector<int> want_reply = v.encode({"thanks", "for", "asking", "sir"});
  want_reply.push_back(kEosId);
  CHECK(d.reply == want_reply);
  for (const auto& dlg : dialogues) CHECK_NOTHROW(validate_dialogue(dlg));
}

TEST_CASE("load_triples drops turns outside the per-speaker length bounds") {
  Vocabulary v = Vocabulary::from_content_tokens({"a", "b", "c", "d", "e"});
  TempFile file("dirl_triples_bounds_test.tsv");
  // Line 1 in bounds; line 2 has a 2-token middle turn; line 3 has a
  // 5-token turn that exceeds max_len 4.
  spit(file.path,
       "a b c d\tb c d e\tc d e a\n"
       "a b c d\tb c\tc d e a\n"
       "a b c d e\tb c d e\tc d e a\n");

  TripleLoadStats stats;
  auto dialogues =
      load_triples(file.path, v, LengthBounds{4, 4}, &stats);
  CHECK(stats.kept == 1);
  CHECK(stats.dropped == 2);
  REQUIRE(dialogues.size() == 1);
  CHECK(dialogues[0].context[0] == v.encode({"a", "b", "c", "d"}));
}

TEST_CASE("load_triples handles empty files, bad lines, and missing files") {
  TempFile file("dirl_triples_edge_test.tsv");
  Vocabulary v = Vocabulary::from_content_tokens({"a", "b", "c", "d"});

  spit(file.path, "");
  TripleLoadStats stats;
  CHECK(load_triples(file.path, v, LengthBounds{}, &stats).empty());
  CHECK(stats.kept == 0);
  CHECK(stats.dropped == 0);

  // Two fields instead of three: the error names the 1-based line.
  spit(file.path, "a b c d\tb c d a\tc d a b\na b c d\tb c d a\n");
  try {
    load_triples(file.path, v);
    FAIL("expected malformed-line error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }

  CHECK_THROWS_AS(load_raw_triples("/nonexistent/triples.tsv"),
                  std::runtime_error);
}

TEST_CASE("load_triples treats an empty first field as a single-turn context") {
  Vocabulary v = Vocabulary::from_content_tokens({"a", "b", "c", "d"});
  TempFile file("dirl_triples_single_test.tsv");
  spit(file.path, "\tb c d a\tc d a b\r\na b c d\tb c d a\tc d a b\n");

  TripleLoadStats stats;
  auto dialogues = load_triples(file.path, v, LengthBounds{}, &stats);
  CHECK(stats.kept == 2);
  REQUIRE(dialogues.size() == 2);
  REQUIRE(dialogues[0].context.size() == 1);
  CHECK(dialogues[0].context[0] == v.encode({"b", "c", "d", "a"}));
  REQUIRE(dialogues[1].context.size() == 2);
}

TEST_CASE("load_triples maps unknown tokens to UNK") {
  Vocabulary v = Vocabulary::from_content_tokens({"a", "b", "c", "d"});
  TempFile file("dirl_triples_unk_test.tsv");
  spit(file.path, "a b zz d\tb c d a\tc d a b\n");

  auto dialogues = load_triples(file.path, v);
  REQUIRE(dialogues.size() == 1);
  CHECK(dialogues[0].context[0][2] == kUnkId);
}

TEST_CASE("save_triples round-trips dialogues and is byte-deterministic") {
  Vocabulary v = Vocabulary::from_content_tokens({"a", "b", "c"});
  const int a = v.id("a"), b = v.id("b"), c = v.id("c");

  std::vector<Dialogue> dialogues;
  dialogues.push_back({{{a, b, c}}, {c, c, kEosId}});
  dialogues.push_back({{{b, a}, {c, b, a}}, {a, a, a, kEosId}});

  TempFile file("dirl_triples_save_test.tsv");
  save_triples(file.path, dialogues, v);
  const std::string text1 = slurp(file.path);
  save_triples(file.path, dialogues, v);
  CHECK(slurp(file.path) == text1);

  TripleLoadStats stats;
  auto reloaded = load_triples(file.path, v, LengthBounds{1, 12}, &stats);
  CHECK(stats.dropped == 0);
  CHECK(reloaded == dialogues);
}

TEST_CASE("toy spec serialization round-trips and rejects bad input") {
  ToyTaskSpec spec;
  spec.rule = ReplyRule::kEchoStochastic;
  spec.n_train = 123;
  spec.seed = 99;
  CHECK(parse_toy_spec(format_toy_spec(spec)) == spec);

  ToyTaskSpec fixed;
  CHECK(parse_toy_spec(format_toy_spec(fixed)) == fixed);

  CHECK_THROWS_AS(parse_toy_spec("bogus_key=3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_toy_spec("content_vocab=x\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_toy_spec("seed=1\nseed=2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_toy_spec("rule=echo_both\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_toy_spec("content_vocab 3\n"), std::invalid_argument);

  ToyTaskSpec bad;
  bad.content_vocab = 0;
  CHECK_THROWS_AS(validate_toy_spec(bad), std::invalid_argument);
  bad = ToyTaskSpec{};
  bad.max_turns = 3;
  CHECK_THROWS_AS(validate_toy_spec(bad), std::invalid_argument);
  bad = ToyTaskSpec{};
  bad.min_utt_len = 5;
  bad.max_utt_len = 4;
  CHECK_THROWS_AS(validate_toy_spec(bad), std::invalid_argument);
}

TEST_CASE("deterministic echo oracle scores the rule reply at log-prob zero") {
  ToyTaskSpec spec;  // defaults: echo the last token three times
  ToyOracle oracle(spec);

  const int x = kReservedCount + 4;
  Dialogue d;
  d.context = {{kReservedCount, kReservedCount + 1, x}};
  d.reply = {x, x, x, kEosId};
  CHECK(oracle.log_prob(d) == 0.0);

  auto replies = oracle.enumerate_replies(d.context);
  REQUIRE(replies.size() == 1);
  CHECK(replies[0] == d.reply);

  // Any deviation from the rule scores -infinity.
  const double neg_inf = -std::numeric_limits<double>::infinity();
  Dialogue wrong = d;
  wrong.reply = {x, x, kEosId};
  CHECK(oracle.log_prob(wrong) == neg_inf);
  wrong.reply = {x, x, x, x, kEosId};
  CHECK(oracle.log_prob(wrong) == neg_inf);
  wrong.reply = {x, x, kReservedCount, kEosId};
  CHECK(oracle.log_prob(wrong) == neg_inf);
  wrong.reply = {x, x, x};
  CHECK(oracle.log_prob(wrong) == neg_inf);

  // Two-turn context: only the final utterance's last token matters.
  Dialogue two = d;
  two.context = {{kReservedCount + 9, kReservedCount + 9, kReservedCount + 9},
                 d.context[0]};
  CHECK(oracle.log_prob(two) == 0.0);

  Dialogue malformed;
  malformed.reply = {x, kEosId};
  CHECK_THROWS_AS(oracle.log_prob(malformed), std::invalid_argument);
}

TEST_CASE("stochastic echo oracle gives ln 0.5 to each branch") {
  ToyTaskSpec spec;
  spec.rule = ReplyRule::kEchoStochastic;
  ToyOracle oracle(spec);

  const int x = kReservedCount + 2;
  std::vector<std::vector<int>> context = {{x}};

  auto dist = oracle.reply_distribution(context);
  REQUIRE(dist.size() == 2);
  double mass = 0.0;
  for (const auto& [reply, prob] : dist) {
    CHECK(reply.back() == kEosId);
    mass += prob;
  }
  CHECK(mass == 1.0);

  Dialogue three;
  three.context = context;
  three.reply = {x, x, x, kEosId};
  CHECK(oracle.log_prob(three) == doctest::Approx(kLnHalf).epsilon(1e-15));

  Dialogue two;
  two.context = context;
  two.reply = {x, x, kEosId};
  CHECK(oracle.log_prob(two) == doctest::Approx(kLnHalf).epsilon(1e-15));

  Dialogue other;
  other.context = context;
  other.reply = {x, kEosId};
  CHECK(oracle.log_prob(other) ==
        -std::numeric_limits<double>::infinity());

  // Coinciding branches collapse into a single certain reply.
  ToyTaskSpec same = spec;
  same.echo_repeats_alt = same.echo_repeats;
  ToyOracle collapsed(same);
  auto collapsed_dist = collapsed.reply_distribution(context);
  REQUIRE(collapsed_dist.size() == 1);
  CHECK(collapsed_dist[0].second == 1.0);
  CHECK(collapsed.log_prob(three) == 0.0);
}

TEST_CASE("gen_toy_corpus produces valid, rule-consistent dialogues") {
  ToyTaskSpec spec;
  spec.n_train = 300;
  spec.n_valid = 60;
  spec.n_test = 60;
  ToyCorpus corpus = gen_toy_corpus(spec);

  CHECK(corpus.vocab.size() ==
        static_cast<std::size_t>(kReservedCount + spec.content_vocab));
  CHECK(corpus.vocab.token(kReservedCount) == "a");
  CHECK(corpus.train.size() == spec.n_train);
  CHECK(corpus.valid.size() == spec.n_valid);
  CHECK(corpus.test.size() == spec.n_test);

  auto check_split = [&](const std::vector<Dialogue>& split) {
    for (const auto& d : split) {
      CHECK_NOTHROW(validate_dialogue(d));
      CHECK(d.context.size() >= static_cast<std::size_t>(spec.min_turns));
      CHECK(d.context.size() <= static_cast<std::size_t>(spec.max_turns));
      for (const auto& utt : d.context) {
        CHECK(utt.size() >= static_cast<std::size_t>(spec.min_utt_len));
        CHECK(utt.size() <= static_cast<std::size_t>(spec.max_utt_len));
        for (int id : utt) {
          CHECK(id >= kReservedCount);
          CHECK(id < kReservedCount + spec.content_vocab);
        }
      }
      // The sampled reply is exactly the rule reply.
      CHECK(corpus.oracle.log_prob(d) == 0.0);
    }
  };
  check_split(corpus.train);
  check_split(corpus.valid);
  check_split(corpus.test);
}

TEST_CASE("gen_toy_corpus splits share no context") {
  // Default spec sizes, as the disjointness contract pins them.
  ToyTaskSpec spec;
  ToyCorpus corpus = gen_toy_corpus(spec);
  REQUIRE(corpus.train.size() == 2000);

  std::set<std::vector<int>> contexts;
  auto insert_all = [&](const std::vector<Dialogue>& split) {
    for (const auto& d : split) {
      CHECK(contexts.insert(encode_context(d)).second);
    }
  };
  insert_all(corpus.train);
  insert_all(corpus.valid);
  insert_all(corpus.test);
  CHECK(contexts.size() == 2400);
}

TEST_CASE("gen_toy_corpus is bit-identical for equal seeds") {
  ToyTaskSpec spec;
  spec.rule = ReplyRule::kEchoStochastic;
  spec.n_train = 200;
  spec.n_valid = 40;
  spec.n_test = 40;

  ToyCorpus a = gen_toy_corpus(spec);
  ToyCorpus b = gen_toy_corpus(spec);
  CHECK(a.train == b.train);
  CHECK(a.valid == b.valid);
  CHECK(a.test == b.test);

  ToyTaskSpec other = spec;
  other.seed = spec.seed + 1;
  ToyCorpus c = gen_toy_corpus(other);
  CHECK(a.train != c.train);
}

TEST_CASE("stochastic corpus mixes both branch lengths near evenly") {
  ToyTaskSpec spec;
  spec.rule = ReplyRule::kEchoStochastic;
  spec.n_train = 2000;
  spec.n_valid = 1;
  spec.n_test = 1;
  ToyCorpus corpus = gen_toy_corpus(spec);

  std::size_t long_replies = 0;
  for (const auto& d : corpus.train) {
    REQUIRE((d.reply.size() == 4 || d.reply.size() == 3));
    if (d.reply.size() == 4) ++long_replies;
    CHECK(corpus.oracle.log_prob(d) ==
          doctest::Approx(kLnHalf).epsilon(1e-15));
  }
  // 2000 fair coin flips; 5 sigma is about 0.056.
  const double frac =
      static_cast<double>(long_replies) / static_cast<double>(spec.n_train);
  CHECK(frac > 0.44);
  CHECK(frac < 0.56);
}

TEST_CASE("gen_toy_corpus fails loudly when the context space is too small") {
  ToyTaskSpec spec;
  spec.content_vocab = 1;
  spec.min_utt_len = 1;
  spec.max_utt_len = 1;
  spec.min_turns = 1;
  spec.max_turns = 1;
  spec.n_train = 5;
  spec.n_valid = 0;
  spec.n_test = 0;
  CHECK_THROWS_AS(gen_toy_corpus(spec), std::runtime_error);
}

TEST_CASE("toy content tokens switch to indexed names past 26") {
  ToyTaskSpec spec;
  spec.content_vocab = 30;
  spec.n_train = 50;
  spec.n_valid = 5;
  spec.n_test = 5;
  ToyCorpus corpus = gen_toy_corpus(spec);
  CHECK(corpus.vocab.token(kReservedCount) == "w0");
  CHECK(corpus.vocab.token(kReservedCount + 29) == "w29");
}

TEST_CASE("toy corpus written as triples reloads identically") {
  ToyTaskSpec spec;
  spec.n_train = 60;
  spec.n_valid = 10;
  spec.n_test = 10;
  ToyCorpus corpus = gen_toy_corpus(spec);

  TempFile file("dirl_toy_triples_test.tsv");
  save_triples(file.path, corpus.train, corpus.vocab);
  TripleLoadStats stats;
  auto reloaded =
      load_triples(file.path, corpus.vocab, LengthBounds{1, 12}, &stats);
  CHECK(stats.dropped == 0);
  CHECK(reloaded == corpus.train);
}
