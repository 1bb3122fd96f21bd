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

#ifndef DIRL_EVAL_REPORT_HPP_
#define DIRL_EVAL_REPORT_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirl/corpus/dialogue.hpp"
#include "dirl/corpus/toy_task.hpp"
#include "dirl/eval/metrics.hpp"

namespace dirl::eval {

struct PairScores {
  std::optional<double> average;
  std::optional<double> greedy;
  std::optional<double> extrema;
};

/// Corpus mean with a normal-approximation 95% confidence interval over
/// the defined pairs. With fewer than two defined pairs the half-width
/// is zero.
struct MetricSummary {
  double mean = 0.0;
  double ci_half = 0.0;
  std::size_t defined = 0;
  std::size_t undefined = 0;
};

struct MetricReport {
  std::vector<PairScores> pairs;
  MetricSummary average;
  MetricSummary greedy;
  MetricSummary extrema;
  double mean_reply_length = 0.0;  // reply tokens before the first EOS
  double distinct_ratio = 0.0;     // unique replies / pairs

  /// Human-readable summary table.
  std::string table() const;

  /// One JSON object per pair (null for undefined scores) followed by one
  /// summary object.
  std::string to_ndjson() const;
};

/// Scores each (reply, target) pair with the three embedding metrics.
/// Structural tokens are dropped before lookup; pairs left without any
/// embeddable token on either side are counted as undefined. The vectors
/// must be the same nonzero length.
MetricReport evaluate_pairs(const std::vector<std::vector<int>>& replies,
                            const std::vector<std::vector<int>>& targets,
                            const corpus::Vocabulary& vocab,
                            const EmbeddingSource& emb);

struct ResponseStats {
  double mean_length = 0.0;    // reply tokens before the first EOS
  double distinct_ratio = 0.0; // unique replies / dialogues
  std::size_t n = 0;
  /// Mean exact log-likelihood under the task oracle; -infinity when any
  /// reply is outside the task rule. Absent without an oracle.
  std::optional<double> mean_oracle_loglik;
};

/// Length, diversity and (optionally) oracle-likelihood statistics of
/// generated dialogues.
ResponseStats response_stats(const std::vector<corpus::Dialogue>& dialogues,
                             const corpus::ToyOracle* oracle = nullptr);

/// Probability that a uniformly drawn positive score exceeds a uniformly
/// drawn negative one, ties counting half: the area under the ROC curve.
/// Throws std::invalid_argument when either side is empty.
double ranking_auc(const std::vector<double>& positives,
                   const std::vector<double>& negatives);

/// Tab-separated training curves from run-log records: one row per record
/// that carries an "iteration" field, one column per numeric field seen in
/// any such record ("iteration" first, the rest sorted by name), empty
/// cells where a record lacks a column.
std::string plot_data_tsv(const std::vector<nlohmann::json>& entries);

}  // namespace dirl::eval

#endif  // DIRL_EVAL_REPORT_HPP_
