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

#include "dirl/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "dirl/corpus/vocabulary.hpp"

namespace dirl::eval {
namespace {

constexpr double kNormal95 = 1.959963984540054;

MetricSummary summarize(const std::vector<PairScores>& pairs,
                        std::optional<double> PairScores::*field) {
  MetricSummary s;
  double sum = 0.0;
  for (const PairScores& p : pairs) {
    const auto& v = p.*field;
    if (v.has_value()) {
      ++s.defined;
      sum += *v;
    } else {
      ++s.undefined;
    }
  }
  if (s.defined == 0) return s;
  s.mean = sum / static_cast<double>(s.defined);
  if (s.defined >= 2) {
    double ss = 0.0;
    for (const PairScores& p : pairs) {
      const auto& v = p.*field;
      if (v.has_value()) {
        const double d = *v - s.mean;
        ss += d * d;
      }
    }
    const double sd = std::sqrt(ss / static_cast<double>(s.defined - 1));
    s.ci_half = kNormal95 * sd / std::sqrt(static_cast<double>(s.defined));
  }
  return s;
}

std::size_t length_before_eos(const std::vector<int>& reply) {
  const auto it = std::find(reply.begin(), reply.end(), corpus::kEosId);
  return static_cast<std::size_t>(it - reply.begin());
}

double distinct_fraction(const std::vector<std::vector<int>>& replies) {
  const std::set<std::vector<int>> unique(replies.begin(), replies.end());
  return static_cast<double>(unique.size()) /
         static_cast<double>(replies.size());
}

nlohmann::json summary_json(const MetricSummary& s) {
  return {{"mean", s.mean},
          {"ci_half", s.ci_half},
          {"defined", s.defined},
          {"undefined", s.undefined}};
}

void append_row(std::string& out, const char* name, const MetricSummary& s) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-8s  %8.4f  +/-%7.4f  %6zu  %9zu\n",
                name, s.mean, s.ci_half, s.defined, s.undefined);
  out += buf;
}

}  // namespace

std::string MetricReport::table() const {
  std::string out =
      "metric        mean      95% CI   pairs  undefined\n";
  append_row(out, "average", average);
  append_row(out, "greedy", greedy);
  append_row(out, "extrema", extrema);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "mean reply length: %.4f\n",
                mean_reply_length);
  out += buf;
  std::snprintf(buf, sizeof(buf), "distinct reply ratio: %.4f\n",
                distinct_ratio);
  out += buf;
  return out;
}

std::string MetricReport::to_ndjson() const {
  std::string out;
  auto field = [](const std::optional<double>& v) {
    return v.has_value() ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const nlohmann::json rec = {{"pair", i},
                                {"average", field(pairs[i].average)},
                                {"greedy", field(pairs[i].greedy)},
                                {"extrema", field(pairs[i].extrema)}};
    out += rec.dump();
    out += "\n";
  }
  const nlohmann::json summary = {
      {"summary",
       {{"average", summary_json(average)},
        {"greedy", summary_json(greedy)},
        {"extrema", summary_json(extrema)},
        {"mean_reply_length", mean_reply_length},
        {"distinct_ratio", distinct_ratio}}}};
  out += summary.dump();
  out += "\n";
  return out;
}

MetricReport evaluate_pairs(const std::vector<std::vector<int>>& replies,
                            const std::vector<std::vector<int>>& targets,
                            const corpus::Vocabulary& vocab,
                            const EmbeddingSource& emb) {
  if (replies.empty() || replies.size() != targets.size()) {
    throw std::invalid_argument(
        "evaluate_pairs: reply and target counts must match and be nonzero");
  }
  MetricReport report;
  report.pairs.reserve(replies.size());
  double total_len = 0.0;
  for (std::size_t i = 0; i < replies.size(); ++i) {
    const std::vector<std::string> r = content_tokens(replies[i], vocab);
    const std::vector<std::string> t = content_tokens(targets[i], vocab);
    report.pairs.push_back({average_metric(r, t, emb),
                            greedy_metric(r, t, emb),
                            extrema_metric(r, t, emb)});
    total_len += static_cast<double>(length_before_eos(replies[i]));
  }
  report.average = summarize(report.pairs, &PairScores::average);
  report.greedy = summarize(report.pairs, &PairScores::greedy);
  report.extrema = summarize(report.pairs, &PairScores::extrema);
  report.mean_reply_length =
      total_len / static_cast<double>(replies.size());
  report.distinct_ratio = distinct_fraction(replies);
  return report;
}

ResponseStats response_stats(const std::vector<corpus::Dialogue>& dialogues,
                             const corpus::ToyOracle* oracle) {
  if (dialogues.empty()) {
    throw std::invalid_argument("response_stats: no dialogues");
  }
  ResponseStats stats;
  stats.n = dialogues.size();
  std::vector<std::vector<int>> replies;
  replies.reserve(dialogues.size());
  double total_len = 0.0;
  for (const corpus::Dialogue& d : dialogues) {
    total_len += static_cast<double>(length_before_eos(d.reply));
    replies.push_back(d.reply);
  }
  stats.mean_length = total_len / static_cast<double>(stats.n);
  stats.distinct_ratio = distinct_fraction(replies);
  if (oracle != nullptr) {
    double sum = 0.0;
    for (const corpus::Dialogue& d : dialogues) {
      sum += oracle->log_prob(d);
    }
    stats.mean_oracle_loglik = sum / static_cast<double>(stats.n);
  }
  return stats;
}

double ranking_auc(const std::vector<double>& positives,
                   const std::vector<double>& negatives) {
  if (positives.empty() || negatives.empty()) {
    throw std::invalid_argument("ranking_auc: both score sets must be "
                                "nonempty");
  }
  double wins = 0.0;
  for (double p : positives) {
    for (double n : negatives) {
      if (p > n) {
        wins += 1.0;
      } else if (p == n) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(positives.size()) *
                 static_cast<double>(negatives.size()));
}

std::string plot_data_tsv(const std::vector<nlohmann::json>& entries) {
  std::vector<const nlohmann::json*> rows;
  std::set<std::string> columns;
  for (const nlohmann::json& e : entries) {
    if (!e.is_object() || !e.contains("iteration") ||
        !e.at("iteration").is_number()) {
      continue;
    }
    rows.push_back(&e);
    for (const auto& [key, value] : e.items()) {
      if (key != "iteration" && value.is_number()) columns.insert(key);
    }
  }
  std::string out = "iteration";
  for (const std::string& c : columns) {
    out += '\t';
    out += c;
  }
  out += '\n';
  char buf[64];
  auto append_number = [&](const nlohmann::json& v) {
    if (v.is_number_unsigned()) {
      std::snprintf(buf, sizeof(buf), "%llu",
                    static_cast<unsigned long long>(v.get<std::uint64_t>()));
    } else if (v.is_number_integer()) {
      std::snprintf(buf, sizeof(buf), "%lld",
                    static_cast<long long>(v.get<std::int64_t>()));
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
    }
    out += buf;
  };
  for (const nlohmann::json* row : rows) {
    append_number(row->at("iteration"));
    for (const std::string& c : columns) {
      out += '\t';
      if (row->contains(c) && row->at(c).is_number()) {
        append_number(row->at(c));
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace dirl::eval
