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

#ifndef DIRL_EVAL_METRICS_HPP_
#define DIRL_EVAL_METRICS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirl/corpus/vocabulary.hpp"
#include "dirl/policy/generator.hpp"

namespace dirl::eval {

enum class EmbeddingProvenance { kGeneratorEmbedding, kExternalFile };

/// Token-to-vector lookup for the embedding metrics. All vectors share one
/// dimension. Tokens absent from the source are skipped by the metrics; a
/// pair whose utterances lose every token this way is undefined rather
/// than zero.
class EmbeddingSource {
 public:
  /// Wraps an explicit table. Throws std::invalid_argument when the table
  /// is empty or the vector dimensions disagree.
  static EmbeddingSource from_vectors(
      std::map<std::string, std::vector<double>> table,
      EmbeddingProvenance provenance);

  /// Rows of the generator's embedding table, keyed by the vocabulary's
  /// token strings. The vocabulary must be exactly as large as the
  /// generator's token space.
  static EmbeddingSource from_generator(const policy::Generator& gen,
                                        const corpus::Vocabulary& vocab);

  /// Text format: one token per line followed by its whitespace-separated
  /// vector components. Throws std::runtime_error on unreadable files and
  /// std::invalid_argument on malformed lines, duplicate tokens or
  /// inconsistent dimensions.
  static EmbeddingSource from_file(const std::filesystem::path& path);

  /// Vector for a token, or nullptr when absent.
  const std::vector<double>* find(const std::string& token) const;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }
  EmbeddingProvenance provenance() const { return provenance_; }

 private:
  std::map<std::string, std::vector<double>> table_;
  std::size_t dim_ = 0;
  EmbeddingProvenance provenance_ = EmbeddingProvenance::kExternalFile;
};

/// Decodes reply ids to token strings, dropping the structural tokens
/// (PAD, BOS, EOS, UNK, SEP) that never carry content. The persona and
/// number placeholders count as content.
std::vector<std::string> content_tokens(const std::vector<int>& ids,
                                        const corpus::Vocabulary& vocab);

/// Cosine of the per-utterance mean embedding vectors. Undefined when
/// either side has no embeddable token or a mean vector cancels to zero.
std::optional<double> average_metric(const std::vector<std::string>& reply,
                                     const std::vector<std::string>& target,
                                     const EmbeddingSource& emb);

/// Mean over one side's tokens of the best cosine against the other side,
/// averaged over both directions so the score is symmetric.
std::optional<double> greedy_metric(const std::vector<std::string>& reply,
                                    const std::vector<std::string>& target,
                                    const EmbeddingSource& emb);

/// Cosine of the per-dimension extrema vectors: each dimension keeps the
/// value of largest magnitude across the utterance's tokens, sign
/// preserved. Magnitude ties prefer the larger signed value, which keeps
/// the result independent of token order.
std::optional<double> extrema_metric(const std::vector<std::string>& reply,
                                     const std::vector<std::string>& target,
                                     const EmbeddingSource& emb);

}  // namespace dirl::eval

#endif  // DIRL_EVAL_METRICS_HPP_
