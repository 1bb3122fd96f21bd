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

#include "dirl/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace dirl::eval {
namespace {

double squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

/// Cosine through dot / sqrt(|a|^2 * |b|^2), clamped into [-1, 1]. This
/// form returns exactly 1.0 for bitwise-identical inputs, since the sqrt
/// of the squared product round-trips. Callers guarantee nonzero norms.
double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0;
  double a2 = 0.0;
  double b2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    a2 += a[i] * a[i];
    b2 += b[i] * b[i];
  }
  return std::clamp(dot / std::sqrt(a2 * b2), -1.0, 1.0);
}

/// Vectors the metrics may use: present in the source and carrying a
/// direction. Zero vectors have no cosine and are skipped like missing
/// tokens.
std::vector<const std::vector<double>*> embeddable(
    const std::vector<std::string>& tokens, const EmbeddingSource& emb) {
  std::vector<const std::vector<double>*> out;
  out.reserve(tokens.size());
  for (const std::string& tok : tokens) {
    const std::vector<double>* v = emb.find(tok);
    if (v != nullptr && squared_norm(*v) > 0.0) out.push_back(v);
  }
  return out;
}

std::vector<double> mean_vector(
    const std::vector<const std::vector<double>*>& vecs, std::size_t dim) {
  std::vector<double> mean(dim, 0.0);
  for (const std::vector<double>* v : vecs) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += (*v)[d];
  }
  for (double& x : mean) x /= static_cast<double>(vecs.size());
  return mean;
}

double match_direction(const std::vector<const std::vector<double>*>& from,
                       const std::vector<const std::vector<double>*>& to) {
  double sum = 0.0;
  for (const std::vector<double>* f : from) {
    double best = -1.0;
    for (const std::vector<double>* t : to) {
      best = std::max(best, cosine(*f, *t));
    }
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

/// Per-dimension value of largest magnitude, sign preserved. Magnitude
/// ties resolve to the larger signed value, a total order, so the result
/// does not depend on token order.
std::vector<double> extrema_vector(
    const std::vector<const std::vector<double>*>& vecs, std::size_t dim) {
  std::vector<double> ex(*vecs.front());
  for (std::size_t i = 1; i < vecs.size(); ++i) {
    const std::vector<double>& v = *vecs[i];
    for (std::size_t d = 0; d < dim; ++d) {
      const double cur = std::abs(ex[d]);
      const double cand = std::abs(v[d]);
      if (cand > cur || (cand == cur && v[d] > ex[d])) ex[d] = v[d];
    }
  }
  return ex;
}

}  // namespace

EmbeddingSource EmbeddingSource::from_vectors(
    std::map<std::string, std::vector<double>> table,
    EmbeddingProvenance provenance) {
  if (table.empty()) {
    throw std::invalid_argument("EmbeddingSource: empty table");
  }
  const std::size_t dim = table.begin()->second.size();
  if (dim == 0) {
    throw std::invalid_argument("EmbeddingSource: zero-dimensional vectors");
  }
  for (const auto& [token, vec] : table) {
    if (vec.size() != dim) {
      throw std::invalid_argument("EmbeddingSource: dimension mismatch at \"" +
                                  token + "\"");
    }
  }
  EmbeddingSource src;
  src.table_ = std::move(table);
  src.dim_ = dim;
  src.provenance_ = provenance;
  return src;
}

EmbeddingSource EmbeddingSource::from_generator(
    const policy::Generator& gen, const corpus::Vocabulary& vocab) {
  const numerics::Tensor& table = gen.params().get("embed.table").value;
  if (vocab.size() != table.rows()) {
    throw std::invalid_argument(
        "EmbeddingSource: vocabulary size does not match the embedding "
        "table");
  }
  std::map<std::string, std::vector<double>> out;
  for (std::size_t id = 0; id < table.rows(); ++id) {
    std::vector<double> row(table.cols());
    for (std::size_t d = 0; d < table.cols(); ++d) {
      row[d] = table.at(id, d);
    }
    out[vocab.token(static_cast<int>(id))] = std::move(row);
  }
  return from_vectors(std::move(out),
                      EmbeddingProvenance::kGeneratorEmbedding);
}

EmbeddingSource EmbeddingSource::from_file(
    const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("EmbeddingSource: cannot open " + path.string());
  }
  std::map<std::string, std::vector<double>> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;  // blank line
    std::vector<double> vec;
    double x = 0.0;
    while (ss >> x) vec.push_back(x);
    if (!ss.eof()) {
      throw std::invalid_argument("EmbeddingSource: bad value on line " +
                                  std::to_string(lineno));
    }
    if (vec.empty()) {
      throw std::invalid_argument("EmbeddingSource: no vector on line " +
                                  std::to_string(lineno));
    }
    if (!table.emplace(token, std::move(vec)).second) {
      throw std::invalid_argument("EmbeddingSource: duplicate token \"" +
                                  token + "\"");
    }
  }
  return from_vectors(std::move(table), EmbeddingProvenance::kExternalFile);
}

const std::vector<double>* EmbeddingSource::find(
    const std::string& token) const {
  const auto it = table_.find(token);
  return it == table_.end() ? nullptr : &it->second;
}

std::vector<std::string> content_tokens(const std::vector<int>& ids,
                                        const corpus::Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) {
    if (id == corpus::kPadId || id == corpus::kBosId ||
        id == corpus::kEosId || id == corpus::kUnkId ||
        id == corpus::kSepId) {
      continue;
    }
    out.push_back(vocab.token(id));
  }
  return out;
}

std::optional<double> average_metric(const std::vector<std::string>& reply,
                                     const std::vector<std::string>& target,
                                     const EmbeddingSource& emb) {
  const auto rv = embeddable(reply, emb);
  const auto tv = embeddable(target, emb);
  if (rv.empty() || tv.empty()) return std::nullopt;
  const std::vector<double> mr = mean_vector(rv, emb.dim());
  const std::vector<double> mt = mean_vector(tv, emb.dim());
  // Opposite tokens can cancel a mean to zero, which has no direction.
  if (squared_norm(mr) == 0.0 || squared_norm(mt) == 0.0) return std::nullopt;
  return cosine(mr, mt);
}

std::optional<double> greedy_metric(const std::vector<std::string>& reply,
                                    const std::vector<std::string>& target,
                                    const EmbeddingSource& emb) {
  const auto rv = embeddable(reply, emb);
  const auto tv = embeddable(target, emb);
  if (rv.empty() || tv.empty()) return std::nullopt;
  return 0.5 * (match_direction(rv, tv) + match_direction(tv, rv));
}

std::optional<double> extrema_metric(const std::vector<std::string>& reply,
                                     const std::vector<std::string>& target,
                                     const EmbeddingSource& emb) {
  const auto rv = embeddable(reply, emb);
  const auto tv = embeddable(target, emb);
  if (rv.empty() || tv.empty()) return std::nullopt;
  const std::vector<double> er = extrema_vector(rv, emb.dim());
  const std::vector<double> et = extrema_vector(tv, emb.dim());
  if (squared_norm(er) == 0.0 || squared_norm(et) == 0.0) return std::nullopt;
  return cosine(er, et);
}

}  // namespace dirl::eval
