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

// Hand-rolled scalar-by-scalar reference implementations used as oracles.
// These are written directly from the layer equations, element loops only,
// with no shared code with the library under test.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dirl/numerics/param_store.hpp"

namespace dirl::testing {

using dirl::numerics::ParamStore;
using dirl::numerics::Tensor;

inline std::vector<double> ref_matvec(const Tensor& w, const std::vector<double>& x) {
  std::vector<double> out(w.rows(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t c = 0; c < w.cols(); ++c) out[r] += w.at(r, c) * x[c];
  }
  return out;
}

inline double ref_sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// GRU update written out gate by gate:
///   z = sigmoid(Wz x + Uz h + bz), r = sigmoid(Wr x + Ur h + br),
///   cand = tanh(Wh x + Uh (r .* h) + bh), h' = (1 - z) .* h + z .* cand.
inline std::vector<double> ref_gru_step(const ParamStore& store, const std::string& prefix,
                                        const std::vector<double>& x,
                                        const std::vector<double>& h) {
  const Tensor& wz = store.get(prefix + ".wz").value;
  const Tensor& uz = store.get(prefix + ".uz").value;
  const Tensor& bz = store.get(prefix + ".bz").value;
  const Tensor& wr = store.get(prefix + ".wr").value;
  const Tensor& ur = store.get(prefix + ".ur").value;
  const Tensor& br = store.get(prefix + ".br").value;
  const Tensor& wh = store.get(prefix + ".wh").value;
  const Tensor& uh = store.get(prefix + ".uh").value;
  const Tensor& bh = store.get(prefix + ".bh").value;

  const std::size_t n = h.size();
  std::vector<double> wzx = ref_matvec(wz, x), uzh = ref_matvec(uz, h);
  std::vector<double> wrx = ref_matvec(wr, x), urh = ref_matvec(ur, h);
  std::vector<double> z(n), r(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = ref_sigmoid(wzx[i] + uzh[i] + bz[i]);
    r[i] = ref_sigmoid(wrx[i] + urh[i] + br[i]);
  }
  std::vector<double> rh(n);
  for (std::size_t i = 0; i < n; ++i) rh[i] = r[i] * h[i];
  std::vector<double> whx = ref_matvec(wh, x), uhrh = ref_matvec(uh, rh);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double cand = std::tanh(whx[i] + uhrh[i] + bh[i]);
    out[i] = (1.0 - z[i]) * h[i] + z[i] * cand;
  }
  return out;
}

/// Multi-layer GRU step; hidden[l] is replaced in place, the top state is
/// returned.
inline std::vector<double> ref_gru_stack_step(const ParamStore& store,
                                              const std::string& prefix,
                                              std::size_t n_layers,
                                              const std::vector<double>& x,
                                              std::vector<std::vector<double>>& hidden) {
  std::vector<double> input = x;
  for (std::size_t l = 0; l < n_layers; ++l) {
    hidden[l] = ref_gru_step(store, prefix + ".l" + std::to_string(l), input, hidden[l]);
    input = hidden[l];
  }
  return hidden.back();
}

/// MLP with affine + tanh per layer and a linear final layer when
/// `final_linear`.
inline std::vector<double> ref_mlp(const ParamStore& store, const std::string& prefix,
                                   std::size_t n_layers, bool final_linear,
                                   const std::vector<double>& x) {
  std::vector<double> h = x;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Tensor& w = store.get(prefix + ".l" + std::to_string(l) + ".w").value;
    const Tensor& b = store.get(prefix + ".l" + std::to_string(l) + ".b").value;
    std::vector<double> next = ref_matvec(w, h);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += b[i];
    if (!(final_linear && l + 1 == n_layers)) {
      for (double& v : next) v = std::tanh(v);
    }
    h = std::move(next);
  }
  return h;
}

/// Scaled dot-product attention on explicit vectors.
inline std::vector<double> ref_attention(const std::vector<double>& query,
                                         const std::vector<std::vector<double>>& states) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(query.size()));
  std::vector<double> scores;
  for (const auto& s : states) {
    double d = 0.0;
    for (std::size_t i = 0; i < query.size(); ++i) d += query[i] * s[i];
    scores.push_back(d * scale);
  }
  double m = scores[0];
  for (double s : scores) m = std::max(m, s);
  double z = 0.0;
  std::vector<double> w(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::exp(scores[i] - m);
    z += w[i];
  }
  std::vector<double> out(states[0].size(), 0.0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += (w[i] / z) * states[i][d];
  }
  return out;
}

}  // namespace dirl::testing
