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

#include "dirl/numerics/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace dirl::numerics {

GruCell GruCell::create(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                        std::size_t hidden_dim, Rng& rng) {
  GruCell c;
  c.in_dim = in_dim;
  c.hidden_dim = hidden_dim;
  c.wz = &store.add(prefix + ".wz", uniform_init({hidden_dim, in_dim}, rng));
  c.uz = &store.add(prefix + ".uz", uniform_init({hidden_dim, hidden_dim}, rng));
  c.bz = &store.add(prefix + ".bz", uniform_init({hidden_dim}, rng));
  c.wr = &store.add(prefix + ".wr", uniform_init({hidden_dim, in_dim}, rng));
  c.ur = &store.add(prefix + ".ur", uniform_init({hidden_dim, hidden_dim}, rng));
  c.br = &store.add(prefix + ".br", uniform_init({hidden_dim}, rng));
  c.wh = &store.add(prefix + ".wh", uniform_init({hidden_dim, in_dim}, rng));
  c.uh = &store.add(prefix + ".uh", uniform_init({hidden_dim, hidden_dim}, rng));
  c.bh = &store.add(prefix + ".bh", uniform_init({hidden_dim}, rng));
  return c;
}

GruCell GruCell::bind(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                      std::size_t hidden_dim) {
  GruCell c;
  c.in_dim = in_dim;
  c.hidden_dim = hidden_dim;
  c.wz = &store.get(prefix + ".wz");
  c.uz = &store.get(prefix + ".uz");
  c.bz = &store.get(prefix + ".bz");
  c.wr = &store.get(prefix + ".wr");
  c.ur = &store.get(prefix + ".ur");
  c.br = &store.get(prefix + ".br");
  c.wh = &store.get(prefix + ".wh");
  c.uh = &store.get(prefix + ".uh");
  c.bh = &store.get(prefix + ".bh");
  return c;
}

Var GruCell::step(Tape& t, Var x, Var h_prev) const {
  Var z = t.sigmoid(t.add(t.add(t.matvec(t.param(*wz), x), t.matvec(t.param(*uz), h_prev)),
                          t.param(*bz)));
  Var r = t.sigmoid(t.add(t.add(t.matvec(t.param(*wr), x), t.matvec(t.param(*ur), h_prev)),
                          t.param(*br)));
  Var cand = t.tanh(t.add(
      t.add(t.matvec(t.param(*wh), x), t.matvec(t.param(*uh), t.mul(r, h_prev))),
      t.param(*bh)));
  // (1 - z) * h + z * h~  ==  h - z*h + z*h~
  return t.add(t.sub(h_prev, t.mul(z, h_prev)), t.mul(z, cand));
}

GruStack GruStack::create(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                          std::size_t hidden_dim, std::size_t n_layers, Rng& rng) {
  if (n_layers == 0) throw std::invalid_argument("GruStack: need at least one layer");
  GruStack s;
  for (std::size_t l = 0; l < n_layers; ++l) {
    std::size_t in = l == 0 ? in_dim : hidden_dim;
    s.layers.push_back(
        GruCell::create(store, prefix + ".l" + std::to_string(l), in, hidden_dim, rng));
  }
  return s;
}

Var GruStack::step(Tape& t, Var x, std::vector<Var>& hidden) const {
  if (hidden.size() != layers.size()) {
    throw std::invalid_argument("GruStack::step: hidden state count mismatch");
  }
  Var input = x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    hidden[l] = layers[l].step(t, input, hidden[l]);
    input = hidden[l];
  }
  return hidden.back();
}

std::vector<Var> GruStack::zero_state(Tape& t) const {
  std::vector<Var> h;
  h.reserve(layers.size());
  for (const GruCell& c : layers) h.push_back(t.leaf(Tensor::vec(c.hidden_dim)));
  return h;
}

Mlp Mlp::create(ParamStore& store, const std::string& prefix,
                const std::vector<std::size_t>& dims, bool final_linear, Rng& rng) {
  if (dims.size() < 2) throw std::invalid_argument("Mlp: need at least one layer");
  Mlp m;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.w = &store.add(prefix + ".l" + std::to_string(l) + ".w",
                         uniform_init({dims[l + 1], dims[l]}, rng));
    layer.b = &store.add(prefix + ".l" + std::to_string(l) + ".b",
                         uniform_init({dims[l + 1]}, rng));
    layer.linear = final_linear && l + 2 == dims.size();
    m.layers.push_back(layer);
  }
  return m;
}

Var Mlp::forward(Tape& t, Var x) const {
  Var h = x;
  for (const Layer& layer : layers) {
    h = t.add(t.matvec(t.param(*layer.w), h), t.param(*layer.b));
    if (!layer.linear) h = t.tanh(h);
  }
  return h;
}

Embedding Embedding::create(ParamStore& store, const std::string& name, std::size_t vocab,
                            std::size_t dim, Rng& rng) {
  Embedding e;
  e.vocab = vocab;
  e.dim = dim;
  e.table = &store.add(name, uniform_init({vocab, dim}, rng));
  return e;
}

Var Embedding::lookup(Tape& t, int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
    throw std::invalid_argument("Embedding::lookup: id " + std::to_string(id) +
                                " out of range");
  }
  return t.row(t.param(*table), static_cast<std::size_t>(id));
}

Var attention_context(Tape& t, Var query, const std::vector<Var>& states) {
  if (states.empty()) {
    throw std::invalid_argument("attention_context: need at least one state");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(t.value(query).numel()));
  Var scores = t.scale(t.dot(query, states[0]), scale);
  for (std::size_t i = 1; i < states.size(); ++i) {
    scores = t.concat(scores, t.scale(t.dot(query, states[i]), scale));
  }
  Var weights = t.softmax(scores);
  Var ctx = t.smul(t.pick(weights, 0), states[0]);
  for (std::size_t i = 1; i < states.size(); ++i) {
    ctx = t.add(ctx, t.smul(t.pick(weights, i), states[i]));
  }
  return ctx;
}

}  // namespace dirl::numerics
