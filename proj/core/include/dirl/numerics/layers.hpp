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

#include <string>
#include <vector>

#include "dirl/numerics/param_store.hpp"
#include "dirl/numerics/rng.hpp"
#include "dirl/numerics/tape.hpp"

namespace dirl::numerics {

/// Gated recurrent cell. With update gate z, reset gate r and candidate
/// state h~:
///
///   z  = sigmoid(Wz x + Uz h + bz)
///   r  = sigmoid(Wr x + Ur h + br)
///   h~ = tanh(Wh x + Uh (r * h) + bh)
///   h' = (1 - z) * h + z * h~
///
/// so all-zero weights give h' = 0.5 * h.
struct GruCell {
  Param* wz = nullptr;
  Param* uz = nullptr;
  Param* bz = nullptr;
  Param* wr = nullptr;
  Param* ur = nullptr;
  Param* br = nullptr;
  Param* wh = nullptr;
  Param* uh = nullptr;
  Param* bh = nullptr;
  std::size_t in_dim = 0;
  std::size_t hidden_dim = 0;

  static GruCell create(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                        std::size_t hidden_dim, Rng& rng);
  /// Rebind to parameters that already exist in the store (after a
  /// checkpoint load into a fresh store).
  static GruCell bind(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                      std::size_t hidden_dim);

  Var step(Tape& t, Var x, Var h_prev) const;
};

/// Stack of GRU cells; layer 0 consumes the input, each further layer
/// consumes the hidden state below it.
struct GruStack {
  std::vector<GruCell> layers;

  static GruStack create(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                         std::size_t hidden_dim, std::size_t n_layers, Rng& rng);

  std::size_t size() const { return layers.size(); }
  std::size_t hidden_dim() const { return layers.empty() ? 0 : layers[0].hidden_dim; }

  /// One time step: consumes `hidden` (one Var per layer) and replaces it.
  /// Returns the top-layer state.
  Var step(Tape& t, Var x, std::vector<Var>& hidden) const;

  /// Zero initial hidden state for each layer, as leaves on t.
  std::vector<Var> zero_state(Tape& t) const;
};

/// Fully connected stack: affine + tanh per layer, with an optionally
/// linear final layer.
struct Mlp {
  struct Layer {
    Param* w = nullptr;
    Param* b = nullptr;
    bool linear = false;
  };
  std::vector<Layer> layers;

  /// dims = {in, h1, ..., out}; final_linear leaves the last layer without
  /// the tanh.
  static Mlp create(ParamStore& store, const std::string& prefix,
                    const std::vector<std::size_t>& dims, bool final_linear, Rng& rng);

  Var forward(Tape& t, Var x) const;
};

/// Token embedding table, one row per id.
struct Embedding {
  Param* table = nullptr;
  std::size_t vocab = 0;
  std::size_t dim = 0;

  static Embedding create(ParamStore& store, const std::string& name, std::size_t vocab,
                          std::size_t dim, Rng& rng);

  Var lookup(Tape& t, int id) const;
};

/// Scaled dot-product attention over a list of encoder states. Scores are
/// query . state / sqrt(dim); the result is the softmax-weighted sum of
/// the states. A single state yields that state verbatim (weight 1).
Var attention_context(Tape& t, Var query, const std::vector<Var>& states);

}  // namespace dirl::numerics
