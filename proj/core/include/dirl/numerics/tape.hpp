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

#include <cstdint>
#include <map>
#include <vector>

#include "dirl/numerics/param_store.hpp"
#include "dirl/numerics/tensor.hpp"

namespace dirl::numerics {

/// Handle to a node on a Tape. Only valid for the tape that produced it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Reverse-mode computation tape. Forward values are computed eagerly as
/// operations are recorded; backward() runs one reverse sweep over the
/// recorded nodes and accumulates parameter gradients into their
/// ParamStore entries.
///
/// A tape in no_grad mode evaluates the same operations without ever
/// touching parameter gradients and refuses backward(); model evaluation
/// paths (sampling, rollouts, beam search, classification) run on no_grad
/// tapes, so forward passes with frozen parameters never race with anything.
///
/// Parameter leaves hold views of the Param values rather than copies, and
/// a Param appearing several times maps to one node, so its gradient
/// contributions accumulate in one place.
class Tape {
 public:
  enum class Mode { record, no_grad };

  explicit Tape(Mode mode = Mode::record) : mode_(mode) {}

  Mode mode() const { return mode_; }
  std::size_t node_count() const { return nodes_.size(); }

  Var leaf(Tensor value);
  Var param(Param& p);

  // Elementwise; shapes must match exactly.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);

  Var scale(Var a, double c);          // c * a
  Var smul(Var s, Var v);              // scalar s times tensor v
  Var matvec(Var w, Var x);            // rank-2 [m,n] times rank-1 [n]
  Var row(Var w, std::size_t i);       // row i of a rank-2 node
  Var concat(Var a, Var b);            // rank-1 concatenation

  Var sigmoid(Var a);
  Var tanh(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var softplus(Var a);                 // log(1 + exp(x)), overflow-safe

  Var softmax(Var a);                  // rank-1
  Var log_softmax(Var a);              // rank-1, max-subtraction form

  Var pick(Var a, std::size_t i);      // rank-1 element as a scalar node
  Var dot(Var a, Var b);
  Var sum(Var a);
  Var mean(Var a);

  const Tensor& value(Var v) const;
  double scalar(Var v) const;

  /// Gradient of the last backward() target with respect to node v.
  const Tensor& grad(Var v) const;

  /// Reverse sweep from a scalar node. Parameter gradients are added to
  /// the existing grad tensors; callers zero them beforehand when they
  /// want fresh gradients. May be called once per tape.
  void backward(Var loss_node);

  void clear();

 private:
  enum class Op : std::uint8_t {
    kLeaf,
    kParam,
    kAdd,
    kSub,
    kMul,
    kScale,
    kSmul,
    kMatvec,
    kRow,
    kConcat,
    kSigmoid,
    kTanh,
    kExp,
    kLog,
    kSoftplus,
    kSoftmax,
    kLogSoftmax,
    kPick,
    kDot,
    kSum,
    kMean,
  };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    std::size_t index = 0;   // row / pick index
    double c = 0.0;          // scale factor
    Tensor value;            // empty for kParam (value lives in the store)
    const Tensor* view = nullptr;
    Param* sink = nullptr;
    Tensor grad;
  };

  const Tensor& node_value(const Node& n) const { return n.view ? *n.view : n.value; }
  const Node& at(Var v) const;
  Var push(Node n);
  Tensor& ensure_grad(int id);

  std::vector<Node> nodes_;
  std::map<const Param*, int> param_nodes_;
  Mode mode_;
  bool swept_ = false;
};

}  // namespace dirl::numerics
