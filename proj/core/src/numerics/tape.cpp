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

#include "dirl/numerics/tape.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dirl::numerics {

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a) {
  throw std::invalid_argument(std::string("Tape::") + op + ": bad operand shape " +
                              a.shape_str());
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string("Tape::") + op + ": shape mismatch " +
                              a.shape_str() + " vs " + b.shape_str());
}

double stable_softplus(double x) {
  // max(x, 0) + log1p(exp(-|x|))
  double m = x > 0.0 ? x : 0.0;
  return m + std::log1p(std::exp(-std::abs(x)));
}

}  // namespace

const Tape::Node& Tape::at(Var v) const {
  if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw std::invalid_argument("Tape: invalid Var handle");
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tensor& Tape::ensure_grad(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.empty()) n.grad = Tensor(node_value(n).shape());
  return n.grad;
}

Var Tape::leaf(Tensor value) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::param(Param& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Var{it->second};
  Node n;
  n.op = Op::kParam;
  n.view = &p.value;
  n.sink = mode_ == Mode::record ? &p : nullptr;
  Var v = push(std::move(n));
  param_nodes_.emplace(&p, v.id);
  return v;
}

Var Tape::add(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb)) shape_error("add", ta, tb);
  Node n;
  n.op = Op::kAdd;
  n.a = a.id;
  n.b = b.id;
  n.value = ta;
  for (std::size_t i = 0; i < tb.numel(); ++i) n.value[i] += tb[i];
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb)) shape_error("sub", ta, tb);
  Node n;
  n.op = Op::kSub;
  n.a = a.id;
  n.b = b.id;
  n.value = ta;
  for (std::size_t i = 0; i < tb.numel(); ++i) n.value[i] -= tb[i];
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb)) shape_error("mul", ta, tb);
  Node n;
  n.op = Op::kMul;
  n.a = a.id;
  n.b = b.id;
  n.value = ta;
  for (std::size_t i = 0; i < tb.numel(); ++i) n.value[i] *= tb[i];
  return push(std::move(n));
}

Var Tape::scale(Var a, double c) {
  Node n;
  n.op = Op::kScale;
  n.a = a.id;
  n.c = c;
  n.value = value(a);
  for (double& v : n.value.data()) v *= c;
  return push(std::move(n));
}

Var Tape::smul(Var s, Var v) {
  const Tensor& ts = value(s);
  const Tensor& tv = value(v);
  if (ts.numel() != 1) shape_error("smul", ts);
  Node n;
  n.op = Op::kSmul;
  n.a = s.id;
  n.b = v.id;
  n.value = tv;
  for (double& x : n.value.data()) x *= ts[0];
  return push(std::move(n));
}

Var Tape::matvec(Var w, Var x) {
  const Tensor& tw = value(w);
  const Tensor& tx = value(x);
  if (tw.rank() != 2 || tx.rank() != 1 || tw.cols() != tx.numel()) {
    shape_error("matvec", tw, tx);
  }
  Node n;
  n.op = Op::kMatvec;
  n.a = w.id;
  n.b = x.id;
  n.value = Tensor::vec(tw.rows());
  const std::size_t rows = tw.rows();
  const std::size_t cols = tw.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* wr = tw.data().data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * tx[c];
    n.value[r] = acc;
  }
  return push(std::move(n));
}

Var Tape::row(Var w, std::size_t i) {
  const Tensor& tw = value(w);
  if (tw.rank() != 2 || i >= tw.rows()) shape_error("row", tw);
  Node n;
  n.op = Op::kRow;
  n.a = w.id;
  n.index = i;
  n.value = Tensor::vec(tw.cols());
  for (std::size_t c = 0; c < tw.cols(); ++c) n.value[c] = tw.at(i, c);
  return push(std::move(n));
}

Var Tape::concat(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (ta.rank() != 1 || tb.rank() != 1) shape_error("concat", ta, tb);
  Node n;
  n.op = Op::kConcat;
  n.a = a.id;
  n.b = b.id;
  n.value = Tensor::vec(ta.numel() + tb.numel());
  for (std::size_t i = 0; i < ta.numel(); ++i) n.value[i] = ta[i];
  for (std::size_t i = 0; i < tb.numel(); ++i) n.value[ta.numel() + i] = tb[i];
  return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = a.id;
  n.value = value(a);
  for (double& v : n.value.data()) v = 1.0 / (1.0 + std::exp(-v));
  return push(std::move(n));
}

Var Tape::tanh(Var a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a.id;
  n.value = value(a);
  for (double& v : n.value.data()) v = std::tanh(v);
  return push(std::move(n));
}

Var Tape::exp(Var a) {
  Node n;
  n.op = Op::kExp;
  n.a = a.id;
  n.value = value(a);
  for (double& v : n.value.data()) v = std::exp(v);
  return push(std::move(n));
}

Var Tape::log(Var a) {
  Node n;
  n.op = Op::kLog;
  n.a = a.id;
  n.value = value(a);
  for (double& v : n.value.data()) v = std::log(v);
  return push(std::move(n));
}

Var Tape::softplus(Var a) {
  Node n;
  n.op = Op::kSoftplus;
  n.a = a.id;
  n.value = value(a);
  for (double& v : n.value.data()) v = stable_softplus(v);
  return push(std::move(n));
}

Var Tape::softmax(Var a) {
  const Tensor& ta = value(a);
  if (ta.rank() != 1 || ta.numel() == 0) shape_error("softmax", ta);
  Node n;
  n.op = Op::kSoftmax;
  n.a = a.id;
  n.value = ta;
  double m = -std::numeric_limits<double>::infinity();
  for (double v : n.value.data()) m = std::max(m, v);
  double s = 0.0;
  for (double& v : n.value.data()) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : n.value.data()) v /= s;
  return push(std::move(n));
}

Var Tape::log_softmax(Var a) {
  const Tensor& ta = value(a);
  if (ta.rank() != 1 || ta.numel() == 0) shape_error("log_softmax", ta);
  Node n;
  n.op = Op::kLogSoftmax;
  n.a = a.id;
  n.value = ta;
  log_softmax_inplace(n.value.data());
  return push(std::move(n));
}

Var Tape::pick(Var a, std::size_t i) {
  const Tensor& ta = value(a);
  if (ta.rank() != 1 || i >= ta.numel()) shape_error("pick", ta);
  Node n;
  n.op = Op::kPick;
  n.a = a.id;
  n.index = i;
  n.value = Tensor::scalar(ta[i]);
  return push(std::move(n));
}

Var Tape::dot(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (ta.rank() != 1 || !ta.same_shape(tb)) shape_error("dot", ta, tb);
  double acc = 0.0;
  for (std::size_t i = 0; i < ta.numel(); ++i) acc += ta[i] * tb[i];
  Node n;
  n.op = Op::kDot;
  n.a = a.id;
  n.b = b.id;
  n.value = Tensor::scalar(acc);
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  const Tensor& ta = value(a);
  double acc = 0.0;
  for (double v : ta.data()) acc += v;
  Node n;
  n.op = Op::kSum;
  n.a = a.id;
  n.value = Tensor::scalar(acc);
  return push(std::move(n));
}

Var Tape::mean(Var a) {
  const Tensor& ta = value(a);
  if (ta.numel() == 0) shape_error("mean", ta);
  double acc = 0.0;
  for (double v : ta.data()) acc += v;
  Node n;
  n.op = Op::kMean;
  n.a = a.id;
  n.value = Tensor::scalar(acc / static_cast<double>(ta.numel()));
  return push(std::move(n));
}

const Tensor& Tape::value(Var v) const { return node_value(at(v)); }

double Tape::scalar(Var v) const {
  const Tensor& t = value(v);
  if (t.numel() != 1) {
    throw std::invalid_argument("Tape::scalar: node is not scalar, shape " + t.shape_str());
  }
  return t[0];
}

const Tensor& Tape::grad(Var v) const {
  const Node& n = at(v);
  if (!swept_) throw std::logic_error("Tape::grad: backward() has not run");
  if (n.grad.empty()) {
    throw std::logic_error("Tape::grad: node was not reached by backward()");
  }
  return n.grad;
}

void Tape::backward(Var loss_node) {
  if (mode_ == Mode::no_grad) {
    throw std::logic_error("Tape::backward: tape is in no_grad mode");
  }
  if (swept_) throw std::logic_error("Tape::backward: tape already swept");
  const Tensor& loss = value(loss_node);
  if (loss.numel() != 1) {
    throw std::invalid_argument("Tape::backward: loss must be scalar, shape " +
                                loss.shape_str());
  }
  swept_ = true;
  ensure_grad(loss_node.id)[0] = 1.0;

  for (int id = loss_node.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.empty()) continue;  // not reachable from the loss
    const Tensor& g = n.grad;
    switch (n.op) {
      case Op::kLeaf:
      case Op::kParam:
        break;
      case Op::kAdd: {
        Tensor& ga = ensure_grad(n.a);
        Tensor& gb = ensure_grad(n.b);
        for (std::size_t i = 0; i < g.numel(); ++i) {
          ga[i] += g[i];
          gb[i] += g[i];
        }
        break;
      }
      case Op::kSub: {
        Tensor& ga = ensure_grad(n.a);
        Tensor& gb = ensure_grad(n.b);
        for (std::size_t i = 0; i < g.numel(); ++i) {
          ga[i] += g[i];
          gb[i] -= g[i];
        }
        break;
      }
      case Op::kMul: {
        const Tensor& va = node_value(nodes_[n.a]);
        const Tensor& vb = node_value(nodes_[n.b]);
        Tensor& ga = ensure_grad(n.a);
        Tensor& gb = ensure_grad(n.b);
        for (std::size_t i = 0; i < g.numel(); ++i) {
          ga[i] += g[i] * vb[i];
          gb[i] += g[i] * va[i];
        }
        break;
      }
      case Op::kScale: {
        Tensor& ga = ensure_grad(n.a);
        for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * n.c;
        break;
      }
      case Op::kSmul: {
        const Tensor& vs = node_value(nodes_[n.a]);
        const Tensor& vv = node_value(nodes_[n.b]);
        Tensor& gs = ensure_grad(n.a);
        Tensor& gv = ensure_grad(n.b);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.numel(); ++i) {
          acc += g[i] * vv[i];
          gv[i] += g[i] * vs[0];
        }
        gs[0] += acc;
        break;
      }
      case Op::kMatvec: {
        const Tensor& vw = node_value(nodes_[n.a]);
        const Tensor& vx = node_value(nodes_[n.b]);
        Tensor& gw = ensure_grad(n.a);
        Tensor& gx = ensure_grad(n.b);
        const std::size_t rows = vw.rows();
        const std::size_t cols = vw.cols();
        for (std::size_t r = 0; r < rows; ++r) {
          const double gr = g[r];
          double* gwr = gw.data().data() + r * cols;
          const double* wr = vw.data().data() + r * cols;
          for (std::size_t c = 0; c < cols; ++c) {
            gwr[c] += gr * vx[c];
            gx[c] += gr * wr[c];
          }
        }
        break;
      }
      case Op::kRow: {
        Tensor& gw = ensure_grad(n.a);
        const std::size_t cols = g.numel();
        double* target = gw.data().data() + n.index * cols;
        for (std::size_t c = 0; c < cols; ++c) target[c] += g[c];
        break;
      }
      case Op::kConcat: {
        Tensor& ga = ensure_grad(n.a);
        Tensor& gb = ensure_grad(n.b);
        for (std::size_t i = 0; i < ga.numel(); ++i) ga[i] += g[i];
        for (std::size_t i = 0; i < gb.numel(); ++i) gb[i] += g[ga.numel() + i];
        break;
      }
      case Op::kSigmoid: {
        Tensor& ga = ensure_grad(n.a);
        for (std::size_t i = 0; i < g.numel(); ++i) {
          double y = n.value[i];
          ga[i] += g[i] * y * (1.0 - y);
        }
        break;
      }
      case Op::kTanh: {
        Tensor& ga = ensure_grad(n.a);
        for (std::size_t i = 0; i < g.numel(); ++i) {
          double y = n.value[i];
          ga[i] += g[i] * (1.0 - y * y);
        }
        break;
      }
      case Op::kExp: {
        Tensor& ga = ensure_grad(n.a);
        for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * n.value[i];
        break;
      }
      case Op::kLog: {
        const Tensor& va = node_value(nodes_[n.a]);
        Tensor& ga = ensure_grad(n.a);
        for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] / va[i];
        break;
      }
      case Op::kSoftplus: {
        const Tensor& va = node_value(nodes_[n.a]);
        Tensor& ga = ensure_grad(n.a);
        for (std::size_t i = 0; i < g.numel(); ++i) {
          ga[i] += g[i] / (1.0 + std::exp(-va[i]));
        }
        break;
      }
      case Op::kSoftmax: {
        Tensor& ga = ensure_grad(n.a);
        double gy = 0.0;
        for (std::size_t i = 0; i < g.numel(); ++i) gy += g[i] * n.value[i];
        for (std::size_t i = 0; i < g.numel(); ++i) {
          ga[i] += n.value[i] * (g[i] - gy);
        }
        break;
      }
      case Op::kLogSoftmax: {
        Tensor& ga = ensure_grad(n.a);
        double gsum = 0.0;
        for (double v : g.data()) gsum += v;
        for (std::size_t i = 0; i < g.numel(); ++i) {
          ga[i] += g[i] - std::exp(n.value[i]) * gsum;
        }
        break;
      }
      case Op::kPick: {
        Tensor& ga = ensure_grad(n.a);
        ga[n.index] += g[0];
        break;
      }
      case Op::kDot: {
        const Tensor& va = node_value(nodes_[n.a]);
        const Tensor& vb = node_value(nodes_[n.b]);
        Tensor& ga = ensure_grad(n.a);
        Tensor& gb = ensure_grad(n.b);
        for (std::size_t i = 0; i < va.numel(); ++i) {
          ga[i] += g[0] * vb[i];
          gb[i] += g[0] * va[i];
        }
        break;
      }
      case Op::kSum: {
        Tensor& ga = ensure_grad(n.a);
        for (double& v : ga.data()) v += g[0];
        break;
      }
      case Op::kMean: {
        Tensor& ga = ensure_grad(n.a);
        const double s = g[0] / static_cast<double>(ga.numel());
        for (double& v : ga.data()) v += s;
        break;
      }
    }
  }

  // Flush parameter-leaf gradients into the store.
  for (auto& [p, id] : param_nodes_) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.empty() || n.sink == nullptr) continue;
    Tensor& dst = n.sink->grad;
    for (std::size_t i = 0; i < dst.numel(); ++i) dst[i] += n.grad[i];
  }
}

void Tape::clear() {
  nodes_.clear();
  param_nodes_.clear();
  swept_ = false;
}

}  // namespace dirl::numerics
