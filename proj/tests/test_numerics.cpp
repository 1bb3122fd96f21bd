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

#include <cmath>
#include <filesystem>
#include <vector>

#include "dirl/numerics/checkpoint.hpp"
#include "dirl/numerics/gradcheck.hpp"
#include "dirl/numerics/layers.hpp"
#include "dirl/numerics/optim.hpp"
#include "dirl/numerics/param_store.hpp"
#include "dirl/numerics/rng.hpp"
#include "dirl/numerics/tape.hpp"
#include "dirl/numerics/tensor.hpp"
#include "support/scalar_reference.hpp"

using namespace dirl::numerics;
namespace ref = dirl::testing;

namespace {

std::vector<double> to_vec(const Tensor& t) {
  return std::vector<double>(t.data().begin(), t.data().end());
}

}  // namespace

TEST_CASE("tensor shape and value count stay consistent") {
  Tensor t = Tensor::matrix(2, 3);
  CHECK(t.numel() == 6);
  CHECK(t.rank() == 2);
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor({1, 1, 1, 1}), std::invalid_argument);
  t.at(1, 2) = 7.0;
  CHECK(t[5] == 7.0);
  CHECK(t.all_finite());
  t[0] = std::nan("");
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("log_softmax matches symmetry and high-precision values") {
  SUBCASE("two equal logits give ln(1/2)") {
    Tensor out = log_softmax(Tensor::from({0.0, 0.0}));
    CHECK(out[0] == doctest::Approx(-0.6931471805599453).epsilon(1e-14));
    CHECK(out[1] == out[0]);
  }
  SUBCASE("huge equal logits do not overflow") {
    // The max-subtraction form pays one rounding of ulp(1000) in the lse.
    Tensor out = log_softmax(Tensor::from({1000.0, 1000.0}));
    CHECK(out[0] == doctest::Approx(-0.6931471805599453).epsilon(1e-12));
    CHECK(std::isfinite(out[1]));
  }
  SUBCASE("[1,2,3] against an arbitrary-precision oracle") {
    // Frozen from a 30-digit computation of x - log(sum(exp(x))).
    Tensor out = log_softmax(Tensor::from({1.0, 2.0, 3.0}));
    CHECK(out[0] == doctest::Approx(-2.407605964444380304483).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(-1.407605964444380304483).epsilon(1e-14));
    CHECK(out[2] == doctest::Approx(-0.407605964444380304483).epsilon(1e-14));
  }
  SUBCASE("exp of outputs sums to one within 1e-12") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> logits;
      for (int i = 0; i < 11; ++i) logits.push_back(rng.uniform(-30.0, 30.0));
      Tensor out = log_softmax(Tensor::from(logits));
      double s = 0.0;
      for (double v : out.data()) s += std::exp(v);
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
  SUBCASE("shift invariance is exact for the max-subtraction form") {
    Tensor x = Tensor::from({0.3, -1.7, 2.2, 0.0});
    Tensor shifted = x;
    for (double& v : shifted.data()) v += 123.25;  // exactly representable shift
    Tensor a = log_softmax(x);
    Tensor b = log_softmax(shifted);
    for (std::size_t i = 0; i < a.numel(); ++i) {
      CHECK(std::abs(a[i] - b[i]) <= 1e-10);
    }
  }
}

TEST_CASE("rng streams are deterministic and well ranged") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng c(1);
  for (int i = 0; i < 1000; ++i) {
    double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(c.below(7) < 7);
  }
  Rng d(5), e(5);
  Rng f1 = d.fork("x");
  Rng f2 = e.fork("x");
  CHECK(f1.next() == f2.next());
  CHECK_THROWS_AS(c.below(0), std::invalid_argument);
}

TEST_CASE("param store keeps sorted deterministic iteration and rejects duplicates") {
  ParamStore store(9);
  Rng rng(1);
  store.add("b.second", uniform_init({2}, rng));
  store.add("a.first", uniform_init({3}, rng));
  CHECK_THROWS_AS(store.add("a.first", Tensor::vec(3)), std::invalid_argument);
  std::vector<std::string> names;
  for (auto& [name, p] : store) names.push_back(name);
  CHECK(names == std::vector<std::string>{"a.first", "b.second"});
  store.get("a.first").grad.fill(2.0);
  CHECK(store.grad_norm() == doctest::Approx(std::sqrt(12.0)));
  store.zero_grads();
  CHECK(store.grad_norm() == 0.0);
}

TEST_CASE("backward of sum gives ones and detached losses give zeros") {
  ParamStore store;
  Rng rng(3);
  Param& p = store.add("p", uniform_init({4}, rng));
  Param& q = store.add("q.unreachable", uniform_init({2}, rng));

  SUBCASE("sum -> all ones") {
    Tape t;
    Var loss = t.sum(t.param(p));
    store.zero_grads();
    t.backward(loss);
    for (double g : p.grad.data()) CHECK(g == 1.0);
    for (double g : q.grad.data()) CHECK(g == 0.0);  // unreachable stays zero
  }
  SUBCASE("0 * f(p) -> all zeros") {
    Tape t;
    Var loss = t.scale(t.sum(t.tanh(t.param(p))), 0.0);
    store.zero_grads();
    t.backward(loss);
    for (double g : p.grad.data()) CHECK(g == 0.0);
  }
  SUBCASE("backward demands a recorded scalar and a record-mode tape") {
    Tape t(Tape::Mode::no_grad);
    Var v = t.param(p);
    CHECK_THROWS_AS(t.backward(v), std::logic_error);
    Tape t2;
    Var w = t2.param(p);
    CHECK_THROWS_AS(t2.backward(w), std::invalid_argument);  // non-scalar loss
  }
}

TEST_CASE("finite differences on a quadratic are exact to roundoff") {
  ParamStore store;
  Rng rng(11);
  store.add("x", uniform_init({6}, rng, -1.0, 1.0));
  auto loss = [&](bool with_grads) {
    if (with_grads) store.zero_grads();
    Tape t(with_grads ? Tape::Mode::record : Tape::Mode::no_grad);
    Var x = t.param(store.get("x"));
    Var l = t.scale(t.dot(x, x), 0.5);
    if (with_grads) t.backward(l);
    return t.scalar(l);
  };
  FiniteDiffOptions opt;
  opt.coords_per_param = 6;
  FiniteDiffReport report = finite_diff_check(store, loss, opt);
  CHECK(report.coords_checked == 6);
  CHECK(report.max_rel_error < 1e-8);
  // Analytic gradient of the quadratic is the point itself.
  loss(true);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(store.get("x").grad[i] == doctest::Approx(store.get("x").value[i]).epsilon(1e-15));
  }
}

TEST_CASE("finite_diff_check flags a non-deterministic loss") {
  ParamStore store;
  Rng rng(4);
  store.add("x", uniform_init({2}, rng));
  int calls = 0;
  auto loss = [&](bool) {
    return static_cast<double>(++calls);  // changes every call
  };
  CHECK_THROWS_AS(finite_diff_check(store, loss), std::runtime_error);
}

TEST_CASE("composite tape graph matches finite differences") {
  ParamStore store;
  Rng rng(17);
  store.add("w", uniform_init({3, 4}, rng, -0.5, 0.5));
  store.add("b", uniform_init({3}, rng, -0.5, 0.5));
  store.add("e", uniform_init({5, 4}, rng, -0.5, 0.5));

  auto loss = [&](bool with_grads) {
    if (with_grads) store.zero_grads();
    Tape t(with_grads ? Tape::Mode::record : Tape::Mode::no_grad);
    Var x = t.row(t.param(store.get("e")), 2);
    Var h = t.tanh(t.add(t.matvec(t.param(store.get("w")), x), t.param(store.get("b"))));
    Var s = t.softmax(h);
    Var lp = t.log_softmax(t.concat(h, t.mul(h, h)));
    Var mixed = t.add(t.smul(t.pick(s, 0), h), t.scale(h, 0.25));
    Var l = t.add(t.add(t.mean(mixed), t.pick(lp, 4)),
                  t.add(t.softplus(t.dot(h, h)), t.log(t.exp(t.pick(h, 1)))));
    if (with_grads) t.backward(l);
    return t.scalar(l);
  };
  FiniteDiffOptions opt;
  opt.coords_per_param = 8;
  opt.seed = 99;
  FiniteDiffReport report = finite_diff_check(store, loss, opt);
  CAPTURE(report.worst_param);
  CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("gru cell analytic cases and scalar reference") {
  SUBCASE("all-zero weights halve the hidden state") {
    ParamStore store;
    Rng rng(1);
    GruCell cell = GruCell::create(store, "g", 2, 3, rng);
    for (auto& [name, p] : store) p.value.fill(0.0);
    Tape t;
    Var h = t.leaf(Tensor::from({1.0, -2.0, 0.5}));
    Var x = t.leaf(Tensor::from({0.3, 0.7}));
    Var out = cell.step(t, x, h);
    CHECK(t.value(out)[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(t.value(out)[1] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(t.value(out)[2] == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("zero input and state with zero biases is a fixed point") {
    ParamStore store;
    Rng rng(2);
    GruCell cell = GruCell::create(store, "g", 3, 3, rng);
    store.get("g.bz").value.fill(0.0);
    store.get("g.br").value.fill(0.0);
    store.get("g.bh").value.fill(0.0);
    Tape t;
    Var out = cell.step(t, t.leaf(Tensor::vec(3)), t.leaf(Tensor::vec(3)));
    for (double v : t.value(out).data()) CHECK(v == 0.0);
  }
  SUBCASE("random 3-unit cell matches the scalar reference") {
    ParamStore store;
    Rng rng(33);
    GruCell cell = GruCell::create(store, "g", 3, 3, rng);
    std::vector<double> x{0.25, -0.5, 0.125}, h{0.75, 0.0, -0.25};
    Tape t;
    Var out = cell.step(t, t.leaf(Tensor::from(x)), t.leaf(Tensor::from(h)));
    std::vector<double> expected = ref::ref_gru_step(store, "g", x, h);
    std::vector<double> got = to_vec(t.value(out));
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
  }
  SUBCASE("gradients through the cell match finite differences") {
    ParamStore store;
    Rng rng(5);
    GruCell cell = GruCell::create(store, "g", 2, 3, rng);
    auto loss = [&](bool with_grads) {
      if (with_grads) store.zero_grads();
      Tape t(with_grads ? Tape::Mode::record : Tape::Mode::no_grad);
      Var h0 = t.leaf(Tensor::from({0.1, -0.3, 0.6}));
      Var x0 = t.leaf(Tensor::from({0.9, -0.2}));
      Var h1 = cell.step(t, x0, h0);
      Var h2 = cell.step(t, x0, h1);  // reuse exercises grad accumulation
      Var l = t.sum(t.mul(h2, h2));
      if (with_grads) t.backward(l);
      return t.scalar(l);
    };
    FiniteDiffReport report = finite_diff_check(store, loss, {1e-5, 4, 7});
    CHECK(report.max_rel_error < 1e-6);
  }
}

TEST_CASE("attention follows the scaled dot-product definition") {
  Tape t;
  SUBCASE("single state is returned verbatim") {
    Var q = t.leaf(Tensor::from({5.0, -3.0}));
    Var s = t.leaf(Tensor::from({0.25, 0.75}));
    Var ctx = attention_context(t, q, {s});
    CHECK(t.value(ctx)[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(t.value(ctx)[1] == doctest::Approx(0.75).epsilon(1e-15));
  }
  SUBCASE("orthogonal states with equal scores average") {
    Var q = t.leaf(Tensor::vec(2));  // zero query -> equal scores
    std::vector<Var> states = {
        t.leaf(Tensor::from({1.0, 0.0})), t.leaf(Tensor::from({0.0, 1.0})),
        t.leaf(Tensor::from({2.0, 0.0})), t.leaf(Tensor::from({0.0, 3.0}))};
    Var ctx = attention_context(t, q, states);
    CHECK(t.value(ctx)[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(t.value(ctx)[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("2x2 example matches the hand-rolled computation") {
    std::vector<double> q{0.5, -1.0};
    std::vector<std::vector<double>> states{{1.0, 2.0}, {-0.5, 0.25}};
    Var qv = t.leaf(Tensor::from(q));
    Var ctx = attention_context(
        t, qv, {t.leaf(Tensor::from(states[0])), t.leaf(Tensor::from(states[1]))});
    std::vector<double> expected = ref::ref_attention(q, states);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(t.value(ctx)[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
  }
  SUBCASE("empty state list is rejected") {
    Var q = t.leaf(Tensor::from({1.0}));
    CHECK_THROWS_AS(attention_context(t, q, {}), std::invalid_argument);
  }
}

TEST_CASE("mlp forward covers identity, bias and the scalar reference") {
  SUBCASE("identity weights with linear activation pass input through") {
    ParamStore store;
    Rng rng(1);
    Mlp mlp = Mlp::create(store, "m", {3, 3}, true, rng);
    Param& w = store.get("m.l0.w");
    w.value.fill(0.0);
    for (std::size_t i = 0; i < 3; ++i) w.value.at(i, i) = 1.0;
    store.get("m.l0.b").value.fill(0.0);
    Tape t;
    Var out = mlp.forward(t, t.leaf(Tensor::from({3.0, -1.0, 0.5})));
    CHECK(to_vec(t.value(out)) == std::vector<double>{3.0, -1.0, 0.5});
  }
  SUBCASE("zero weights with linear activation output the bias") {
    ParamStore store;
    Rng rng(2);
    Mlp mlp = Mlp::create(store, "m", {4, 2}, true, rng);
    store.get("m.l0.w").value.fill(0.0);
    Param& b = store.get("m.l0.b");
    b.value[0] = 1.5;
    b.value[1] = -2.5;
    Tape t;
    Var out = mlp.forward(t, t.leaf(Tensor::from({9.0, 9.0, 9.0, 9.0})));
    CHECK(to_vec(t.value(out)) == std::vector<double>{1.5, -2.5});
  }
  SUBCASE("two tanh layers match the scalar reference") {
    ParamStore store;
    Rng rng(3);
    Mlp mlp = Mlp::create(store, "m", {3, 4, 2}, false, rng);
    std::vector<double> x{0.5, -0.25, 1.0};
    Tape t;
    Var out = mlp.forward(t, t.leaf(Tensor::from(x)));
    std::vector<double> expected = ref::ref_mlp(store, "m", 2, false, x);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(t.value(out)[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("adam behaves per definition") {
  ParamStore store;
  Rng rng(8);
  store.add("p", uniform_init({5}, rng));
  AdamConfig cfg;
  cfg.lr = 0.001;
  AdamState adam(store, cfg);

  SUBCASE("first step with constant gradient moves by about lr times sign") {
    std::vector<double> before = to_vec(store.get("p").value);
    store.get("p").grad.fill(0.25);
    adam.step(store);
    CHECK(adam.step_count() == 1);
    for (std::size_t i = 0; i < 5; ++i) {
      double delta = store.get("p").value[i] - before[i];
      CHECK(delta == doctest::Approx(-cfg.lr).epsilon(1e-4));
    }
  }
  SUBCASE("zero gradient leaves parameters unchanged but counts the step") {
    std::vector<double> before = to_vec(store.get("p").value);
    store.zero_grads();
    adam.step(store);
    CHECK(adam.step_count() == 1);
    CHECK(to_vec(store.get("p").value) == before);
  }
  SUBCASE("layout drift is rejected") {
    ParamStore other;
    Rng r2(1);
    other.add("p", uniform_init({5}, r2));
    other.add("extra", uniform_init({1}, r2));
    CHECK_THROWS_AS(adam.step(other), std::invalid_argument);
  }
}

TEST_CASE("gradient clipping scales by the global norm and is idempotent") {
  ParamStore store;
  store.add("a", Tensor::from({6.0, 0.0}));
  store.add("b", Tensor::from({0.0, 8.0}));
  store.get("a").grad = Tensor::from({6.0, 0.0});
  store.get("b").grad = Tensor::from({0.0, 8.0});
  // global norm = 10
  double factor = clip_gradients(store, 5.0);
  CHECK(factor == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(store.grad_norm() == doctest::Approx(5.0).epsilon(1e-12));
  double again = clip_gradients(store, 5.0);
  CHECK(again == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(store.grad_norm() == doctest::Approx(5.0).epsilon(1e-9));

  store.get("a").grad = Tensor::from({3.0, 0.0});
  store.get("b").grad = Tensor::from({0.0, 0.0});
  CHECK(clip_gradients(store, 5.0) == 1.0);
  CHECK(store.get("a").grad[0] == 3.0);
}

TEST_CASE("mixed-shape clip keeps the post-clip norm within bounds") {
  ParamStore store;
  Rng rng(21);
  store.add("m", uniform_init({4, 3}, rng, -2.0, 2.0));
  store.add("v", uniform_init({7}, rng, -2.0, 2.0));
  store.add("s", uniform_init({1}, rng, -2.0, 2.0));
  for (auto& [name, p] : store) p.grad = p.value;
  clip_gradients(store, 0.75);
  CHECK(store.grad_norm() <= 0.75 + 1e-9);
}

TEST_CASE("forward+backward under a fixed seed is bit-identical") {
  auto run = [](std::uint64_t seed) {
    ParamStore store(seed);
    Rng rng(seed);
    GruCell cell = GruCell::create(store, "g", 2, 4, rng);
    Tape t;
    Var h = t.leaf(Tensor::vec(4));
    Var x = t.leaf(uniform_init({2}, rng));
    Var out1 = cell.step(t, x, h);
    Var out2 = cell.step(t, x, out1);
    Var loss = t.dot(out2, out2);
    store.zero_grads();
    t.backward(loss);
    std::vector<double> grads;
    for (auto& [name, p] : store) {
      for (double g : p.grad.data()) grads.push_back(g);
    }
    return grads;
  };
  std::vector<double> a = run(1234), b = run(1234);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  namespace fs = std::filesystem;
  ParamStore store(77);
  Rng rng(13);
  store.add("emb.table", uniform_init({5, 3}, rng));
  store.add("out.bias", uniform_init({5}, rng, -1e8, 1e8));
  store.get("out.bias").value[0] = 0x1.fffffffffffffp+100;  // awkward exact value
  store.get("out.bias").value[1] = -0.0;

  fs::path path = fs::temp_directory_path() / "dirl_ckpt_test.ckpt";
  save_checkpoint(store, path);
  ParamStore loaded = load_checkpoint(path);
  CHECK(loaded.rng_seed() == 77);
  REQUIRE(loaded.size() == store.size());
  for (auto& [name, p] : store) {
    const Param& q = loaded.get(name);
    REQUIRE(q.value.same_shape(p.value));
    for (std::size_t i = 0; i < p.value.numel(); ++i) {
      CHECK(q.value[i] == p.value[i]);  // bitwise, via hexfloat text
    }
  }

  SUBCASE("load into an existing store validates layout") {
    ParamStore other(0);
    Rng r2(1);
    other.add("emb.table", uniform_init({5, 3}, r2));
    other.add("out.bias", uniform_init({5}, r2));
    load_checkpoint_into(other, path);
    CHECK(other.rng_seed() == 77);
    CHECK(other.get("emb.table").value[7] == store.get("emb.table").value[7]);

    ParamStore wrong(0);
    wrong.add("emb.table", Tensor::matrix(5, 3));
    CHECK_THROWS_AS(load_checkpoint_into(wrong, path), std::runtime_error);
  }
  fs::remove(path);
}
