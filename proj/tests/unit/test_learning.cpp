// Copyright 2026 The TensorSynth Authors. All rights reserved.
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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include <catch_amalgamated.hpp>

#include "tensorsynth/expression.hpp"
#include "tensorsynth/learning.hpp"
#include "test_support.hpp"

using namespace tsynth;
using namespace tsynth::testing;
using Catch::Approx;

namespace {

ValuePtr ok(Expected<ValuePtr> r) {
  REQUIRE(r);
  return r.take();
}

// greater(add(in1, squeeze(in2)), in3)
ValuePtr three_op_expression() {
  const auto in1 = input("[1, 2]", "in1");
  const auto in2 = input("[[3], [4]]", "in2");
  const auto in3 = input("[5, 5]", "in3");
  const auto sq = ok(apply("squeeze", {in2}));
  const auto sum = ok(apply("add", {in1, sq}));
  return ok(apply("greater", {sum, in3}));
}

Bindings bindings_of(const Value& e, const std::vector<ValuePtr>& extra) {
  Bindings b;
  for (const auto& name : referenced_inputs(e)) {
    for (const auto& x : extra)
      if (x->origin().label == name) b[name] = x;
  }
  return b;
}

bool close(double analytic, double numeric) {
  return std::abs(analytic - numeric) <= 1e-4 * std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

const std::vector<DatasetExample>& small_dataset() {
  static const std::vector<DatasetExample> data = [] {
    const auto reg = OperationRegistry::builtin();
    DatagenConfig cfg;
    cfg.seed = 3;
    cfg.runs = 4;
    cfg.max_explored = 4000;
    cfg.per_run_cap = 400;
    cfg.per_run_timeout_s = 60;
    return generate_dataset(*reg, reg->weights(), cfg);
  }();
  return data;
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& op : OperationRegistry::builtin()->ops()) out.push_back(op.name);
  return out;
}

}  // namespace

// Collapsing ----------------------------------------------------------------------

TEST_CASE("collapse examples", "[collapse]") {
  const auto e = three_op_expression();
  const auto variants = collapse_subtrees(e);
  std::vector<std::string> rendered;
  for (const auto& v : variants) rendered.push_back(render(*v.expression, RenderStyle::Functional));
  std::sort(rendered.begin(), rendered.end());
  CHECK(rendered == std::vector<std::string>{"greater(add(in1, new_input1), in3)", "greater(add(in1, squeeze(in2)), in3)",
                                             "greater(new_input1, in3)", "new_input1"});

  const auto single = ok(apply("add", {input("[1]", "in1"), input("[2]", "in2")}));
  const auto sv = collapse_subtrees(single);
  REQUIRE(sv.size() == 2);
  CHECK(std::count_if(sv.begin(), sv.end(), [](const auto& v) { return v.new_inputs.size() == 1; }) == 1);

  const auto leaf = input("[1, 2]", "in1");
  const auto lv = collapse_subtrees(leaf);
  REQUIRE(lv.size() == 1);
  CHECK(render(*lv[0].expression, RenderStyle::Functional) == "in1");
  CHECK(equal_exact(*lv[0].expression, *leaf));
  CHECK(lv[0].new_inputs.empty());

  CHECK_THROWS_AS(collapse_subtrees(e, 2), std::length_error);
}

TEST_CASE("collapse variants re-evaluate to the original value", "[collapse][property]") {
  const auto reg = OperationRegistry::builtin();
  SearchConfig cfg;
  cfg.max_explored = 3000;
  cfg.harvest = true;
  const auto t = task({{"in1", "[[1, 5], [3, 2]]"}, {"in2", "[0, 1]"}}, "0");
  const auto result = search(t, *reg, reg->weights(), cfg);
  std::size_t checked = 0;
  for (const auto& v : result.explored) {
    if (!v->history()) continue;
    std::vector<ValuePtr> originals;
    for (std::size_t i = 0; i < t.input_names.size(); ++i)
      originals.push_back(Value::input(t.examples[0].inputs[i], t.input_names[i], 8));
    for (const auto& var : collapse_subtrees(v)) {
      auto all = originals;
      all.insert(all.end(), var.new_inputs.begin(), var.new_inputs.end());
      const auto back = evaluate_expression(*var.expression, bindings_of(*var.expression, all));
      REQUIRE(back);
      REQUIRE(equal_exact(*back.value(), *v));
      ++checked;
    }
  }
  CHECK(checked > 3000);
}

// Example weights -------------------------------------------------------------------

TEST_CASE("example weight examples", "[weights]") {
  const std::map<std::string, std::size_t> counts = {{"a", 100}, {"b", 10}, {"c", 1}};
  CHECK(example_weight("c", Weighting::WMax, counts) == 100);
  CHECK(example_weight("c", Weighting::WMean, counts) == 37);
  CHECK(example_weight("a", Weighting::WMax, counts) == 1);
  CHECK(example_weight("b", Weighting::None, counts) == 1);
  CHECK(example_weight("b", Weighting::WMax, {{"a", 100000000}, {"b", 1}}) == 10000);
  CHECK_THROWS_AS(example_weight("z", Weighting::WMax, counts), UnknownOp);
}

// Losses ------------------------------------------------------------------------------

TEST_CASE("loss examples", "[loss]") {
  const std::vector<double> y = {1, 0, 1, 0};
  const std::vector<double> w(4, 1.0);
  for (double beta : {1.0, 2.0}) {
    CHECK(fbeta_loss(y, y, beta, w).loss == Approx(0).margin(1e-6));
    CHECK(fbeta_loss({0, 1, 0, 1}, y, beta, w).loss == Approx(1));
  }
  const auto deg = fbeta_loss({0, 0}, {0, 0}, 1, {1, 1});
  CHECK(deg.degenerate);
  CHECK(deg.loss == 0);

  // One false negative against one false positive of equal size.
  const auto fn = fbeta_loss({1, 0.5, 0}, {1, 1, 0}, 2, {1, 1, 1}).loss;
  const auto fp = fbeta_loss({1, 1, 0.5}, {1, 1, 0}, 2, {1, 1, 1}).loss;
  CHECK(fn > fp);
  const auto fn1 = fbeta_loss({1, 0.5, 0}, {1, 1, 0}, 1, {1, 1, 1}).loss;
  const auto fp1 = fbeta_loss({1, 1, 0.5}, {1, 1, 0}, 1, {1, 1, 1}).loss;
  CHECK(fn - fp > fn1 - fp1);  // beta 2 widens the gap between the two errors

  CHECK(cross_entropy_loss({0, 0}, {1, 0}, {1, 1}).loss == Approx(std::log(2.0)));
  CHECK(cross_entropy_loss({800, -800}, {1, 0}, {1, 1}).loss == Approx(0).margin(1e-12));
  CHECK(std::isfinite(cross_entropy_loss({-800}, {1}, {1}).loss));
}

TEST_CASE("loss bounds and weighting neutrality", "[loss][property]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<double> p(n), y(n), z(n);
    for (std::size_t j = 0; j < n; ++j) {
      p[j] = u(rng);
      y[j] = static_cast<double>(rng() % 2);
      z[j] = (u(rng) - 0.5) * 10;
    }
    const std::vector<double> ones(n, 1.0);
    for (double beta : {1.0, 2.0}) {
      const double l = fbeta_loss(p, y, beta, ones).loss;
      REQUIRE((l >= 0 && l <= 1));
      // Unweighted F_beta written out directly.
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t j = 0; j < n; ++j) {
        tp += p[j] * y[j];
        fp += p[j] * (1 - y[j]);
        fn += (1 - p[j]) * y[j];
      }
      const double b2 = beta * beta;
      CHECK(l == Approx(1 - (1 + b2) * tp / ((1 + b2) * tp + b2 * fn + fp + kFbetaEpsilon)).epsilon(1e-12));
    }
    double ce = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double s = 1 / (1 + std::exp(-z[j]));
      ce += -(y[j] * std::log(s) + (1 - y[j]) * std::log(1 - s));
    }
    const double got = cross_entropy_loss(z, y, ones).loss;
    CHECK(got >= 0);
    CHECK(got == Approx(ce / static_cast<double>(n)).epsilon(1e-9));
  }
}

TEST_CASE("loss gradients match finite differences", "[loss][gradient]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  const double h = 1e-6;
  for (int instance = 0; instance < 100; ++instance) {
    const std::size_t n = 2 + rng() % 12;
    std::vector<double> p(n), y(n), z(n), w(n);
    for (std::size_t j = 0; j < n; ++j) {
      p[j] = 0.02 + 0.96 * u(rng);
      y[j] = static_cast<double>(rng() % 2);
      z[j] = (u(rng) - 0.5) * 8;
      w[j] = y[j] ? 1 + 9 * u(rng) : 1;
    }
    for (double beta : {1.0, 2.0}) {
      const auto r = fbeta_loss(p, y, beta, w);
      for (std::size_t j = 0; j < n; ++j) {
        auto hi = p, lo = p;
        hi[j] += h;
        lo[j] -= h;
        const double num = (fbeta_loss(hi, y, beta, w).loss - fbeta_loss(lo, y, beta, w).loss) / (2 * h);
        INFO("beta " << beta << " instance " << instance << " j " << j);
        REQUIRE(close(r.grad[j], num));
      }
    }
    const auto r = cross_entropy_loss(z, y, w);
    for (std::size_t j = 0; j < n; ++j) {
      auto hi = z, lo = z;
      hi[j] += h;
      lo[j] -= h;
      const double num = (cross_entropy_loss(hi, y, w).loss - cross_entropy_loss(lo, y, w).loss) / (2 * h);
      INFO("ce instance " << instance << " j " << j);
      REQUIRE(close(r.grad[j], num));
    }
  }
}

// Dataset ------------------------------------------------------------------------------

TEST_CASE("generated dataset satisfies its invariants", "[dataset]") {
  const auto& data = small_dataset();
  const auto reg = OperationRegistry::builtin();
  REQUIRE(data.size() > 200);
  for (const auto& ex : data) {
    REQUIRE((ex.inputs.size() >= 1 && ex.inputs.size() <= 3));
    REQUIRE(ex.ops_used.size() >= 2);
    REQUIRE(std::holds_alternative<Tensor>(ex.output));
    Bindings b;
    for (std::size_t i = 0; i < ex.inputs.size(); ++i) {
      const std::string name = "in" + std::to_string(i + 1);
      b[name] = Value::input(ex.inputs[i], name, 8);
    }
    const auto back = evaluate_text(ex.program, *reg, b);
    INFO(ex.program);
    REQUIRE(back);
    REQUIRE(equal_exact(back.value()->payload(), ex.output));
    const auto ops = used_ops(*back.value());
    REQUIRE(std::set<std::string>(ops.begin(), ops.end()) == ex.ops_used);
    REQUIRE(example_sound(ex, *reg));
  }
}

TEST_CASE("dataset generation is deterministic and round-trips", "[dataset]") {
  const auto reg = OperationRegistry::builtin();
  DatagenConfig cfg;
  cfg.seed = 3;
  cfg.runs = 4;
  cfg.max_explored = 4000;
  cfg.per_run_cap = 400;
  cfg.per_run_timeout_s = 60;
  const auto again = generate_dataset(*reg, reg->weights(), cfg);
  const auto& data = small_dataset();
  REQUIRE(again.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) REQUIRE(again[i].to_json() == data[i].to_json());

  const auto path = (std::filesystem::temp_directory_path() / "tsynth_dataset_test.jsonl").string();
  save_dataset(data, path);
  const auto loaded = load_dataset(path);
  std::filesystem::remove(path);
  REQUIRE(loaded.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) REQUIRE(loaded[i].to_json() == data[i].to_json());
}

// Training -------------------------------------------------------------------------------

TEST_CASE("training lowers the loss and is deterministic", "[train]") {
  const auto& data = small_dataset();
  const auto names = builtin_names();
  for (LossKind kind : {LossKind::CrossEntropy, LossKind::F1, LossKind::F2}) {
    TrainConfig cfg;
    cfg.loss = kind;
    cfg.weighting = kind == LossKind::CrossEntropy ? Weighting::None : Weighting::WMax;
    cfg.epochs = 6;
    cfg.eval_percent = 10;
    TrainReport rep;
    const auto params = train_tensor_model(data, names, cfg, &rep);
    INFO(loss_kind_name(kind));
    REQUIRE(rep.epochs.size() == 7);  // epoch 0 plus six
    CHECK(rep.epochs.front().train_loss == Approx(rep.zero_train_loss));
    CHECK(rep.epochs.back().train_loss < rep.zero_train_loss);
    // Averages over windows of three epochs do not increase.
    double prev = 1e300;
    for (std::size_t e = 0; e + 3 <= rep.epochs.size(); e += 3) {
      const double avg = (rep.epochs[e].train_loss + rep.epochs[e + 1].train_loss + rep.epochs[e + 2].train_loss) / 3;
      CHECK(avg <= prev);
      prev = avg;
    }
    CHECK(rep.train_examples + rep.eval_examples == data.size());

    const auto twice = train_tensor_model(data, names, cfg);
    CHECK(twice.to_json().dump() == params.to_json().dump());
  }
  CHECK_THROWS_AS(train_tensor_model({}, names, TrainConfig{}), EmptyDataset);
}

TEST_CASE("hidden-layer training runs", "[train]") {
  TrainConfig cfg;
  cfg.hidden_dim = 16;
  cfg.epochs = 3;
  TrainReport rep;
  const auto params = train_tensor_model(small_dataset(), builtin_names(), cfg, &rep);
  CHECK(params.hidden_dim == 16);
  CHECK(rep.epochs.back().train_loss < rep.zero_train_loss);
  CHECK(rep.csv().find("epoch") == 0);
}
