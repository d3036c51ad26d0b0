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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "tensorsynth/expression.hpp"
#include "test_support.hpp"

using namespace tsynth;
using namespace tsynth::testing;

TEST_CASE("broadcast examples", "[value][broadcast]") {
  CHECK(broadcast_shapes(Shape{2, 3}, Shape{3}) == Shape{2, 3});
  CHECK(broadcast_shapes(Shape{5}, Shape{5}) == Shape{5});
  CHECK_THROWS_AS(broadcast_shapes(Shape{2, 3}, Shape{4}), IncompatibleShapes);
  CHECK(broadcast_shapes(Shape{}, Shape{4, 1}) == Shape{4, 1});
  CHECK(broadcast_shapes(Shape{4, 1}, Shape{1, 3}) == Shape{4, 3});
  CHECK(broadcast_shapes(Shape{0}, Shape{1}) == Shape{0});
}

TEST_CASE("broadcasting is commutative in result shape", "[value][broadcast][property]") {
  std::mt19937_64 rng(11);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int compatible = 0;
  for (int i = 0; i < 20000; ++i) {
    Shape a, b;
    for (int r = pick(0, 4); r > 0; --r) a.push_back(pick(0, 3));
    for (int r = pick(0, 4); r > 0; --r) b.push_back(pick(0, 3));
    Shape ab, ba;
    const bool ok1 = try_broadcast_shapes(a, b, ab);
    const bool ok2 = try_broadcast_shapes(b, a, ba);
    REQUIRE(ok1 == ok2);
    if (ok1) {
      ++compatible;
      CHECK(ab == ba);
      // Independent check of the rule: aligned dims are equal or one is 1.
      const int rank = std::max(a.rank(), b.rank());
      REQUIRE(ab.rank() == rank);
      for (int k = 0; k < rank; ++k) {
        const int ia = a.rank() - rank + k, ib = b.rank() - rank + k;
        const std::int64_t da = ia >= 0 ? a[ia] : 1, db = ib >= 0 ? b[ib] : 1;
        CHECK((da == db || da == 1 || db == 1));
        CHECK(ab[k] == (da == 1 ? db : da));
      }
    }
  }
  CHECK(compatible > 1000);
}

TEST_CASE("equal_exact examples", "[value][equality]") {
  CHECK(equal_exact(payload("[1,2]"), payload("[1,2]")));
  CHECK_FALSE(equal_exact(payload("[1,2]"), payload(R"({"dtype":"i64","data":[1,2]})")));
  CHECK_FALSE(equal_exact(Payload{PrimitiveInt{1}}, payload("1")));
  CHECK_FALSE(equal_exact(payload("[[1,2]]"), payload("[1,2]")));
  CHECK(equal_exact(payload(R"(["nan", 0.0])"), payload(R"(["nan", -0.0])")));
  CHECK_FALSE(equal_exact(payload("[1.0]"), payload("[1.00001]")));
}

TEST_CASE("equal_output examples", "[value][equality]") {
  const ToleranceConfig tol{1e-4, 1e-8};
  CHECK(equal_output(Payload{Tensor::from<float>(Shape{2}, {1.0f, 2.0f})},
                     Payload{Tensor::from<float>(Shape{2}, {1.0f, 2.0f + 1e-9f})}, tol));
  CHECK_FALSE(equal_output(payload("[1,2]"), payload(R"({"dtype":"i64","data":[1,2]})"), tol));
  CHECK(equal_output(payload("[0,1,2,3,0,1,1,3]"), payload("[0,1,2,3,0,1,1,3]"), tol));
  CHECK(equal_output(payload("[8.2]"), payload("[8.2001]"), tol));
  CHECK_FALSE(equal_output(payload("[8.2]"), payload("[8.21]"), tol));
  CHECK_FALSE(equal_output(payload("[1, 2]"), payload("[1, 3]"), tol));
}

TEST_CASE("within_limits examples", "[value][limits]") {
  CHECK(within_limits(Payload{Tensor::zeros(DType::I32, Shape{10, 10, 10})}));
  CHECK_FALSE(within_limits(Payload{Tensor::zeros(DType::I32, Shape{101})}));
  CHECK_FALSE(within_limits(Payload{Tensor::zeros(DType::I32, Shape{1, 1, 1, 1, 1})}));
  CHECK_FALSE(within_limits(Payload{Tensor::zeros(DType::F32, Shape{11, 10, 10})}));
  Tuple five;
  for (int i = 0; i < 5; ++i) five.items.push_back(prim("1"));
  CHECK_FALSE(within_limits(Payload{five}));
  const std::vector<std::int64_t> dims = {2, 501};
  CHECK_FALSE(shape_within_limits(dims));
}

TEST_CASE("within_limits is monotone under slicing", "[value][limits][property]") {
  std::mt19937_64 rng(3);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int i = 0; i < 2000; ++i) {
    Shape s;
    for (int r = pick(1, 4); r > 0; --r) s.push_back(pick(1, 12));
    if (!within_limits(Payload{Tensor::zeros(DType::I32, s)})) continue;
    const int axis = pick(0, s.rank() - 1);
    const int begin = pick(0, static_cast<int>(s[axis]) - 1);
    const int end = pick(begin, static_cast<int>(s[axis]));
    Shape sliced = s;
    sliced.set(axis, end - begin);
    CHECK(within_limits(Payload{Tensor::zeros(DType::I32, sliced)}));
  }
}

TEST_CASE("fingerprints agree on equal values", "[value][fingerprint][property]") {
  std::mt19937_64 rng(5);
  // A small space so that equal pairs occur often.
  auto small = [&]() {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const DType dt = kAllDTypes[static_cast<std::size_t>(pick(0, 3))];
    Shape s;
    for (int r = pick(0, 2); r > 0; --r) s.push_back(pick(1, 2));
    Tensor t = Tensor::zeros(dt, s);
    dispatch_dtype(dt, [&](auto tag) {
      using T = typename decltype(tag)::type;
      for (auto& x : t.mutable_data<T>()) {
        if constexpr (std::is_same_v<T, float>) {
          const int k = pick(0, 4);
          x = k == 0 ? -0.0f : k == 1 ? std::numeric_limits<float>::quiet_NaN() : k == 2 ? -std::nanf("7") : static_cast<float>(k);
        } else {
          x = static_cast<T>(pick(0, 1));
        }
      }
    });
    return Payload{std::move(t)};
  };
  int equal_pairs = 0;
  for (int i = 0; i < 50000; ++i) {
    const Payload a = small(), b = small();
    if (equal_exact(a, b)) {
      ++equal_pairs;
      CHECK(fingerprint(a) == fingerprint(b));
    }
  }
  CHECK(equal_pairs > 500);

  // Random values of every kind against a literal round-trip copy.
  for (int i = 0; i < 20000; ++i) {
    const ValuePtr v = random_value(rng);
    const Payload copy = parse_literal(to_literal(v->payload()), BareScalars::AsPrimitives);
    REQUIRE(equal_exact(v->payload(), copy));
    CHECK(fingerprint(v->payload()) == fingerprint(copy));
  }
}

TEST_CASE("primitive and rank-0 tensor are distinct values", "[value]") {
  const Payload a = PrimitiveInt{3};
  const Payload b = payload("3");
  CHECK_FALSE(equal_exact(a, b));
  CHECK(fingerprint(a) != fingerprint(b));
}

TEST_CASE("weight examples", "[value][weight]") {
  const auto reg = OperationRegistry::builtin();
  const auto in1 = Value::input(payload("[[1,2],[3,4]]"), "in1", 8);
  const auto zero = Value::leaf(PrimitiveInt{0}, Origin{OriginKind::HeuristicConstant, "axis"}, 8);
  CHECK(expression_weight(*in1) == 8);
  const std::vector<ValuePtr> args = {in1, zero};
  const auto e = apply_operation(reg->at("expand_dims"), args, 18);
  REQUIRE(e.ok());
  CHECK(e.value()->weight() == 34);
  CHECK(expression_weight(*e.value()) == 34);
  const auto am = apply_operation(reg->at("argmax_2"), args, 36);
  REQUIRE(am.ok());
  CHECK(am.value()->weight() == 52);
  const std::vector<ValuePtr> nested = {e.value(), zero};
  const auto e2 = apply_operation(reg->at("expand_dims"), nested, 18);
  REQUIRE(e2.ok());
  CHECK(expression_weight(*e2.value()) == 34 + 8 + 18);
  CHECK(operation_count(*e2.value()) == 2);
}

TEST_CASE("render examples", "[value][render]") {
  const auto reg = OperationRegistry::builtin();
  const auto in1 = Value::input(payload("[[1,2,3,4,5,6]]"), "in1", 8);
  const auto zero = Value::leaf(PrimitiveInt{0}, Origin{OriginKind::HeuristicConstant, "axis"}, 8);
  const auto five = Value::leaf(PrimitiveInt{5}, Origin{OriginKind::UserConstant, ""}, 7);
  const std::vector<ValuePtr> a1 = {in1, zero};
  const auto e = apply_operation(reg->at("expand_dims"), a1).value();
  CHECK(render(*e, RenderStyle::Pythonic) == "tf.expand_dims(in1, axis=0)");
  CHECK(render(*e, RenderStyle::Functional) == "expand_dims(in1, 0)");
  CHECK(render(*in1, RenderStyle::Pythonic) == "in1");
  const auto t = Value::input(payload("[[1,2,3,4,5,6]]"), "t", 8);
  const std::vector<ValuePtr> a2 = {t, zero, five};
  const auto s = apply_operation(reg->at("slicing_axis1_both"), a2).value();
  CHECK(render(*s, RenderStyle::Pythonic) == "t[:, 0:5]");
  CHECK(render(*lit("[1.5, 2]"), RenderStyle::Pythonic) == "tf.constant([1.5, 2.0], dtype=tf.float32)");
  CHECK(render(*prim("[1, 2]"), RenderStyle::Functional) == "tensor(i32, [2], [1, 2])");
  CHECK(render_payload(DTypeLiteral{DType::I64}, RenderStyle::Pythonic) == "tf.int64");
}

TEST_CASE("render round-trip over random derived values", "[value][render][property]") {
  const auto reg = OperationRegistry::builtin();
  std::mt19937_64 rng(17);
  int derived = 0;
  for (int i = 0; i < 3000; ++i) {
    // Inputs bound by name plus random constants, combined up to depth 2.
    Bindings bindings;
    std::vector<ValuePtr> pool;
    for (int k = 1; k <= 2; ++k) {
      const std::string name = "in" + std::to_string(k);
      auto v = Value::input(random_tensor(rng), name, 8);
      bindings[name] = v;
      pool.push_back(v);
    }
    for (int k = 0; k < 4; ++k) pool.push_back(random_value(rng));
    for (int depth = 0; depth < 2; ++depth) {
      const auto& op = (*reg)[rng() % reg->size()];
      for (int attempt = 0; attempt < 30; ++attempt) {
        std::vector<ValuePtr> args;
        for (int a = 0; a < op.arity; ++a) args.push_back(pool[rng() % pool.size()]);
        const auto r = apply_operation(op, args);
        if (!r.ok()) continue;
        pool.push_back(r.value());
        ++derived;
        const std::string text = render(*r.value(), RenderStyle::Functional);
        INFO(text);
        const auto back = evaluate_text(text, *reg, bindings);
        REQUIRE(back.ok());
        CHECK(equal_exact(back.value()->payload(), r.value()->payload()));
        const auto re = evaluate_expression(*r.value(), bindings);
        REQUIRE(re.ok());
        CHECK(equal_exact(re.value()->payload(), r.value()->payload()));
        break;
      }
    }
  }
  CHECK(derived > 1000);
}

TEST_CASE("literal parsing", "[value][literal]") {
  CHECK(std::get<Tensor>(payload("[1, 2]")).dtype() == DType::I32);
  CHECK(std::get<Tensor>(payload("[1.5, 2]")).dtype() == DType::F32);
  CHECK(std::get<Tensor>(payload("[true]")).dtype() == DType::Bool);
  CHECK(std::get<Tensor>(payload(R"({"dtype":"int64","data":[1]})")).dtype() == DType::I64);
  CHECK(std::get<Tensor>(payload(R"({"dtype":"i32","shape":[2,0],"data":[]})")).shape() == Shape{2, 0});
  CHECK_THROWS_AS(payload("[[1, 2], [3]]"), LiteralError);
  CHECK_THROWS_AS(payload("[1, true]"), LiteralError);
  CHECK_THROWS_AS(payload(R"({"dtype":"i32","data":[1.5]})"), LiteralError);
  CHECK_THROWS_AS(payload(R"({"dtype":"i32","data":[3000000000]})"), LiteralError);
  CHECK_THROWS_AS(payload(R"({"dtype":"f64","data":[1]})"), LiteralError);
  CHECK(std::holds_alternative<PrimitiveInt>(parse_literal_text("3", BareScalars::AsPrimitives)));
  CHECK(std::holds_alternative<DTypeLiteral>(parse_literal_text("\"tf.bool\"", BareScalars::AsPrimitives)));
}
