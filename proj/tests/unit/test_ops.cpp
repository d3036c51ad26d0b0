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

#include <map>
#include <random>
#include <set>

#include "tensorsynth/expression.hpp"
#include "test_support.hpp"

using namespace tsynth;
using namespace tsynth::testing;
using nlohmann::json;

namespace {

struct Golden {
  std::string op;
  std::vector<ValuePtr> args;
  json out;
};

const std::vector<Golden>& golden() {
  static const std::vector<Golden> g = [] {
    std::vector<Golden> v;
    for (const auto& rec : read_jsonl(data_path("golden_ops.jsonl"))) {
      Golden x;
      x.op = rec.at("op").get<std::string>();
      for (const auto& a : rec.at("args"))
        x.args.push_back(Value::leaf(parse_literal(a, BareScalars::AsPrimitives), Origin{OriginKind::UserConstant, ""}, 1));
      x.out = rec.at("out");
      v.push_back(std::move(x));
    }
    return v;
  }();
  return g;
}

std::string describe(const Golden& g) {
  std::string s = g.op + "(";
  for (std::size_t i = 0; i < g.args.size(); ++i) s += (i ? ", " : "") + render(*g.args[i], RenderStyle::Functional);
  return s + ")";
}

bool filters_pass(const OperationSpec& op, const std::vector<ValuePtr>& args) {
  for (int i = 0; i < op.arity; ++i)
    if (!arg_filter_pass(op, i + 1, *args[static_cast<std::size_t>(i)])) return false;
  return combination_filter_pass(op, args);
}

}  // namespace

TEST_CASE("golden vectors cover every operation at least five times", "[ops][golden]") {
  std::map<std::string, int> count;
  for (const auto& g : golden()) ++count[g.op];
  for (const auto& op : OperationRegistry::builtin()->ops()) {
    INFO(op.name);
    CHECK(count[op.name] >= 5);
  }
}

TEST_CASE("operations match golden vectors", "[ops][golden]") {
  const auto reg = OperationRegistry::builtin();
  int checked = 0;
  for (const auto& g : golden()) {
    INFO(describe(g) + " expected " + g.out.dump());
    const auto r = apply_operation(reg->at(g.op), g.args);
    if (g.out.contains("error")) {
      REQUIRE_FALSE(r.ok());
      CHECK(std::string(op_error_kind_name(r.error().kind)) == g.out.at("error").get<std::string>());
    } else {
      if (!r.ok()) {
        FAIL_CHECK("unexpected error: " << r.error().detail);
        continue;
      }
      const Payload want = parse_literal(g.out, BareScalars::AsPrimitives);
      INFO("got " + to_literal(r.value()->payload()).dump());
      CHECK(equal_exact(r.value()->payload(), want));
    }
    ++checked;
  }
  CHECK(checked >= 5 * static_cast<int>(reg->size()));
}

TEST_CASE("golden argument lists pass the filters of their operation", "[ops][golden]") {
  const auto reg = OperationRegistry::builtin();
  for (const auto& g : golden()) {
    if (g.out.contains("error")) continue;
    INFO(describe(g));
    CHECK(filters_pass(reg->at(g.op), g.args));
  }
}

TEST_CASE("registry examples", "[ops]") {
  CHECK(equal_exact(apply("unique_with_counts_index", {lit("[45,58,72,33,45,58,58,33]")}).value()->payload(),
                    payload("[0,1,2,3,0,1,1,3]")));
  CHECK(equal_exact(apply("bincount", {lit("[0,0,0,1,3,3]")}).value()->payload(), payload("[3,1,0,2]")));
  CHECK(equal_exact(apply("sequence_mask", {lit("[3,4,1]")}).value()->payload(),
                    payload("[[true,true,true,false],[true,true,true,true],[true,false,false,false]]")));

  const auto range = apply("range_3", {prim("1"), prim("20"), prim("1")});
  REQUIRE(range.ok());
  const auto ones = apply("ones", {range.value()});
  REQUIRE_FALSE(ones.ok());
  CHECK(ones.error().kind == OpErrorKind::LimitExceeded);
}

TEST_CASE("shipped weight anchors", "[ops]") {
  const auto reg = OperationRegistry::builtin();
  CHECK(reg->at("expand_dims").base_weight == 18);
  CHECK(reg->at("argmax_2").base_weight == 36);
  CHECK(reg->at("reverse").base_weight > reg->at("expand_dims").base_weight);
  for (const auto& op : reg->ops()) CHECK(op.base_weight > 0);
}

TEST_CASE("weight table parsing", "[ops]") {
  const auto t = WeightTable::parse("# comment\nadd = 14\n\n  sort=18  # trailing\n");
  CHECK(t.at("add") == 14);
  CHECK(t.at("sort") == 18);
  CHECK_THROWS_AS(t.at("nope"), MissingWeight);
  CHECK_THROWS_AS(WeightTable::parse("add 14\n"), std::invalid_argument);
  CHECK_THROWS_AS(WeightTable::parse("add = 0\n"), std::invalid_argument);
  CHECK(WeightTable::parse(WeightTable::builtin().serialize()) == WeightTable::builtin());

  WeightTable missing = WeightTable::builtin();
  missing.erase("add");
  CHECK_THROWS_AS(OperationRegistry::build(missing), MissingWeight);
}

TEST_CASE("argument filter examples", "[ops][filters]") {
  const auto& argmax = OperationRegistry::builtin()->at("argmax_2");
  CHECK_FALSE(arg_filter_pass(argmax, 1, *lit("[true, false]")));
  CHECK(arg_filter_pass(argmax, 1, *lit("[1, 2]")));
  CHECK_FALSE(arg_filter_pass(argmax, 2, *prim("-5")));
  CHECK(arg_filter_pass(argmax, 2, *prim("0")));
  CHECK_FALSE(arg_filter_pass(argmax, 2, *prim("\"i32\"")));
  CHECK_FALSE(arg_filter_pass(argmax, 2, *prim("\"bool\"")));
}

TEST_CASE("combination filter examples", "[ops][filters]") {
  const auto reg = OperationRegistry::builtin();
  const auto m = lit("[[1,2,3],[4,5,6]]");
  CHECK_FALSE(combination_filter_pass(reg->at("argmax_2"), std::vector{m, prim("2")}));
  CHECK(combination_filter_pass(reg->at("argmax_2"), std::vector{m, prim("1")}));
  CHECK_FALSE(combination_filter_pass(reg->at("add"), std::vector{m, lit("[1,2,3,4]")}));
  CHECK(combination_filter_pass(reg->at("add"), std::vector{m, lit("[1,2,3]")}));
}

TEST_CASE("docstrings", "[ops]") {
  const auto reg = OperationRegistry::builtin();
  const std::string& d = docstring(*reg, "argsort_stable");
  CHECK(d.find("sort") != std::string::npos);
  CHECK(d.find("indices") != std::string::npos);
  CHECK_THROWS_AS(docstring(*reg, "no_such_op"), UnknownOp);
  for (const auto& op : reg->ops()) CHECK_FALSE(docstring(*reg, op.name).empty());
}

TEST_CASE("registry subset keeps order and rejects unknown names", "[ops]") {
  const auto reg = OperationRegistry::builtin();
  const std::vector<std::string> names = {"sort", "add"};
  const auto sub = reg->subset(names);
  REQUIRE(sub->size() == 2);
  CHECK(sub->ops()[0].name == "add");
  CHECK(sub->ops()[1].name == "sort");
  const std::vector<std::string> bad = {"add", "bogus"};
  CHECK_THROWS_AS(reg->subset(bad), UnknownOp);
}

TEST_CASE("integer overflow is a numeric error, never wraparound", "[ops]") {
  const auto r = apply("add", {lit("{\"dtype\":\"i32\",\"data\":[2147483647]}"), lit("[1]")});
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().kind == OpErrorKind::NumericError);
  const auto s = apply("reduce_sum", {lit("{\"dtype\":\"i32\",\"data\":[2147483647, 2147483647]}")});
  REQUIRE_FALSE(s.ok());
  CHECK(s.error().kind == OpErrorKind::NumericError);
}

// Sampled argument lists: fully random ones plus golden lists with one
// argument replaced, which land close to the filter boundaries.
namespace {

std::vector<ValuePtr> sample_args(const OperationSpec& op, const std::vector<const Golden*>& seeds,
                                  std::mt19937_64& rng) {
  std::vector<ValuePtr> args;
  if (!seeds.empty() && rng() % 2 == 0) {
    args = seeds[rng() % seeds.size()]->args;
    args[rng() % args.size()] = random_value(rng);
    if (rng() % 4 == 0) args[rng() % args.size()] = random_value(rng);
  } else {
    for (int i = 0; i < op.arity; ++i) args.push_back(random_value(rng));
  }
  return args;
}

}  // namespace

TEST_CASE("filters never reject a valid argument list", "[ops][filters][fuzz]") {
  const auto reg = OperationRegistry::builtin();
  std::map<std::string, std::vector<const Golden*>> seeds;
  for (const auto& g : golden())
    if (!g.out.contains("error")) seeds[g.op].push_back(&g);

  std::mt19937_64 rng(20260501);
  constexpr int kSamples = 6000;
  for (const auto& op : reg->ops()) {
    int rejected = 0;
    int counterexamples = 0;
    std::string first_bad;
    for (int s = 0; s < kSamples; ++s) {
      const auto args = sample_args(op, seeds[op.name], rng);
      if (filters_pass(op, args)) continue;
      ++rejected;
      const auto r = apply_operation(op, args);
      if (r.ok()) {
        if (counterexamples++ == 0) {
          first_bad = op.name + "(";
          for (std::size_t i = 0; i < args.size(); ++i)
            first_bad += (i ? ", " : "") + to_literal(args[i]->payload()).dump();
          first_bad += ")";
        }
      }
    }
    INFO(op.name << ": " << counterexamples << " of " << rejected << " rejected lists succeeded, e.g. " << first_bad);
    CHECK(rejected > 100);
    CHECK(counterexamples == 0);
  }
}

TEST_CASE("executors are deterministic and pure; every argument list renders", "[ops][fuzz]") {
  const auto reg = OperationRegistry::builtin();
  std::map<std::string, std::vector<const Golden*>> seeds;
  for (const auto& g : golden())
    if (!g.out.contains("error")) seeds[g.op].push_back(&g);

  std::mt19937_64 rng(7);
  for (const auto& op : reg->ops()) {
    int successes = 0;
    for (int s = 0; s < 1500; ++s) {
      auto args = sample_args(op, seeds[op.name], rng);
      if (s % 3 == 0 && !seeds[op.name].empty()) args = seeds[op.name][static_cast<std::size_t>(s) % seeds[op.name].size()]->args;
      std::vector<Fingerprint> before;
      for (const auto& a : args) before.push_back(fingerprint(a->payload()));
      std::vector<Payload> copies;
      for (const auto& a : args) copies.push_back(a->payload());

      const bool pass = filters_pass(op, args);
      const auto r1 = apply_operation(op, args);
      const auto r2 = apply_operation(op, args);
      REQUIRE(r1.ok() == r2.ok());
      if (r1.ok()) {
        ++successes;
        INFO(op.name);
        CHECK(equal_exact(r1.value()->payload(), r2.value()->payload()));
        CHECK(within_limits(r1.value()->payload()));
        CHECK(r1.value()->weight() == op.base_weight + static_cast<int>(args.size()));
      } else {
        CHECK(r1.error().kind == r2.error().kind);
      }
      (void)pass;
      for (std::size_t i = 0; i < args.size(); ++i) {
        CHECK(fingerprint(args[i]->payload()) == before[i]);
        CHECK(equal_exact(args[i]->payload(), copies[i]));
      }

      const auto shell = Value::derived(PrimitiveInt{0}, op, args, op.base_weight);
      const std::string py = render(*shell, RenderStyle::Pythonic);
      const std::string fn = render(*shell, RenderStyle::Functional);
      CHECK_FALSE(py.empty());
      CHECK(fn.rfind(op.name + "(", 0) == 0);
      CHECK(py.find("{0}") == std::string::npos);
      CHECK(py.find("{1}") == std::string::npos);
    }
    INFO(op.name);
    CHECK(successes > 0);
  }
}

TEST_CASE("functional rendering of successful applications evaluates back", "[ops][render]") {
  const auto reg = OperationRegistry::builtin();
  for (const auto& g : golden()) {
    if (g.out.contains("error")) continue;
    const auto r = apply_operation(reg->at(g.op), g.args);
    REQUIRE(r.ok());
    const std::string text = render(*r.value(), RenderStyle::Functional);
    INFO(text);
    const auto back = evaluate_text(text, *reg, {});
    REQUIRE(back.ok());
    CHECK(equal_exact(back.value()->payload(), r.value()->payload()));
  }
}
