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

// Independent brute-force enumerator used to check search completeness.
// It builds every expression over a frozen 6-op registry up to a weight
// bound with no filters and no deduplication, and records the lightest
// weight per distinct value. Leaves are written out here rather than taken
// from collect_initial_values.

#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "tensorsynth/literal.hpp"
#include "tensorsynth/search.hpp"

namespace tsynth::oracle {

inline constexpr int kMaxWeight = 60;

struct MiniSetup {
  std::shared_ptr<const OperationRegistry> registry;
  WeightTable weights;
};

/// Light op weights make the space deep enough to be interesting at 60.
inline MiniSetup mini_setup() {
  MiniSetup s;
  const std::vector<std::pair<std::string, int>> table = {{"add", 6},         {"multiply", 7},    {"abs", 4},
                                                           {"reduce_sum_axis", 5}, {"expand_dims", 5}, {"transpose", 4}};
  std::vector<std::string> names;
  for (const auto& [n, w] : table) {
    names.push_back(n);
    s.weights.set(n, w);
  }
  s.registry = OperationRegistry::builtin()->subset(names);
  return s;
}

/// Single-input task with a rank-0 float sentinel output. A rank-0 output
/// contributes no dimension or shape leaves.
inline TaskSpec mini_task(const Tensor& in1) {
  TaskSpec t;
  t.input_names = {"in1"};
  t.examples.push_back({{Payload{in1}}, Payload{Tensor::from<float>(Shape{}, {0.123f})}});
  return t;
}

/// Random integer input: rank 1 or 2, dims 1..3, values in [-3, 5].
inline Tensor random_mini_input(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Shape s;
  for (int r = pick(1, 2); r > 0; --r) s.push_back(pick(1, 3));
  std::vector<std::int32_t> data(static_cast<std::size_t>(s.num_elements()));
  for (auto& x : data) x = pick(-3, 5);
  return Tensor::from(s, std::move(data));
}

/// Input (8), always-chosen constants (8), axis naturals below the input
/// rank (8), input dimension lengths (12). Duplicates are kept on purpose.
inline std::vector<std::pair<ValuePtr, int>> mini_leaves(const Tensor& in1) {
  const Origin c{OriginKind::UserConstant, ""};
  std::vector<std::pair<ValuePtr, int>> leaves = {{Value::input(in1, "in1", 8), 8}};
  for (std::int64_t v : {0, 1, -1}) leaves.emplace_back(Value::leaf(PrimitiveInt{v}, c, 8), 8);
  for (bool b : {true, false}) leaves.emplace_back(Value::leaf(PrimitiveBool{b}, c, 8), 8);
  for (DType dt : kAllDTypes) leaves.emplace_back(Value::leaf(DTypeLiteral{dt}, c, 8), 8);
  for (int a = 0; a < in1.rank(); ++a) leaves.emplace_back(Value::leaf(PrimitiveInt{a}, c, 8), 8);
  for (int d = 0; d < in1.rank(); ++d) leaves.emplace_back(Value::leaf(PrimitiveInt{in1.shape()[d]}, c, 12), 12);
  return leaves;
}

struct OracleValue {
  Payload payload;
  int min_weight;
};

inline std::vector<OracleValue> brute_force(const OperationRegistry& reg, const WeightTable& weights,
                                            const std::vector<std::pair<ValuePtr, int>>& leaves, int max_weight,
                                            std::size_t& expressions) {
  std::vector<std::vector<ValuePtr>> by_weight(static_cast<std::size_t>(max_weight) + 1);
  for (const auto& [v, w] : leaves) by_weight[static_cast<std::size_t>(w)].push_back(v);
  expressions = leaves.size();
  for (int W = 1; W <= max_weight; ++W) {
    for (const auto& op : reg.ops()) {
      const int rem = W - weights.at(op.name);
      if (rem < op.arity) continue;
      for (const auto& parts : compositions(rem, op.arity)) {
        std::vector<const std::vector<ValuePtr>*> pools;
        bool empty = false;
        for (int p : parts) {
          pools.push_back(&by_weight[static_cast<std::size_t>(p)]);
          empty = empty || pools.back()->empty();
        }
        if (empty) continue;
        // Odometer over every argument list.
        std::vector<std::size_t> idx(parts.size(), 0);
        while (true) {
          std::vector<ValuePtr> args;
          for (std::size_t k = 0; k < idx.size(); ++k) args.push_back((*pools[k])[idx[k]]);
          auto r = op.executor(args);
          if (r.ok() && within_limits(r.value())) {
            by_weight[static_cast<std::size_t>(W)].push_back(
                Value::leaf(r.take(), Origin{OriginKind::UserConstant, ""}, W));
            ++expressions;
          }
          std::size_t k = 0;
          while (k < idx.size() && ++idx[k] == pools[k]->size()) idx[k++] = 0;
          if (k == idx.size()) break;
        }
      }
    }
  }
  std::vector<OracleValue> distinct;
  std::multimap<Fingerprint, std::size_t> index;
  for (int W = 1; W <= max_weight; ++W)
    for (const auto& v : by_weight[static_cast<std::size_t>(W)]) {
      const Fingerprint fp = fingerprint(v->payload());
      bool seen = false;
      for (auto [it, end] = index.equal_range(fp); it != end && !seen; ++it)
        seen = equal_exact(distinct[it->second].payload, v->payload());
      if (seen) continue;
      index.emplace(fp, distinct.size());
      distinct.push_back({v->payload(), W});
    }
  return distinct;
}

struct Comparison {
  std::size_t expressions = 0;
  std::size_t oracle_values = 0;
  std::size_t search_values = 0;
  std::size_t missing = 0;        // oracle values the search never built
  std::size_t extra = 0;          // search values the oracle never built
  std::size_t weight_mismatch = 0;
  std::size_t targets = 0;        // solve runs on rank-0 targets
  std::size_t target_mismatch = 0;
  std::string first_problem;

  bool ok() const { return missing == 0 && extra == 0 && weight_mismatch == 0 && target_mismatch == 0; }
};

/// Runs the oracle and the search on one input and compares reachable values,
/// their minimal weights, and the solution weight for every rank-0 target.
inline Comparison compare_with_search(const Tensor& in1) {
  const MiniSetup setup = mini_setup();
  const TaskSpec task = mini_task(in1);
  Comparison c;
  const auto oracle = brute_force(*setup.registry, setup.weights, mini_leaves(in1), kMaxWeight, c.expressions);
  c.oracle_values = oracle.size();

  SearchConfig cfg;
  cfg.timeout_s = 600;
  cfg.harvest = true;
  cfg.max_weight = kMaxWeight;
  cfg.require_all_inputs = false;
  const auto r = search(task, *setup.registry, setup.weights, cfg);
  c.search_values = r.explored.size();

  std::multimap<Fingerprint, std::size_t> index;
  for (std::size_t i = 0; i < r.explored.size(); ++i) index.emplace(fingerprint(r.explored[i]->payload()), i);
  std::vector<bool> matched(r.explored.size(), false);
  auto note = [&](const std::string& what, const Payload& p) {
    if (c.first_problem.empty()) c.first_problem = what + " " + to_literal(p).dump();
  };
  for (const auto& o : oracle) {
    const ValuePtr* hit = nullptr;
    for (auto [it, end] = index.equal_range(fingerprint(o.payload)); it != end; ++it)
      if (equal_exact(r.explored[it->second]->payload(), o.payload)) {
        hit = &r.explored[it->second];
        matched[it->second] = true;
      }
    if (!hit) {
      ++c.missing;
      note("missing", o.payload);
    } else if ((*hit)->weight() != o.min_weight) {
      ++c.weight_mismatch;
      note("weight " + std::to_string((*hit)->weight()) + " vs " + std::to_string(o.min_weight), o.payload);
    }
  }
  for (std::size_t i = 0; i < matched.size(); ++i)
    if (!matched[i]) {
      ++c.extra;
      note("extra", r.explored[i]->payload());
    }

  for (const auto& o : oracle) {
    const Tensor* t = std::get_if<Tensor>(&o.payload);
    if (!t || t->rank() != 0) continue;
    TaskSpec st = task;
    st.examples[0].output = o.payload;
    SearchConfig sc;
    sc.timeout_s = 120;
    sc.max_weight = kMaxWeight;
    sc.require_all_inputs = false;
    const auto sr = search(st, *setup.registry, setup.weights, sc);
    ++c.targets;
    if (sr.status != SearchStatus::Solved || sr.solutions[0].weight != o.min_weight) {
      ++c.target_mismatch;
      note("target", o.payload);
    }
  }
  return c;
}

}  // namespace tsynth::oracle
