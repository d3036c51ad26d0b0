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
#include <fstream>

#include "tensorsynth/expression.hpp"
#include "tensorsynth/learning.hpp"
#include "tensorsynth/literal.hpp"

namespace tsynth {

using nlohmann::json;

// Subtree collapsing --------------------------------------------------------------

namespace {

// Variants of one subtree: the subtree collapsed to a fresh input, plus every
// combination of the argument variants. Collapsed subtrees are recorded as
// positions in `collapsed`; names are assigned once a variant is complete.
struct Partial {
  ValuePtr expr;
  std::vector<ValuePtr> collapsed;  // placeholders, in left-to-right order
};

std::vector<Partial> variants_of(const ValuePtr& v, std::size_t limit) {
  const ExpressionNode* node = v->history();
  if (!node) return {{v, {}}};
  std::vector<Partial> out;
  // Placeholder leaf; renamed to new_inputK below.
  ValuePtr hole = Value::input(v->payload(), "", v->weight());
  out.push_back({hole, {hole}});

  std::vector<Partial> combos{{nullptr, {}}};
  std::vector<std::vector<ValuePtr>> combo_args{{}};
  for (const auto& arg : node->args) {
    const std::vector<Partial> av = variants_of(arg, limit);
    std::vector<Partial> next;
    std::vector<std::vector<ValuePtr>> next_args;
    for (std::size_t c = 0; c < combos.size(); ++c) {
      for (const auto& a : av) {
        Partial p;
        p.collapsed = combos[c].collapsed;
        p.collapsed.insert(p.collapsed.end(), a.collapsed.begin(), a.collapsed.end());
        std::vector<ValuePtr> args = combo_args[c];
        args.push_back(a.expr);
        next.push_back(std::move(p));
        next_args.push_back(std::move(args));
        if (next.size() + out.size() > limit) throw std::length_error("too many collapse variants");
      }
    }
    combos = std::move(next);
    combo_args = std::move(next_args);
  }
  for (std::size_t c = 0; c < combos.size(); ++c) {
    Partial p = std::move(combos[c]);
    p.expr = Value::derived(v->payload(), *node->op, std::move(combo_args[c]), node->op_weight);
    out.push_back(std::move(p));
  }
  return out;
}

// Rebuilds `v` with UserInput leaves relabelled through `rename`.
ValuePtr relabel(const ValuePtr& v, const std::map<const Value*, std::string>& by_leaf,
                 const std::map<std::string, std::string>& by_label) {
  const ExpressionNode* node = v->history();
  if (!node) {
    if (v->origin().kind != OriginKind::UserInput) return v;
    auto it = by_leaf.find(v.get());
    const std::string& name = it != by_leaf.end() ? it->second : by_label.at(v->origin().label);
    return Value::input(v->payload(), name, v->weight());
  }
  std::vector<ValuePtr> args;
  for (const auto& a : node->args) args.push_back(relabel(a, by_leaf, by_label));
  return Value::derived(v->payload(), *node->op, std::move(args), node->op_weight);
}

}  // namespace

std::vector<CollapseVariant> collapse_subtrees(const ValuePtr& e, std::size_t limit) {
  std::vector<Partial> parts = variants_of(e, limit);
  std::vector<CollapseVariant> out;
  // Original first, then the rest in enumeration order.
  std::stable_partition(parts.begin(), parts.end(), [](const Partial& p) { return p.collapsed.empty(); });
  for (auto& p : parts) {
    std::map<const Value*, std::string> names;
    CollapseVariant cv;
    for (std::size_t i = 0; i < p.collapsed.size(); ++i) names[p.collapsed[i].get()] = "new_input" + std::to_string(i + 1);
    std::map<std::string, std::string> keep;
    for (const auto& n : referenced_inputs(*p.expr))
      if (!n.empty()) keep[n] = n;
    cv.expression = relabel(p.expr, names, keep);
    for (std::size_t i = 0; i < p.collapsed.size(); ++i)
      cv.new_inputs.push_back(Value::input(p.collapsed[i]->payload(), "new_input" + std::to_string(i + 1),
                                           p.collapsed[i]->weight()));
    out.push_back(std::move(cv));
  }
  return out;
}

// Examples ------------------------------------------------------------------------

namespace {

void inputs_in_order(const ValuePtr& v, std::vector<ValuePtr>& out, std::set<std::string>& seen) {
  if (const ExpressionNode* node = v->history()) {
    for (const auto& a : node->args) inputs_in_order(a, out, seen);
  } else if (v->origin().kind == OriginKind::UserInput && seen.insert(v->origin().label).second) {
    out.push_back(v);
  }
}

constexpr std::int64_t kMaxDatasetElements = 50;

bool small_tensor(const Payload& p) {
  const auto* t = std::get_if<Tensor>(&p);
  return t && t->size() <= kMaxDatasetElements;
}

}  // namespace

std::optional<DatasetExample> make_example(const ValuePtr& e) {
  if (!small_tensor(e->payload())) return std::nullopt;
  const std::vector<std::string> ops = used_ops(*e);
  std::set<std::string> op_set(ops.begin(), ops.end());
  if (op_set.size() < 2) return std::nullopt;
  std::vector<ValuePtr> ins;
  std::set<std::string> seen;
  inputs_in_order(e, ins, seen);
  if (ins.empty() || ins.size() > static_cast<std::size_t>(kFeatureInputs)) return std::nullopt;
  std::map<std::string, std::string> rename;
  DatasetExample ex;
  for (std::size_t i = 0; i < ins.size(); ++i) {
    if (!small_tensor(ins[i]->payload())) return std::nullopt;
    rename[ins[i]->origin().label] = "in" + std::to_string(i + 1);
    ex.inputs.push_back(ins[i]->payload());
  }
  ex.output = e->payload();
  ex.program = render(*relabel(e, {}, rename), RenderStyle::Functional);
  ex.ops_used = std::move(op_set);
  return ex;
}

bool example_sound(const DatasetExample& ex, const OperationRegistry& registry) {
  Bindings b;
  for (std::size_t i = 0; i < ex.inputs.size(); ++i) {
    const std::string name = "in" + std::to_string(i + 1);
    b[name] = Value::input(ex.inputs[i], name, 1);
  }
  try {
    Expected<ValuePtr> r = evaluate_text(ex.program, registry, b);
    return r && equal_exact(r.value()->payload(), ex.output);
  } catch (const std::exception&) {
    return false;
  }
}

json DatasetExample::to_json() const {
  json ins = json::array();
  for (const auto& p : inputs) ins.push_back(to_literal(p));
  return {{"inputs", ins}, {"output", to_literal(output)}, {"program", program}, {"ops_used", ops_used}};
}

DatasetExample DatasetExample::from_json(const json& j) {
  DatasetExample ex;
  for (const auto& p : j.at("inputs")) ex.inputs.push_back(parse_literal(p));
  ex.output = parse_literal(j.at("output"));
  ex.program = j.at("program").get<std::string>();
  ex.ops_used = j.at("ops_used").get<std::set<std::string>>();
  return ex;
}

void save_dataset(const std::vector<DatasetExample>& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& ex : data) out << ex.to_json().dump() << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<DatasetExample> load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<DatasetExample> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(DatasetExample::from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// Random inputs -------------------------------------------------------------------

std::vector<Payload> random_inputs(std::mt19937_64& rng) {
  auto uniform = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  std::vector<Payload> out;
  const auto n = uniform(1, 3);
  for (std::int64_t k = 0; k < n; ++k) {
    const auto rank = static_cast<int>(uniform(0, 3));
    std::vector<std::int64_t> dims;
    for (;;) {
      dims.clear();
      std::int64_t total = 1;
      for (int d = 0; d < rank; ++d) {
        dims.push_back(uniform(1, 8));
        total *= dims.back();
      }
      if (total <= kMaxDatasetElements) break;
    }
    const Shape shape(dims);
    const auto size = static_cast<std::size_t>(shape.num_elements());
    const auto pick = uniform(0, 99);
    const DType dt = pick < 60 ? DType::I32 : pick < 85 ? DType::F32 : pick < 95 ? DType::Bool : DType::I64;
    if (dt == DType::F32) {
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      std::vector<float> v(size);
      for (auto& x : v) x = static_cast<float>(std::round(u(rng) * 100.0) / 100.0);
      out.emplace_back(Tensor::from(shape, std::move(v)));
    } else if (dt == DType::Bool) {
      std::vector<std::uint8_t> v(size);
      for (auto& x : v) x = static_cast<std::uint8_t>(uniform(0, 1));
      out.emplace_back(Tensor::from(shape, std::move(v)));
    } else {
      // Either small values or indices into one of the tensor's dimensions.
      std::int64_t lo = -10, hi = 50;
      if (uniform(0, 1) == 1) {
        lo = 0;
        hi = (rank ? dims[static_cast<std::size_t>(uniform(0, rank - 1))] : uniform(1, 8)) - 1;
      }
      if (dt == DType::I32) {
        std::vector<std::int32_t> v(size);
        for (auto& x : v) x = static_cast<std::int32_t>(uniform(lo, hi));
        out.emplace_back(Tensor::from(shape, std::move(v)));
      } else {
        std::vector<std::int64_t> v(size);
        for (auto& x : v) x = uniform(lo, hi);
        out.emplace_back(Tensor::from(shape, std::move(v)));
      }
    }
  }
  return out;
}

// Generation ----------------------------------------------------------------------

std::vector<DatasetExample> generate_dataset(const OperationRegistry& registry, const WeightTable& weights,
                                             const DatagenConfig& cfg, DatagenStats* stats) {
  DatagenStats st;
  std::vector<DatasetExample> out;
  for (int run = 0; run < cfg.runs; ++run) {
    // Each run has its own stream so runs are independent of one another.
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(run)};
    std::mt19937_64 rng(seq);

    TaskSpec task;
    TaskExample ex;
    ex.inputs = random_inputs(rng);
    for (std::size_t i = 0; i < ex.inputs.size(); ++i) task.input_names.push_back("in" + std::to_string(i + 1));
    // Never compared against in harvest mode; a scalar adds no shape constants.
    ex.output = Tensor::from(Shape{}, std::vector<float>{std::nanf("")});
    task.examples.push_back(std::move(ex));

    SearchConfig sc;
    sc.harvest = true;
    sc.max_explored = cfg.max_explored;
    sc.timeout_s = cfg.per_run_timeout_s;
    sc.require_all_inputs = false;
    sc.rng_seed = cfg.seed;
    const SearchResult res = search(task, registry, weights, sc);
    ++st.runs;
    if (res.status == SearchStatus::Timeout) ++st.runs_time_capped;

    std::vector<ValuePtr> derived;
    for (const auto& v : res.explored)
      if (v->history()) derived.push_back(v);
    st.harvested += derived.size();
    std::vector<ValuePtr> picked;
    std::sample(derived.begin(), derived.end(), std::back_inserter(picked), cfg.per_run_cap, rng);
    st.sampled += picked.size();

    for (const auto& v : picked) {
      std::vector<CollapseVariant> vars;
      try {
        vars = collapse_subtrees(v);
      } catch (const std::length_error&) {
        vars = {{v, {}}};
      }
      const auto& chosen = vars[static_cast<std::size_t>(
          std::uniform_int_distribution<std::size_t>(0, vars.size() - 1)(rng))];
      std::optional<DatasetExample> de = make_example(chosen.expression);
      if (!de) {
        ++st.rejected_filter;
        continue;
      }
      if (!example_sound(*de, registry)) {
        ++st.rejected_unsound;
        continue;
      }
      out.push_back(std::move(*de));
    }
  }
  st.emitted = out.size();
  if (stats) *stats = st;
  return out;
}

}  // namespace tsynth
