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
#include <charconv>
#include <fstream>
#include <sstream>

#include "op_util.hpp"

namespace tsynth {

std::string_view op_error_kind_name(OpErrorKind k) {
  switch (k) {
    case OpErrorKind::PreconditionViolated: return "PreconditionViolated";
    case OpErrorKind::NumericError: return "NumericError";
    case OpErrorKind::LimitExceeded: return "LimitExceeded";
    case OpErrorKind::Unsupported: return "Unsupported";
  }
  return "Unsupported";
}

std::span<const OpDef> builtin_op_defs() {
  static const std::vector<OpDef> defs = [] {
    std::vector<OpDef> d;
    detail::append_elementwise_ops(d);
    detail::append_reduction_ops(d);
    detail::append_shape_ops(d);
    detail::append_indexing_ops(d);
    detail::append_python_ops(d);
    detail::append_sorting_ops(d);
    detail::append_construction_ops(d);
    detail::append_segment_ops(d);
    return d;
  }();
  return defs;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

// Weight table ---------------------------------------------------------------

WeightTable WeightTable::parse(std::string_view text) {
  WeightTable t;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("weights line " + std::to_string(line_no) + ": expected 'name = integer'");
    const std::string name(trim(line.substr(0, eq)));
    const std::string_view num = trim(line.substr(eq + 1));
    int w = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), w);
    if (name.empty() || ec != std::errc() || ptr != num.data() + num.size())
      throw std::invalid_argument("weights line " + std::to_string(line_no) + ": malformed entry");
    t.set(name, w);
  }
  return t;
}

WeightTable WeightTable::load(const std::string& path) { return parse(read_file(path)); }

const WeightTable& WeightTable::builtin() {
  static const WeightTable t = parse(embedded::weights_conf());
  return t;
}

int WeightTable::at(const std::string& name) const {
  auto it = weights_.find(name);
  if (it == weights_.end()) throw MissingWeight(name);
  return it->second;
}

void WeightTable::set(const std::string& name, int weight) {
  if (weight < 1) throw std::invalid_argument("weight for " + name + " must be positive");
  weights_[name] = weight;
}

std::string WeightTable::serialize() const {
  std::string out;
  for (const auto& [name, w] : weights_) out += name + " = " + std::to_string(w) + "\n";
  return out;
}

// Docstrings -------------------------------------------------------------------

DocstringTable DocstringTable::parse(std::string_view text) {
  DocstringTable t;
  std::string current;
  std::string body;
  auto flush = [&] {
    if (!current.empty()) t.docs_[current] = std::string(trim(body));
    body.clear();
  };
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const std::string_view tl = trim(line);
    if (tl.size() > 2 && tl.front() == '[' && tl.back() == ']') {
      flush();
      current = std::string(tl.substr(1, tl.size() - 2));
      continue;
    }
    if (!current.empty()) {
      if (!body.empty()) body += '\n';
      body += line;
    }
  }
  flush();
  return t;
}

DocstringTable DocstringTable::load(const std::string& path) { return parse(read_file(path)); }

const DocstringTable& DocstringTable::builtin() {
  static const DocstringTable t = parse(embedded::opdocs_txt());
  return t;
}

const std::string& DocstringTable::at(const std::string& name) const {
  auto it = docs_.find(name);
  if (it == docs_.end()) throw MissingDocstring(name);
  return it->second;
}

// Registry -----------------------------------------------------------------------

std::shared_ptr<const OperationRegistry> OperationRegistry::build(const WeightTable& weights,
                                                                  const DocstringTable& docs) {
  auto reg = std::make_shared<OperationRegistry>();
  for (const OpDef& def : builtin_op_defs()) {
    OperationSpec spec;
    spec.name = std::string(def.name);
    spec.arity = def.arity;
    for (int i = 0; i < def.arity; ++i) spec.arg_filters[static_cast<std::size_t>(i)] = arg_filter_id(def.arg_filters[static_cast<std::size_t>(i)]);
    spec.combination = def.combination;
    spec.executor = def.executor;
    spec.pythonic = std::string(def.pythonic);
    spec.base_weight = weights.at(spec.name);
    spec.docstring = docs.at(spec.name);
    spec.index = static_cast<int>(reg->ops_.size());
    reg->by_name_[spec.name] = reg->ops_.size();
    reg->ops_.push_back(std::move(spec));
  }
  return reg;
}

std::shared_ptr<const OperationRegistry> OperationRegistry::builtin() {
  static const auto reg = build(WeightTable::builtin());
  return reg;
}

std::shared_ptr<const OperationRegistry> OperationRegistry::subset(std::span<const std::string> names) const {
  for (const auto& n : names)
    if (!find(n)) throw UnknownOp(n);
  auto reg = std::make_shared<OperationRegistry>();
  for (const auto& op : ops_) {
    if (std::find(names.begin(), names.end(), op.name) == names.end()) continue;
    OperationSpec spec = op;
    spec.index = static_cast<int>(reg->ops_.size());
    reg->by_name_[spec.name] = reg->ops_.size();
    reg->ops_.push_back(std::move(spec));
  }
  return reg;
}

const OperationSpec* OperationRegistry::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : &ops_[it->second];
}

const OperationSpec& OperationRegistry::at(std::string_view name) const {
  const OperationSpec* op = find(name);
  if (!op) throw UnknownOp(std::string(name));
  return *op;
}

WeightTable OperationRegistry::weights() const {
  WeightTable t;
  for (const auto& op : ops_) t.set(op.name, op.base_weight);
  return t;
}

const std::string& docstring(const OperationRegistry& registry, std::string_view op_name) {
  return registry.at(op_name).docstring;
}

// Application ----------------------------------------------------------------------

Expected<ValuePtr> apply_operation(const OperationSpec& op, std::span<const ValuePtr> args, int op_weight) {
  if (static_cast<int>(args.size()) != op.arity) return precondition("wrong number of arguments");
  Expected<Payload> r = op.executor(args);
  if (!r) return r.error();
  if (!within_limits(r.value())) return limit_exceeded("result exceeds size limits");
  return Value::derived(r.take(), op, std::vector<ValuePtr>(args.begin(), args.end()), op_weight);
}

bool arg_filter_pass(const OperationSpec& op, int position, const Value& v) {
  const FilterId id = op.arg_filters[static_cast<std::size_t>(position - 1)];
  return arg_filter_table()[static_cast<std::size_t>(id)].fn(v);
}

bool combination_filter_pass(const OperationSpec& op, std::span<const ValuePtr> args) {
  return op.combination.fn == nullptr || op.combination.fn(args);
}

}  // namespace tsynth
