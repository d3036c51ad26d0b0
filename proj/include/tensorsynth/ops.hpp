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

#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "tensorsynth/value.hpp"

namespace tsynth {

// Errors ----------------------------------------------------------------------

enum class OpErrorKind { PreconditionViolated, NumericError, LimitExceeded, Unsupported };

std::string_view op_error_kind_name(OpErrorKind k);

struct OpError {
  OpErrorKind kind;
  std::string detail;
};

/// Either a value or an OpError. Executors never throw.
template <typename T>
class Expected {
 public:
  Expected(T value) : v_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Expected(OpError err) : v_(std::move(err)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }
  T& value() { return std::get<0>(v_); }
  const T& value() const { return std::get<0>(v_); }
  T&& take() { return std::move(std::get<0>(v_)); }
  const OpError& error() const { return std::get<1>(v_); }

 private:
  std::variant<T, OpError> v_;
};

inline OpError precondition(std::string detail) { return {OpErrorKind::PreconditionViolated, std::move(detail)}; }
inline OpError numeric_error(std::string detail) { return {OpErrorKind::NumericError, std::move(detail)}; }
inline OpError limit_exceeded(std::string detail) { return {OpErrorKind::LimitExceeded, std::move(detail)}; }

class UnknownOp : public std::runtime_error {
 public:
  explicit UnknownOp(const std::string& name) : std::runtime_error("unknown operation: " + name) {}
};

class MissingWeight : public std::runtime_error {
 public:
  explicit MissingWeight(const std::string& name) : std::runtime_error("weight table lacks operation: " + name) {}
};

class MissingDocstring : public std::runtime_error {
 public:
  explicit MissingDocstring(const std::string& name) : std::runtime_error("no docstring for operation: " + name) {}
};

// Filters ----------------------------------------------------------------------

using ArgFilterFn = bool (*)(const Value&);
using CombinationFilterFn = bool (*)(std::span<const ValuePtr>);
using Executor = Expected<Payload> (*)(std::span<const ValuePtr>);

/// Index into the argument-filter table; also the cache key together with
/// a weight.
using FilterId = int;

struct ArgFilter {
  std::string_view name;
  ArgFilterFn fn;
};

/// All reusable argument filters, indexed by FilterId.
std::span<const ArgFilter> arg_filter_table();
FilterId arg_filter_id(std::string_view name);
inline constexpr FilterId kAnyFilter = 0;

struct CombinationFilter {
  std::string_view name;
  CombinationFilterFn fn;  // null means "no combination filter"
};

// Operations --------------------------------------------------------------------

inline constexpr int kMaxArity = 4;

struct OperationSpec {
  std::string name;
  int arity = 0;
  std::array<FilterId, kMaxArity> arg_filters{};
  CombinationFilter combination{};
  Executor executor = nullptr;
  /// Pythonic rendering with {0}..{3} placeholders for rendered arguments.
  std::string pythonic;
  std::string docstring;
  int base_weight = 1;
  int index = 0;
};

/// Static description of one built-in operation before weights/docs attach.
struct OpDef {
  std::string_view name;
  int arity;
  std::array<std::string_view, kMaxArity> arg_filters;
  CombinationFilter combination;
  Executor executor;
  std::string_view pythonic;
};

/// The built-in operation definitions in registry order.
std::span<const OpDef> builtin_op_defs();

class WeightTable {
 public:
  WeightTable() = default;

  static WeightTable parse(std::string_view text);
  static WeightTable load(const std::string& path);
  /// Shipped weights.conf.
  static const WeightTable& builtin();

  bool contains(const std::string& name) const { return weights_.count(name) != 0; }
  int at(const std::string& name) const;
  void set(const std::string& name, int weight);
  void erase(const std::string& name) { weights_.erase(name); }
  const std::map<std::string, int>& entries() const { return weights_; }
  std::string serialize() const;

  friend bool operator==(const WeightTable& a, const WeightTable& b) { return a.weights_ == b.weights_; }

 private:
  std::map<std::string, int> weights_;
};

/// Parsed `[name]` blocks of an operation docstring file.
class DocstringTable {
 public:
  static DocstringTable parse(std::string_view text);
  static DocstringTable load(const std::string& path);
  static const DocstringTable& builtin();

  const std::string& at(const std::string& name) const;
  bool contains(const std::string& name) const { return docs_.count(name) != 0; }
  const std::map<std::string, std::string>& entries() const { return docs_; }

 private:
  std::map<std::string, std::string> docs_;
};

class OperationRegistry {
 public:
  /// Throws MissingWeight / MissingDocstring.
  static std::shared_ptr<const OperationRegistry> build(const WeightTable& weights,
                                                        const DocstringTable& docs = DocstringTable::builtin());
  /// Registry over the default shipped tables.
  static std::shared_ptr<const OperationRegistry> builtin();

  /// A registry restricted to the named operations (registry order kept).
  std::shared_ptr<const OperationRegistry> subset(std::span<const std::string> names) const;

  std::span<const OperationSpec> ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  const OperationSpec& at(std::string_view name) const;
  const OperationSpec* find(std::string_view name) const;
  const OperationSpec& operator[](std::size_t i) const { return ops_[i]; }

  WeightTable weights() const;

 private:
  std::vector<OperationSpec> ops_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

/// Convenience alias for `registry.build(weights)`.
inline std::shared_ptr<const OperationRegistry> registry_build(const WeightTable& weights) {
  return OperationRegistry::build(weights);
}

/// Runs the executor and wraps the result into a derived Value. Returns
/// LimitExceeded when the result is too large; never throws.
Expected<ValuePtr> apply_operation(const OperationSpec& op, std::span<const ValuePtr> args,
                                   int op_weight);
inline Expected<ValuePtr> apply_operation(const OperationSpec& op, std::span<const ValuePtr> args) {
  return apply_operation(op, args, op.base_weight);
}

bool arg_filter_pass(const OperationSpec& op, int position, const Value& v);  // position is 1-based
bool combination_filter_pass(const OperationSpec& op, std::span<const ValuePtr> args);

const std::string& docstring(const OperationRegistry& registry, std::string_view op_name);

/// Text of shipped data files, embedded at build time.
namespace embedded {
std::string_view weights_conf();
std::string_view opdocs_txt();
std::string_view stopwords_txt();
}  // namespace embedded

}  // namespace tsynth
