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

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tensorsynth/tensor.hpp"

namespace tsynth {

struct OperationSpec;
class Value;
using ValuePtr = std::shared_ptr<const Value>;

struct PrimitiveInt { std::int64_t value; };
struct PrimitiveFloat { double value; };
struct PrimitiveBool { bool value; };
struct DTypeLiteral { DType dtype; };
struct Tuple { std::vector<ValuePtr> items; };

/// Alternative order is part of the fingerprint; do not reorder.
using Payload = std::variant<PrimitiveInt, PrimitiveFloat, PrimitiveBool, DTypeLiteral, Tuple, Tensor>;

enum class OriginKind : std::uint8_t { UserInput, UserConstant, HeuristicConstant, Derived };

struct Origin {
  OriginKind kind = OriginKind::Derived;
  /// Input name for UserInput, heuristic kind ("always", "axis", "dim",
  /// "output_shape") for HeuristicConstant, empty otherwise.
  std::string label;
};

struct ExpressionNode {
  const OperationSpec* op = nullptr;
  std::vector<ValuePtr> args;
  /// Operation weight in effect when the node was built (after reweighting).
  int op_weight = 0;
};

using Fingerprint = std::uint64_t;

/// A runtime value plus the expression that produced it. Immutable.
class Value {
 public:
  static ValuePtr leaf(Payload payload, Origin origin, int weight);
  static ValuePtr input(Payload payload, std::string name, int weight);
  /// weight = op_weight + sum of argument weights.
  static ValuePtr derived(Payload payload, const OperationSpec& op, std::vector<ValuePtr> args,
                          int op_weight);

  const Payload& payload() const { return payload_; }
  const Origin& origin() const { return origin_; }
  const ExpressionNode* history() const { return history_ ? &*history_ : nullptr; }
  int weight() const { return weight_; }
  Fingerprint fingerprint() const { return fingerprint_; }

  const Tensor* tensor() const { return std::get_if<Tensor>(&payload_); }
  const Tuple* tuple() const { return std::get_if<Tuple>(&payload_); }
  std::optional<std::int64_t> primitive_int() const {
    if (auto* p = std::get_if<PrimitiveInt>(&payload_)) return p->value;
    return std::nullopt;
  }
  bool is_tensor() const { return std::holds_alternative<Tensor>(payload_); }

  Value(Payload payload, Origin origin, std::optional<ExpressionNode> history, int weight);

 private:
  Payload payload_;
  std::optional<ExpressionNode> history_;
  Origin origin_;
  int weight_;
  Fingerprint fingerprint_;
};

// Equality, fingerprints and limits ---------------------------------------

Fingerprint fingerprint(const Payload& p);
/// Folds another fingerprint in; used for multi-example super-values.
Fingerprint combine_fingerprints(Fingerprint seed, Fingerprint next);

/// Exact equality: payload variant, dtype, shape, element bits. NaNs are
/// identified with each other and -0.0 with +0.0.
bool equal_exact(const Payload& a, const Payload& b);
inline bool equal_exact(const Value& a, const Value& b) { return equal_exact(a.payload(), b.payload()); }

struct ToleranceConfig {
  double rel_tol = 1e-4;
  double abs_tol = 1e-8;
};

/// Output matching: exact for non-float data, tolerant for floats.
bool equal_output(const Payload& candidate, const Payload& target, const ToleranceConfig& tol);
inline bool equal_output(const Value& c, const Value& t, const ToleranceConfig& tol) {
  return equal_output(c.payload(), t.payload(), tol);
}

struct Limits {
  std::int64_t max_elements = 1000;
  int max_rank = 4;
  std::int64_t max_dim = 100;
  std::size_t max_tuple_length = 4;
};

inline constexpr Limits kDefaultLimits{};

bool within_limits(const Payload& p, const Limits& limits = kDefaultLimits);
inline bool within_limits(const Value& v, const Limits& limits = kDefaultLimits) {
  return within_limits(v.payload(), limits);
}
/// Limit check on a prospective tensor shape given as raw dims.
bool shape_within_limits(std::span<const std::int64_t> dims, const Limits& limits = kDefaultLimits);

/// Recomputes the weight from the expression tree (leaf weights + op weights
/// as recorded in the node). Equals Value::weight() for well-formed values.
int expression_weight(const Value& v);

/// Number of operation applications in the expression tree.
int operation_count(const Value& v);

// Rendering -------------------------------------------------------------------

enum class RenderStyle { Functional, Pythonic };

std::string render(const Value& v, RenderStyle style);
/// Literal text of a constant payload (used for leaves).
std::string render_payload(const Payload& p, RenderStyle style);

/// Shortest round-tripping decimal text of a float, always with '.' or 'e'.
std::string format_float(float f);
std::string format_double(double d);

}  // namespace tsynth
