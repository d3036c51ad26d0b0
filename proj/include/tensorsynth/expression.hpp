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


// Parsing and evaluation of expressions in the functional rendering, e.g.
//   gather_2(in1, argsort_stable(in2, 0))
//   cast(where_1(sequence_mask(in1)), tf.int32)
//   add(in1, tensor(f32, [2], [0.5, 1.0]))

#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "tensorsynth/ops.hpp"

namespace tsynth {

class ExpressionSyntaxError : public std::runtime_error {
 public:
  ExpressionSyntaxError(std::size_t offset, const std::string& reason)
      : std::runtime_error("offset " + std::to_string(offset) + ": " + reason), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

using Bindings = std::map<std::string, ValuePtr, std::less<>>;

/// Parses and evaluates functional text. Identifiers other than operation
/// names, True and False must be bound in `inputs`. Constants become leaves of
/// weight 1. Throws ExpressionSyntaxError on malformed text or unknown names;
/// returns the first OpError raised while evaluating.
Expected<ValuePtr> evaluate_text(std::string_view text, const OperationRegistry& registry,
                                 const Bindings& inputs);

/// Re-executes an expression tree bottom-up. UserInput leaves are looked up
/// by name in `inputs`; other leaves are reused as is.
Expected<ValuePtr> evaluate_expression(const Value& expr, const Bindings& inputs);

/// Names of the UserInput leaves referenced by an expression.
std::vector<std::string> referenced_inputs(const Value& expr);

/// Names of the operations used by an expression.
std::vector<std::string> used_ops(const Value& expr);

}  // namespace tsynth
