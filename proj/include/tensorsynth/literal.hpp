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

// JSON literal form of values, shared by task files, datasets and test data.
//
//   [[1, 2], [3, 4]]                       i32 tensor (bare ints default to i32)
//   [1.5, 2]                               f32 tensor (any decimal makes it f32)
//   [true, false]                          bool tensor
//   {"dtype": "i64", "data": [1, 2]}       explicit dtype; optional "shape"
//   {"int": 3} {"float": 0.5} {"bool": true} {"dtype": "int32"} {"tuple": [...]}
//
// Bare scalars are rank-0 tensors, except where the caller asks for Python
// primitives (task constants).

#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "tensorsynth/value.hpp"

namespace tsynth {

class LiteralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BareScalars { AsTensors, AsPrimitives };

/// Throws LiteralError with a description of the offending element.
Payload parse_literal(const nlohmann::json& j, BareScalars scalars = BareScalars::AsTensors);
Payload parse_literal_text(const std::string& text, BareScalars scalars = BareScalars::AsTensors);

/// Canonical literal: tensors as {"dtype","shape","data"}, primitives as
/// single-key objects. parse_literal(to_literal(p)) is equal_exact to p.
nlohmann::json to_literal(const Payload& p);

/// Literal for a leaf constant, with leaf values wrapped in fresh Values.
ValuePtr literal_value(const nlohmann::json& j, Origin origin, int weight,
                       BareScalars scalars = BareScalars::AsTensors);

}  // namespace tsynth
