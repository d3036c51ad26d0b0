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

// Small helpers shared by the unit tests.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "tensorsynth/literal.hpp"
#include "tensorsynth/search.hpp"

namespace tsynth::testing {

/// Leaf constant parsed from JSON literal text (bare scalars are tensors).
ValuePtr lit(const std::string& text);
/// Same, with bare scalars read as Python primitives.
ValuePtr prim(const std::string& text);
ValuePtr input(const std::string& text, const std::string& name);
Payload payload(const std::string& text);

/// Applies a builtin operation by name. Fails the test on unknown names.
Expected<ValuePtr> apply(const std::string& op, const std::vector<ValuePtr>& args);

/// Single-example task from literal text.
TaskSpec task(const std::vector<std::pair<std::string, std::string>>& inputs, const std::string& output,
              const std::vector<std::string>& constants = {}, const std::string& description = "");

/// Random tensor: any dtype, rank 0-3, dims 0-4, small or index-like values.
Tensor random_tensor(std::mt19937_64& rng, int max_rank = 3);
/// Random leaf of any kind (tensor, primitive, dtype, tuple), biased towards
/// the shapes of argument operations expect.
ValuePtr random_value(std::mt19937_64& rng);

std::string data_path(const std::string& name);
std::vector<nlohmann::json> read_jsonl(const std::string& path);

}  // namespace tsynth::testing
