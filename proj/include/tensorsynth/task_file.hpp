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


// Task files (JSON):
//
//   {
//     "inputs": {"in1": [45, 58, 72]},
//     "output": [0, 1, 2],
//     "constants": [100, {"dtype": "i64"}],
//     "description": "index of each element among the unique values"
//   }
//
// Several examples go in "examples": [{"inputs": {...}, "output": ...}, ...]
// instead of the top-level inputs/output. Bare scalars in "constants" are
// Python primitives; elsewhere they are rank-0 tensors.

#pragma once

#include <stdexcept>
#include <string>

#include "tensorsynth/search.hpp"

namespace tsynth {

class TaskParseError : public std::runtime_error {
 public:
  TaskParseError(int line, const std::string& reason)
      : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + reason),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Optional metadata carried by benchmark task files.
struct TaskMetadata {
  std::string name;
  /// Reference solution in functional form, if known.
  std::string expected_solution;
  /// Per-task time budget used by benchmark runs; 0 means the default.
  double time_budget_s = 0;
};

struct TaskFile {
  TaskSpec spec;
  TaskMetadata meta;
};

/// Throws TaskParseError on malformed JSON or literals and TaskError when a
/// value exceeds the size limits.
TaskFile parse_task_text(const std::string& text);
TaskFile parse_task_file(const std::string& path);

}  // namespace tsynth
