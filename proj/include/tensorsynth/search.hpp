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


// Weighted bottom-up value search.

#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tensorsynth/ops.hpp"

namespace tsynth {

// Tasks -------------------------------------------------------------------------

struct TaskExample {
  std::vector<Payload> inputs;  // parallel to TaskSpec::input_names
  Payload output;
};

struct TaskSpec {
  std::vector<std::string> input_names;
  std::vector<TaskExample> examples;
  std::vector<Payload> constants;
  std::string description;
};

class TaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws TaskError when the task is malformed or exceeds size limits.
void validate_task(const TaskSpec& task);

// Configuration -----------------------------------------------------------------

/// Weights of initial values by origin.
struct OriginWeights {
  int user_input = 8;
  int user_constant = 7;
  int always = 8;
  int axis = 8;
  int dimension = 12;
  int output_shape = 12;
};

struct SearchConfig {
  double timeout_s = 300.0;
  int max_weight = 200;
  int max_solutions = 1;
  bool require_all_inputs = true;
  ToleranceConfig tolerance{};
  bool disable_filters = false;
  bool equal_weights = false;
  bool disable_tensor_model = false;
  bool disable_nl_model = false;
  std::uint64_t rng_seed = 0;
  OriginWeights origin_weights{};
  bool opportunistic_cast = true;
  /// Harvest mode: no output matching; the search stops at max_explored
  /// values (deterministic) or at the timeout, and returns the explored set.
  bool harvest = false;
  std::size_t max_explored = 0;  // 0 = unbounded
  /// Rough cap on memory held by explored values.
  std::size_t memory_budget_bytes = std::size_t{2500} << 20;
};

// Results -----------------------------------------------------------------------

struct SearchStats {
  std::uint64_t values_explored = 0;
  std::uint64_t candidates_before_arg_filters = 0;
  std::uint64_t after_arg_filters = 0;
  std::uint64_t after_combination_filters = 0;
  std::uint64_t executions = 0;
  std::uint64_t exec_errors = 0;
  std::uint64_t dedup_hits = 0;
  int max_weight_reached = 0;
};

struct Solution {
  /// The expression evaluated on the first example.
  ValuePtr expression;
  /// One value per example, all produced by the same expression.
  std::vector<ValuePtr> per_example;
  int weight = 0;
  double elapsed_s = 0;
  std::string functional;
  std::string pythonic;
  SearchStats stats;
};

enum class SearchStatus { Solved, Timeout, Exhausted };

struct SearchResult {
  SearchStatus status = SearchStatus::Exhausted;
  std::vector<Solution> solutions;
  SearchStats stats;
  double elapsed_s = 0;
  /// Harvest mode only: every explored value of the first example, in
  /// discovery order.
  std::vector<ValuePtr> explored;
};

// Explored set --------------------------------------------------------------------

/// One explored expression: its value on every example (a super-value when
/// there are several examples).
struct ExploredEntry {
  std::vector<ValuePtr> values;
  Fingerprint fingerprint = 0;
  std::uint32_t input_mask = 0;
  int weight = 0;
  bool matches_output = false;
};

Fingerprint super_fingerprint(const std::vector<ValuePtr>& values);

class ExploredSet {
 public:
  explicit ExploredSet(bool disable_filters = false) : disable_filters_(disable_filters) {}
  ExploredSet(const ExploredSet&) = delete;
  ExploredSet& operator=(const ExploredSet&) = delete;

  /// Stored entry equal_exact to `values` on every example, if any.
  const ExploredEntry* find(const std::vector<ValuePtr>& values, Fingerprint fp) const;

  /// Stores the entry unless an equal one exists. Returns the stored entry
  /// or nullptr for a duplicate.
  const ExploredEntry* insert(ExploredEntry e);
  /// Stores without the duplicate check (user inputs are always kept).
  const ExploredEntry* insert_unchecked(ExploredEntry e);

  const std::vector<const ExploredEntry*>& at_weight(int weight) const;
  /// Values of `weight` passing the filter on every example, in storage
  /// order. Computed once per (filter, weight).
  const std::vector<const ExploredEntry*>& filtered(FilterId filter, int weight);

  std::size_t size() const { return entries_.size(); }
  int max_weight() const { return static_cast<int>(by_weight_.size()) - 1; }
  /// Weights with at least one value, ascending.
  const std::vector<int>& nonempty_weights() const { return weights_; }
  const std::deque<ExploredEntry>& entries() const { return entries_; }
  std::uint64_t predicate_evaluations() const { return predicate_evaluations_; }
  std::size_t approx_bytes() const { return bytes_; }

 private:
  const ExploredEntry* store(ExploredEntry e);

  bool disable_filters_;
  std::deque<ExploredEntry> entries_;
  std::deque<std::vector<const ExploredEntry*>> by_weight_;  // deque: growth keeps references valid
  std::vector<int> weights_;
  std::unordered_multimap<Fingerprint, const ExploredEntry*> seen_;
  std::unordered_map<std::uint64_t, std::vector<const ExploredEntry*>> filter_cache_;
  std::uint64_t predicate_evaluations_ = 0;
  std::size_t bytes_ = 0;
};

/// All ordered lists of `parts` positive integers summing to `total`, in
/// lexicographic order.
std::vector<std::vector<int>> compositions(int total, int parts);

/// Effective weight of each registry operation (index-aligned).
std::vector<int> effective_op_weights(const OperationRegistry& registry, const WeightTable& weights,
                                      const SearchConfig& config);

/// Inputs, user constants and heuristic constants with origin weights,
/// deduplicated keeping the lowest weight.
void collect_initial_values(const TaskSpec& task, const SearchConfig& config, ExploredSet& out);

using SolutionCallback = std::function<void(const Solution&)>;

/// Runs the search. `weights` overrides registry base weights by name (for
/// reweighting); ops missing from it keep their base weight.
SearchResult search(const TaskSpec& task, const OperationRegistry& registry, const WeightTable& weights,
                    const SearchConfig& config, const SolutionCallback& on_solution = {});

/// Tries cast(v, target dtype) against the target. Returns the cast value
/// when it matches; nothing is stored.
std::optional<ValuePtr> try_cast_match(const ValuePtr& v, const ValuePtr& dtype_leaf, const Payload& target,
                                       const OperationSpec& cast_op, int cast_weight,
                                       const ToleranceConfig& tol);

}  // namespace tsynth
