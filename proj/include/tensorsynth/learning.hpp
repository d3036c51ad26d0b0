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


// Offline pipeline: synthetic training data from harvested searches, the
// tensor-features classifier trainer, and its losses.

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tensorsynth/guidance.hpp"
#include "tensorsynth/ops.hpp"
#include "tensorsynth/search.hpp"

namespace tsynth {

// Subtree collapsing --------------------------------------------------------------

struct CollapseVariant {
  /// The rewritten expression. Collapsed subtrees are UserInput leaves
  /// labelled new_input1, new_input2, ... holding the subtree's value.
  ValuePtr expression;
  std::vector<ValuePtr> new_inputs;
};

/// The original expression plus every way of replacing a set of
/// non-overlapping derived subtrees (the root included) by fresh inputs.
/// A leaf yields only itself. Throws std::length_error past `limit` variants.
std::vector<CollapseVariant> collapse_subtrees(const ValuePtr& e, std::size_t limit = 1u << 16);

// Dataset -------------------------------------------------------------------------

struct DatasetExample {
  std::vector<Payload> inputs;  // bound to in1..inK
  Payload output;
  std::string program;          // functional rendering
  std::set<std::string> ops_used;

  nlohmann::json to_json() const;
  static DatasetExample from_json(const nlohmann::json& j);
};

/// Renames the inputs of `e` to in1..inK by first appearance and packages the
/// result. Returns nullopt when the example violates the dataset invariants
/// (fewer than 2 ops, non-tensor or oversized values, more than 3 inputs).
std::optional<DatasetExample> make_example(const ValuePtr& e);

/// Re-evaluates the program text on the inputs and compares exactly.
bool example_sound(const DatasetExample& ex, const OperationRegistry& registry);

struct DatagenConfig {
  std::uint64_t seed = 1;
  int runs = 10;
  /// Values explored per harvest run; this is what bounds a run.
  std::size_t max_explored = 20000;
  /// Safety cap only. Hitting it makes the output depend on machine speed,
  /// which DatagenStats reports.
  double per_run_timeout_s = 10;
  std::size_t per_run_cap = 2000;
};

struct DatagenStats {
  int runs = 0;
  int runs_time_capped = 0;
  std::size_t harvested = 0;
  std::size_t sampled = 0;
  std::size_t emitted = 0;
  std::size_t rejected_filter = 0;
  std::size_t rejected_unsound = 0;
};

/// Random task inputs for one harvest run.
std::vector<Payload> random_inputs(std::mt19937_64& rng);

std::vector<DatasetExample> generate_dataset(const OperationRegistry& registry, const WeightTable& weights,
                                             const DatagenConfig& cfg, DatagenStats* stats = nullptr);

void save_dataset(const std::vector<DatasetExample>& data, const std::string& path);
std::vector<DatasetExample> load_dataset(const std::string& path);

// Losses --------------------------------------------------------------------------

enum class LossKind { CrossEntropy, F1, F2 };
enum class Weighting { None, WMax, WMean };

std::string_view loss_kind_name(LossKind k);
std::string_view weighting_name(Weighting w);
bool parse_loss_kind(std::string_view s, LossKind& out);
bool parse_weighting(std::string_view s, Weighting& out);

inline constexpr double kWeightClip = 10000;

/// Weight of a positive example of `op`. Throws UnknownOp when `op` has no
/// count; counts must be positive.
double example_weight(const std::string& op, Weighting scheme, const std::map<std::string, std::size_t>& counts,
                      double clip = kWeightClip);

struct LossResult {
  double loss = 0;
  std::vector<double> grad;
  /// Labels and probabilities all zero: loss reported as 0.
  bool degenerate = false;
};

/// Weighted sigmoid cross entropy averaged over ops; grad is w.r.t. logits.
LossResult cross_entropy_loss(const std::vector<double>& logits, const std::vector<double>& labels,
                              const std::vector<double>& weights);

inline constexpr double kFbetaEpsilon = 1e-7;

/// 1 - soft F_beta; grad is w.r.t. probabilities.
LossResult fbeta_loss(const std::vector<double>& probs, const std::vector<double>& labels, double beta,
                      const std::vector<double>& weights);

// Training ------------------------------------------------------------------------

class EmptyDataset : public std::runtime_error {
 public:
  EmptyDataset() : std::runtime_error("dataset is empty") {}
};

struct TrainConfig {
  LossKind loss = LossKind::CrossEntropy;
  Weighting weighting = Weighting::None;
  double clip = kWeightClip;
  double learning_rate = 0.5;
  int epochs = 5;
  std::size_t batch_size = 32;
  std::uint64_t rng_seed = 1;
  std::size_t hidden_dim = 0;
  /// Percentage of examples (by content hash) held out for evaluation.
  int eval_percent = 5;
};

struct EpochLoss {
  int epoch = 0;
  double train_loss = 0;
  double eval_loss = 0;
};

struct TrainReport {
  std::vector<EpochLoss> epochs;
  /// Losses of the all-zero model (every probability 0.5).
  double zero_train_loss = 0;
  double zero_eval_loss = 0;
  std::size_t train_examples = 0;
  std::size_t eval_examples = 0;
  std::string csv() const;
};

bool is_eval_example(const DatasetExample& ex, int eval_percent);

TensorModelParams train_tensor_model(const std::vector<DatasetExample>& data, const std::vector<std::string>& op_names,
                                     const TrainConfig& cfg, TrainReport* report = nullptr);

}  // namespace tsynth
