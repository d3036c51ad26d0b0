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


// Operation prioritization: models predict operations likely to appear in
// the solution, and their weights are scaled down before the search.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tensorsynth/ops.hpp"
#include "tensorsynth/search.hpp"

namespace tsynth {

enum class ModelSource { TensorModel, TfIdf, NaiveBayes };

std::string_view model_source_name(ModelSource s);

struct PrioritizedOps {
  ModelSource source = ModelSource::TensorModel;
  std::set<std::string> ops;
  double multiplier = 0.75;
};

/// Scales each prioritized op by the product of the multipliers of the
/// models naming it, rounding to nearest with a floor of 1. Throws UnknownOp.
WeightTable reweight(const WeightTable& base, const std::vector<PrioritizedOps>& predictions);

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor features ------------------------------------------------------------------

/// Bucket upper bounds. A value lands in the first bucket whose bound it does
/// not exceed (strictly below when `inclusive` is false); values above all
/// bounds land in a final overflow bucket.
struct BucketEdge {
  double bound;
  bool inclusive;
};

struct FeatureConfig {
  /// For counts and integer-like statistics.
  std::vector<BucketEdge> count_edges;
  /// For element value statistics (min, max, mean).
  std::vector<BucketEdge> value_edges;

  static FeatureConfig defaults();
  nlohmann::json to_json() const;
  static FeatureConfig from_json(const nlohmann::json& j);
  friend bool operator==(const FeatureConfig& a, const FeatureConfig& b);
};

int bucket_index(double x, const std::vector<BucketEdge>& edges);

class TooManyInputs : public std::runtime_error {
 public:
  TooManyInputs() : std::runtime_error("featurization supports at most 3 inputs") {}
};

inline constexpr int kFeatureInputs = 3;

/// Fixed-length feature vector for one example (inputs padded with dummy
/// scalars to exactly three).
std::vector<float> featurize(const std::vector<Payload>& inputs, const Payload& output,
                             const FeatureConfig& cfg = FeatureConfig::defaults());
/// Features of the task's first example.
std::vector<float> featurize(const TaskSpec& task, const FeatureConfig& cfg = FeatureConfig::defaults());
std::vector<std::string> feature_names(const FeatureConfig& cfg = FeatureConfig::defaults());
std::size_t feature_count(const FeatureConfig& cfg = FeatureConfig::defaults());

class DimensionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-operation logistic classifier, optionally with one tanh hidden layer.
struct TensorModelParams {
  std::vector<std::string> op_names;
  FeatureConfig features = FeatureConfig::defaults();
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;  // 0 = linear model
  std::vector<float> hidden_w;  // hidden_dim x input_dim, row-major
  std::vector<float> hidden_b;  // hidden_dim
  std::vector<float> out_w;     // ops x (hidden_dim or input_dim)
  std::vector<float> out_b;     // ops
  double threshold = 0.5;

  static TensorModelParams zeros(std::vector<std::string> op_names, std::size_t input_dim, std::size_t hidden_dim = 0,
                                 FeatureConfig features = FeatureConfig::defaults());
  std::vector<double> logits(const std::vector<float>& x) const;

  nlohmann::json to_json() const;
  static TensorModelParams from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static TensorModelParams load(const std::string& path);
};

/// Ops whose sigmoid(logit) exceeds the threshold. Throws DimensionMismatch.
PrioritizedOps tensor_model_predict(const std::vector<float>& fv, const TensorModelParams& params,
                                    double multiplier = 0.75);

// Natural language ---------------------------------------------------------------------

/// Shipped English stop words.
const std::set<std::string>& default_stopwords();
std::set<std::string> parse_stopwords(std::string_view text);

/// Lowercases, splits on non-alphanumerics, drops 1-character tokens and
/// stop words.
std::vector<std::string> tokenize(std::string_view text, const std::set<std::string>& stopwords = default_stopwords());

/// Vocabulary and smoothed term totals shared by both text models.
struct TermStats {
  std::vector<std::string> vocab;                 // sorted
  std::map<std::string, std::size_t> index;       // term -> position in vocab
  std::vector<double> denominators;               // ln(1 + total occurrences), per term

  /// Sparse tf-idf vector of a text over the vocabulary (unknown terms ignored).
  std::map<std::size_t, double> vectorize(std::string_view text, const std::set<std::string>& stopwords) const;
};

struct TfIdfModel {
  TermStats terms;
  std::vector<std::string> op_names;
  std::vector<std::map<std::size_t, double>> op_vectors;
  std::set<std::string> stopwords;
  std::size_t k = 5;
  double min_score = 0.15;

  static TfIdfModel fit(const DocstringTable& docs, const std::vector<std::string>& op_names,
                        const std::set<std::string>& stopwords = default_stopwords());
  /// Cosine similarity of the description against every op, registry order.
  std::vector<double> scores(std::string_view description) const;

  nlohmann::json to_json() const;
  static TfIdfModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static TfIdfModel load(const std::string& path);
};

PrioritizedOps tfidf_rank(std::string_view description, const TfIdfModel& model, double multiplier = 0.75);

struct CorpusRecord {
  std::string text;
  std::vector<std::string> ops;
};

/// Reads JSON Lines `{"text":..., "ops":[...]}`. Throws UnknownOp for ops
/// outside `known`.
std::vector<CorpusRecord> load_corpus(const std::string& path, const std::set<std::string>& known);

struct NbModel {
  TermStats terms;
  std::vector<std::string> op_names;
  /// Per op: sparse N_{i,op}, total N_op.
  std::vector<std::map<std::size_t, double>> term_mass;
  std::vector<double> op_mass;
  /// Per term over all records, and grand total; for the complement class.
  std::vector<double> total_term_mass;
  double total_mass = 0;
  std::set<std::string> stopwords;
  double alpha = 0.25;
  double prior = 0.5;
  double p = 0.5;
  std::size_t k = 3;

  static NbModel fit(const TermStats& terms, const std::vector<std::string>& op_names,
                     const std::vector<CorpusRecord>& records, const std::set<std::string>& stopwords = default_stopwords());
  /// Posterior P(Y_op = 1 | D) per op, registry order.
  std::vector<double> posteriors(std::string_view description) const;

  nlohmann::json to_json() const;
  static NbModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static NbModel load(const std::string& path);
};

PrioritizedOps nb_rank(std::string_view description, const NbModel& model, double multiplier = 0.75);

/// Fits TF-IDF from docstrings and naive Bayes from one record per docstring
/// plus the corpus, with the vocabulary frozen to the docstrings.
/// Throws MissingDocstring.
std::pair<TfIdfModel, NbModel> fit_nl_models(const DocstringTable& docs, const std::vector<std::string>& op_names,
                                             const std::vector<CorpusRecord>& corpus = {});

// Wiring ------------------------------------------------------------------------------

enum class NlChoice { TfIdf, NaiveBayes, Both };

bool parse_nl_choice(std::string_view s, NlChoice& out);

/// Models used at solve time. Absent members are simply not consulted.
struct GuidanceModels {
  std::optional<TensorModelParams> tensor;
  std::optional<TfIdfModel> tfidf;
  std::optional<NbModel> nb;

  static constexpr const char* kTensorFile = "tensor_model.json";
  static constexpr const char* kTfIdfFile = "tfidf.json";
  static constexpr const char* kNbFile = "nb.json";

  /// Loads the requested models from `dir`; a requested file that is
  /// missing is an error.
  static GuidanceModels load(const std::string& dir, bool tensor, bool nl, NlChoice choice = NlChoice::TfIdf);
};

/// $TENSORSYNTH_MODELS if set, else the models/ directory of the source tree.
std::string default_models_dir();

/// Predictions of every loaded model that applies to the task, honouring the
/// disable flags in `config`. Text models need a description; the tensor
/// model needs at most 3 inputs.
std::vector<PrioritizedOps> predict_ops(const TaskSpec& task, const GuidanceModels& models, const SearchConfig& config,
                                        double multiplier = 0.75);

}  // namespace tsynth
