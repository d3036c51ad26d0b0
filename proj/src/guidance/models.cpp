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


#include <cstdlib>
#include <filesystem>

#include "tensorsynth/guidance.hpp"

namespace tsynth {

bool parse_nl_choice(std::string_view s, NlChoice& out) {
  if (s == "tfidf") return out = NlChoice::TfIdf, true;
  if (s == "nb") return out = NlChoice::NaiveBayes, true;
  if (s == "both") return out = NlChoice::Both, true;
  return false;
}

GuidanceModels GuidanceModels::load(const std::string& dir, bool tensor, bool nl, NlChoice choice) {
  namespace fs = std::filesystem;
  auto path = [&](const char* file) {
    const fs::path p = fs::path(dir) / file;
    if (!fs::exists(p)) throw std::runtime_error("model file not found: " + p.string());
    return p.string();
  };
  GuidanceModels m;
  if (tensor) m.tensor = TensorModelParams::load(path(kTensorFile));
  if (nl && choice != NlChoice::NaiveBayes) m.tfidf = TfIdfModel::load(path(kTfIdfFile));
  if (nl && choice != NlChoice::TfIdf) m.nb = NbModel::load(path(kNbFile));
  return m;
}

std::string default_models_dir() {
  if (const char* env = std::getenv("TENSORSYNTH_MODELS"); env && *env) return env;
  return std::string(TS_SOURCE_DIR) + "/models";
}

std::vector<PrioritizedOps> predict_ops(const TaskSpec& task, const GuidanceModels& models, const SearchConfig& config,
                                        double multiplier) {
  std::vector<PrioritizedOps> out;
  if (!config.disable_tensor_model && models.tensor && !task.examples.empty() &&
      task.input_names.size() <= static_cast<std::size_t>(kFeatureInputs))
    out.push_back(tensor_model_predict(featurize(task, models.tensor->features), *models.tensor, multiplier));
  if (!config.disable_nl_model && !task.description.empty()) {
    if (models.tfidf) out.push_back(tfidf_rank(task.description, *models.tfidf, multiplier));
    if (models.nb) out.push_back(nb_rank(task.description, *models.nb, multiplier));
  }
  return out;
}

}  // namespace tsynth
