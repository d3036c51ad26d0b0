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


#include <algorithm>
#include <cmath>

#include "tensorsynth/guidance.hpp"

namespace tsynth {

std::string_view model_source_name(ModelSource s) {
  switch (s) {
    case ModelSource::TensorModel: return "tensor_model";
    case ModelSource::TfIdf: return "tfidf";
    case ModelSource::NaiveBayes: return "naive_bayes";
  }
  return "unknown";
}

WeightTable reweight(const WeightTable& base, const std::vector<PrioritizedOps>& predictions) {
  std::map<std::string, std::vector<double>> factors;
  for (const auto& p : predictions) {
    if (!(p.multiplier > 0 && p.multiplier <= 1)) throw std::invalid_argument("multiplier must be in (0, 1]");
    for (const auto& op : p.ops) {
      if (!base.contains(op)) throw UnknownOp(op);
      factors[op].push_back(p.multiplier);
    }
  }
  WeightTable out = base;
  for (auto& [op, fs] : factors) {
    // Sorted so the floating-point product does not depend on model order.
    std::sort(fs.begin(), fs.end());
    double w = base.at(op);
    for (double f : fs) w *= f;
    out.set(op, std::max(1, static_cast<int>(std::lround(w))));
  }
  return out;
}

}  // namespace tsynth
