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


#include <cmath>
#include <fstream>
#include <sstream>

#include "tensorsynth/guidance.hpp"

namespace tsynth {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json matrix_json(const std::vector<float>& m, std::size_t rows, std::size_t cols) {
  json a = json::array();
  for (std::size_t r = 0; r < rows; ++r)
    a.push_back(std::vector<float>(m.begin() + static_cast<std::ptrdiff_t>(r * cols),
                                   m.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)));
  return a;
}

std::vector<float> matrix_from(const json& a, std::size_t rows, std::size_t cols, const char* what) {
  if (!a.is_array() || a.size() != rows) throw ModelFormatError(std::string(what) + ": wrong row count");
  std::vector<float> m;
  m.reserve(rows * cols);
  for (const auto& row : a) {
    if (!row.is_array() || row.size() != cols) throw ModelFormatError(std::string(what) + ": wrong column count");
    for (const auto& x : row) m.push_back(x.get<float>());
  }
  return m;
}

std::vector<float> vector_from(const json& a, std::size_t n, const char* what) {
  if (!a.is_array() || a.size() != n) throw ModelFormatError(std::string(what) + ": wrong length");
  return a.get<std::vector<float>>();
}

}  // namespace

TensorModelParams TensorModelParams::zeros(std::vector<std::string> op_names, std::size_t input_dim,
                                           std::size_t hidden_dim, FeatureConfig features) {
  TensorModelParams p;
  p.op_names = std::move(op_names);
  p.features = std::move(features);
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.hidden_w.assign(hidden_dim * input_dim, 0.0f);
  p.hidden_b.assign(hidden_dim, 0.0f);
  const std::size_t width = hidden_dim ? hidden_dim : input_dim;
  p.out_w.assign(p.op_names.size() * width, 0.0f);
  p.out_b.assign(p.op_names.size(), 0.0f);
  return p;
}

std::vector<double> TensorModelParams::logits(const std::vector<float>& x) const {
  if (x.size() != input_dim)
    throw DimensionMismatch("feature vector has length " + std::to_string(x.size()) + ", model expects " +
                            std::to_string(input_dim));
  std::vector<double> h;
  if (hidden_dim) {
    h.resize(hidden_dim);
    for (std::size_t j = 0; j < hidden_dim; ++j) {
      double s = hidden_b[j];
      const float* row = &hidden_w[j * input_dim];
      for (std::size_t i = 0; i < input_dim; ++i) s += static_cast<double>(row[i]) * x[i];
      h[j] = std::tanh(s);
    }
  } else {
    h.assign(x.begin(), x.end());
  }
  std::vector<double> out(op_names.size());
  for (std::size_t o = 0; o < out.size(); ++o) {
    double s = out_b[o];
    const float* row = &out_w[o * h.size()];
    for (std::size_t i = 0; i < h.size(); ++i) s += static_cast<double>(row[i]) * h[i];
    out[o] = s;
  }
  return out;
}

json TensorModelParams::to_json() const {
  const std::size_t width = hidden_dim ? hidden_dim : input_dim;
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "tensor_model";
  j["input_dim"] = input_dim;
  j["hidden_dim"] = hidden_dim;
  j["output_dim"] = op_names.size();
  j["threshold"] = threshold;
  j["op_names"] = op_names;
  j["features"] = features.to_json();
  if (hidden_dim) j["hidden"] = {{"w", matrix_json(hidden_w, hidden_dim, input_dim)}, {"b", hidden_b}};
  j["output"] = {{"w", matrix_json(out_w, op_names.size(), width)}, {"b", out_b}};
  return j;
}

TensorModelParams TensorModelParams::from_json(const json& j) {
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) throw ModelFormatError("unsupported format_version");
    if (j.at("kind").get<std::string>() != "tensor_model") throw ModelFormatError("not a tensor model file");
    TensorModelParams p;
    p.input_dim = j.at("input_dim").get<std::size_t>();
    p.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    p.threshold = j.at("threshold").get<double>();
    p.op_names = j.at("op_names").get<std::vector<std::string>>();
    if (j.at("output_dim").get<std::size_t>() != p.op_names.size()) throw ModelFormatError("output_dim != op count");
    p.features = FeatureConfig::from_json(j.at("features"));
    if (feature_count(p.features) != p.input_dim)
      throw ModelFormatError("input_dim does not match the feature layout");
    if (p.hidden_dim) {
      p.hidden_w = matrix_from(j.at("hidden").at("w"), p.hidden_dim, p.input_dim, "hidden.w");
      p.hidden_b = vector_from(j.at("hidden").at("b"), p.hidden_dim, "hidden.b");
    }
    const std::size_t width = p.hidden_dim ? p.hidden_dim : p.input_dim;
    p.out_w = matrix_from(j.at("output").at("w"), p.op_names.size(), width, "output.w");
    p.out_b = vector_from(j.at("output").at("b"), p.op_names.size(), "output.b");
    return p;
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("tensor model: ") + e.what());
  }
}

void TensorModelParams::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json().dump() << "\n";
}

TensorModelParams TensorModelParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ModelFormatError(path + ": " + e.what());
  }
}

PrioritizedOps tensor_model_predict(const std::vector<float>& fv, const TensorModelParams& params, double multiplier) {
  PrioritizedOps out;
  out.source = ModelSource::TensorModel;
  out.multiplier = multiplier;
  const std::vector<double> z = params.logits(fv);
  for (std::size_t o = 0; o < z.size(); ++o)
    if (1.0 / (1.0 + std::exp(-z[o])) > params.threshold) out.ops.insert(params.op_names[o]);
  return out;
}

}  // namespace tsynth
