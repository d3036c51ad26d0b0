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
#include <cstdio>
#include <numeric>

#include "tensorsynth/learning.hpp"

namespace tsynth {

std::string_view loss_kind_name(LossKind k) {
  switch (k) {
    case LossKind::CrossEntropy: return "ce";
    case LossKind::F1: return "f1";
    case LossKind::F2: return "f2";
  }
  return "ce";
}

std::string_view weighting_name(Weighting w) {
  switch (w) {
    case Weighting::None: return "none";
    case Weighting::WMax: return "wmax";
    case Weighting::WMean: return "wmean";
  }
  return "none";
}

bool parse_loss_kind(std::string_view s, LossKind& out) {
  for (LossKind k : {LossKind::CrossEntropy, LossKind::F1, LossKind::F2})
    if (s == loss_kind_name(k)) return out = k, true;
  return false;
}

bool parse_weighting(std::string_view s, Weighting& out) {
  for (Weighting w : {Weighting::None, Weighting::WMax, Weighting::WMean})
    if (s == weighting_name(w)) return out = w, true;
  return false;
}

double example_weight(const std::string& op, Weighting scheme, const std::map<std::string, std::size_t>& counts,
                      double clip) {
  auto it = counts.find(op);
  if (it == counts.end()) throw UnknownOp(op);
  if (it->second == 0) throw std::invalid_argument("count for " + op + " must be positive");
  double w = 1;
  const auto mine = static_cast<double>(it->second);
  if (scheme == Weighting::WMax) {
    std::size_t mx = 0;
    for (const auto& [name, c] : counts) mx = std::max(mx, c);
    w = static_cast<double>(mx) / mine;
  } else if (scheme == Weighting::WMean) {
    double sum = 0;
    for (const auto& [name, c] : counts) sum += static_cast<double>(c);
    w = sum / static_cast<double>(counts.size()) / mine;
  }
  return std::min(w, clip);
}

// Losses --------------------------------------------------------------------------

LossResult cross_entropy_loss(const std::vector<double>& logits, const std::vector<double>& labels,
                              const std::vector<double>& weights) {
  const std::size_t n = logits.size();
  LossResult r;
  r.grad.assign(n, 0.0);
  if (n == 0) return r;
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double z = logits[j];
    // -y log s(z) - (1-y) log(1-s(z)) = softplus(z) - y z, computed stably.
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    const double p = 1.0 / (1.0 + std::exp(-z));
    r.loss += weights[j] * (softplus - labels[j] * z) * inv;
    r.grad[j] = weights[j] * (p - labels[j]) * inv;
  }
  return r;
}

LossResult fbeta_loss(const std::vector<double>& probs, const std::vector<double>& labels, double beta,
                      const std::vector<double>& weights) {
  const std::size_t n = probs.size();
  LossResult r;
  r.grad.assign(n, 0.0);
  const bool all_zero = std::all_of(probs.begin(), probs.end(), [](double p) { return p == 0; }) &&
                        std::all_of(labels.begin(), labels.end(), [](double y) { return y == 0; });
  if (all_zero) {
    r.degenerate = true;
    return r;
  }
  const double b2 = beta * beta;
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t j = 0; j < n; ++j) {
    tp += weights[j] * probs[j] * labels[j];
    fp += weights[j] * probs[j] * (1 - labels[j]);
    fn += weights[j] * (1 - probs[j]) * labels[j];
  }
  const double a = (1 + b2) * tp;
  const double d = a + b2 * fn + fp + kFbetaEpsilon;
  r.loss = 1 - a / d;
  for (std::size_t j = 0; j < n; ++j) {
    const double da = (1 + b2) * weights[j] * labels[j];
    const double dd = (1 + b2) * weights[j] * labels[j] - b2 * weights[j] * labels[j] + weights[j] * (1 - labels[j]);
    r.grad[j] = -(da * d - a * dd) / (d * d);
  }
  return r;
}

// Training ------------------------------------------------------------------------

bool is_eval_example(const DatasetExample& ex, int eval_percent) {
  // FNV-1a over the serialized example.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : ex.to_json().dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return static_cast<int>(h % 100) < eval_percent;
}

std::string TrainReport::csv() const {
  std::string s = "epoch,train_loss,eval_loss\n";
  char buf[96];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g\n", e.epoch, e.train_loss, e.eval_loss);
    s += buf;
  }
  return s;
}

namespace {

struct Sample {
  std::vector<float> x;
  std::vector<std::size_t> nonzero;
  std::vector<double> y;
  std::vector<double> w;
};

class Trainer {
 public:
  Trainer(TensorModelParams& p, const TrainConfig& cfg) : p_(p), cfg_(cfg) {}

  // Loss of one sample; fills dL/dlogits when `grad` is non-null.
  double loss(const Sample& s, std::vector<double>* hidden, std::vector<double>* grad) const {
    const std::vector<double> z = forward(s, hidden);
    LossResult r;
    if (cfg_.loss == LossKind::CrossEntropy) {
      r = cross_entropy_loss(z, s.y, s.w);
    } else {
      std::vector<double> prob(z.size());
      for (std::size_t j = 0; j < z.size(); ++j) prob[j] = 1.0 / (1.0 + std::exp(-z[j]));
      r = fbeta_loss(prob, s.y, cfg_.loss == LossKind::F2 ? 2.0 : 1.0, s.w);
      for (std::size_t j = 0; j < z.size(); ++j) r.grad[j] *= prob[j] * (1 - prob[j]);
    }
    if (grad) *grad = std::move(r.grad);
    return r.loss;
  }

  double mean_loss(const std::vector<Sample>& data) const {
    if (data.empty()) return std::nan("");
    double total = 0;
    std::vector<double> h;
    for (const auto& s : data) total += loss(s, &h, nullptr);
    return total / static_cast<double>(data.size());
  }

  void step(const std::vector<Sample>& data, const std::vector<std::size_t>& batch) {
    const std::size_t ops = p_.op_names.size();
    const std::size_t in = p_.input_dim;
    const std::size_t hd = p_.hidden_dim;
    const std::size_t width = hd ? hd : in;
    g_out_w_.assign(ops * width, 0.0);
    g_out_b_.assign(ops, 0.0);
    if (hd) {
      g_hid_w_.assign(hd * in, 0.0);
      g_hid_b_.assign(hd, 0.0);
    }
    const double scale = 1.0 / static_cast<double>(batch.size());
    std::vector<double> h, g, gh;
    for (std::size_t idx : batch) {
      const Sample& s = data[idx];
      loss(s, &h, &g);
      for (std::size_t o = 0; o < ops; ++o) {
        const double go = g[o] * scale;
        if (go == 0) continue;
        g_out_b_[o] += go;
        double* row = &g_out_w_[o * width];
        if (hd) {
          for (std::size_t k = 0; k < hd; ++k) row[k] += go * h[k];
        } else {
          for (std::size_t i : s.nonzero) row[i] += go * s.x[i];
        }
      }
      if (hd) {
        gh.assign(hd, 0.0);
        for (std::size_t o = 0; o < ops; ++o) {
          const double go = g[o] * scale;
          if (go == 0) continue;
          const float* row = &p_.out_w[o * hd];
          for (std::size_t k = 0; k < hd; ++k) gh[k] += go * row[k];
        }
        for (std::size_t k = 0; k < hd; ++k) {
          const double ga = gh[k] * (1 - h[k] * h[k]);
          g_hid_b_[k] += ga;
          double* row = &g_hid_w_[k * in];
          for (std::size_t i : s.nonzero) row[i] += ga * s.x[i];
        }
      }
    }
    const double lr = cfg_.learning_rate;
    for (std::size_t i = 0; i < g_out_w_.size(); ++i) p_.out_w[i] -= static_cast<float>(lr * g_out_w_[i]);
    for (std::size_t i = 0; i < g_out_b_.size(); ++i) p_.out_b[i] -= static_cast<float>(lr * g_out_b_[i]);
    for (std::size_t i = 0; i < g_hid_w_.size(); ++i) p_.hidden_w[i] -= static_cast<float>(lr * g_hid_w_[i]);
    for (std::size_t i = 0; i < g_hid_b_.size(); ++i) p_.hidden_b[i] -= static_cast<float>(lr * g_hid_b_[i]);
  }

 private:
  std::vector<double> forward(const Sample& s, std::vector<double>* hidden) const {
    const std::size_t ops = p_.op_names.size();
    const std::size_t hd = p_.hidden_dim;
    std::vector<double> z(ops);
    if (hd) {
      hidden->assign(hd, 0.0);
      for (std::size_t k = 0; k < hd; ++k) {
        double a = p_.hidden_b[k];
        const float* row = &p_.hidden_w[k * p_.input_dim];
        for (std::size_t i : s.nonzero) a += static_cast<double>(row[i]) * s.x[i];
        (*hidden)[k] = std::tanh(a);
      }
      for (std::size_t o = 0; o < ops; ++o) {
        double a = p_.out_b[o];
        const float* row = &p_.out_w[o * hd];
        for (std::size_t k = 0; k < hd; ++k) a += static_cast<double>(row[k]) * (*hidden)[k];
        z[o] = a;
      }
    } else {
      for (std::size_t o = 0; o < ops; ++o) {
        double a = p_.out_b[o];
        const float* row = &p_.out_w[o * p_.input_dim];
        for (std::size_t i : s.nonzero) a += static_cast<double>(row[i]) * s.x[i];
        z[o] = a;
      }
    }
    return z;
  }

  TensorModelParams& p_;
  const TrainConfig& cfg_;
  std::vector<double> g_out_w_, g_out_b_, g_hid_w_, g_hid_b_;
};

}  // namespace

TensorModelParams train_tensor_model(const std::vector<DatasetExample>& data, const std::vector<std::string>& op_names,
                                     const TrainConfig& cfg, TrainReport* report) {
  if (data.empty()) throw EmptyDataset();
  if (cfg.batch_size == 0 || cfg.epochs < 0) throw std::invalid_argument("batch size must be positive");
  const FeatureConfig features = FeatureConfig::defaults();
  std::map<std::string, std::size_t> op_index;
  for (std::size_t o = 0; o < op_names.size(); ++o) op_index[op_names[o]] = o;

  std::vector<Sample> train, eval;
  for (const auto& ex : data) {
    Sample s;
    s.x = featurize(ex.inputs, ex.output, features);
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (s.x[i] != 0) s.nonzero.push_back(i);
    s.y.assign(op_names.size(), 0.0);
    for (const auto& op : ex.ops_used) {
      auto it = op_index.find(op);
      if (it == op_index.end()) throw UnknownOp(op);
      s.y[it->second] = 1.0;
    }
    (is_eval_example(ex, cfg.eval_percent) ? eval : train).push_back(std::move(s));
  }
  if (train.empty()) throw EmptyDataset();

  // Positive-example weights from how often each op is used in training data.
  std::map<std::string, std::size_t> counts;
  for (const auto& s : train)
    for (std::size_t o = 0; o < op_names.size(); ++o)
      if (s.y[o] != 0) ++counts[op_names[o]];
  std::vector<double> pos_weight(op_names.size(), 1.0);
  for (std::size_t o = 0; o < op_names.size(); ++o)
    if (counts.count(op_names[o])) pos_weight[o] = example_weight(op_names[o], cfg.weighting, counts, cfg.clip);
  for (auto* set : {&train, &eval})
    for (auto& s : *set) {
      s.w.assign(op_names.size(), 1.0);
      for (std::size_t o = 0; o < op_names.size(); ++o)
        if (s.y[o] != 0) s.w[o] = pos_weight[o];
    }

  std::mt19937_64 rng(cfg.rng_seed);
  TensorModelParams params = TensorModelParams::zeros(op_names, feature_count(features), cfg.hidden_dim, features);
  if (cfg.hidden_dim) {
    const double a = std::sqrt(6.0 / static_cast<double>(params.input_dim + cfg.hidden_dim));
    std::uniform_real_distribution<double> u(-a, a);
    for (auto& w : params.hidden_w) w = static_cast<float>(u(rng));
    for (auto& w : params.out_w) w = static_cast<float>(u(rng) * 0.1);
  }

  TrainReport rep;
  rep.train_examples = train.size();
  rep.eval_examples = eval.size();
  {
    TensorModelParams zero = TensorModelParams::zeros(op_names, params.input_dim, 0, features);
    Trainer zt(zero, cfg);
    rep.zero_train_loss = zt.mean_loss(train);
    rep.zero_eval_loss = zt.mean_loss(eval);
  }
  Trainer t(params, cfg);
  rep.epochs.push_back({0, t.mean_loss(train), t.mean_loss(eval)});
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(b),
                                           order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), b + cfg.batch_size)));
      t.step(train, batch);
    }
    rep.epochs.push_back({epoch, t.mean_loss(train), t.mean_loss(eval)});
  }
  if (report) *report = std::move(rep);
  return params;
}

}  // namespace tsynth
