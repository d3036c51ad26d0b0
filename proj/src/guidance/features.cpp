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


// Feature layout, per value block (three padded inputs, then the output):
//   is_dummy, kind one-hot, dtype one-hot, rank one-hot, element-count bucket,
//   first/last dim buckets, max/min/mean value buckets, element fractions,
//   unique-count bucket, boolean properties.
// Then one comparison block per input against the output, then the number of
// real inputs.

#include <algorithm>
#include <cmath>
#include <set>

#include "tensorsynth/guidance.hpp"

namespace tsynth {

using nlohmann::json;

FeatureConfig FeatureConfig::defaults() {
  FeatureConfig c;
  c.count_edges = {{-10, true}, {-1, true}, {0, true}, {3, true}, {10, true}, {50, true}, {100, true}};
  c.value_edges = {{-10, true}, {-1, true}, {0, false}, {0, true}, {1, false},
                   {3, true},   {10, true}, {50, true}, {100, true}};
  return c;
}

namespace {

json edges_json(const std::vector<BucketEdge>& edges) {
  json a = json::array();
  for (const auto& e : edges) a.push_back({{"bound", e.bound}, {"inclusive", e.inclusive}});
  return a;
}

std::vector<BucketEdge> edges_from(const json& a) {
  std::vector<BucketEdge> out;
  for (const auto& e : a) out.push_back({e.at("bound").get<double>(), e.at("inclusive").get<bool>()});
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].bound < out[i - 1].bound) throw ModelFormatError("bucket edges must be ascending");
  return out;
}

}  // namespace

json FeatureConfig::to_json() const { return {{"count_edges", edges_json(count_edges)}, {"value_edges", edges_json(value_edges)}}; }

FeatureConfig FeatureConfig::from_json(const json& j) {
  FeatureConfig c;
  c.count_edges = edges_from(j.at("count_edges"));
  c.value_edges = edges_from(j.at("value_edges"));
  return c;
}

bool operator==(const FeatureConfig& a, const FeatureConfig& b) {
  auto same = [](const std::vector<BucketEdge>& x, const std::vector<BucketEdge>& y) {
    return std::equal(x.begin(), x.end(), y.begin(), y.end(),
                      [](const BucketEdge& p, const BucketEdge& q) { return p.bound == q.bound && p.inclusive == q.inclusive; });
  };
  return same(a.count_edges, b.count_edges) && same(a.value_edges, b.value_edges);
}

int bucket_index(double x, const std::vector<BucketEdge>& edges) {
  if (std::isnan(x)) return -1;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].inclusive ? x <= edges[i].bound : x < edges[i].bound) return static_cast<int>(i);
  return static_cast<int>(edges.size());
}

namespace {

std::vector<std::string> bucket_labels(const std::vector<BucketEdge>& edges) {
  std::vector<std::string> out;
  for (const auto& e : edges) out.push_back((e.inclusive ? "le_" : "lt_") + format_double(e.bound));
  out.push_back("gt_" + (edges.empty() ? std::string("none") : format_double(edges.back().bound)));
  return out;
}

// Flat summary of one value, shared by the per-value and comparison blocks.
struct Summary {
  bool dummy = false;
  int kind = 0;    // 0 tensor, 1 primitive, 2 tuple
  int dtype = -1;  // index into DType, -1 when not applicable
  std::vector<std::int64_t> dims;
  std::vector<double> elems;
};

void append_elements(const Payload& p, Summary& s) {
  std::visit(
      [&](const auto& x) {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, PrimitiveInt>) {
          s.elems.push_back(static_cast<double>(x.value));
        } else if constexpr (std::is_same_v<X, PrimitiveFloat>) {
          s.elems.push_back(x.value);
        } else if constexpr (std::is_same_v<X, PrimitiveBool>) {
          s.elems.push_back(x.value ? 1.0 : 0.0);
        } else if constexpr (std::is_same_v<X, DTypeLiteral>) {
        } else if constexpr (std::is_same_v<X, Tuple>) {
          for (const auto& item : x.items) append_elements(item->payload(), s);
        } else {
          for (std::int64_t i = 0; i < x.size(); ++i) s.elems.push_back(x.as_double(i));
        }
      },
      p);
}

Summary summarize(const Payload& p) {
  Summary s;
  std::visit(
      [&](const auto& x) {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, Tensor>) {
          s.kind = 0;
          s.dtype = static_cast<int>(x.dtype());
          s.dims = x.shape().to_vector();
        } else if constexpr (std::is_same_v<X, Tuple>) {
          s.kind = 2;
          s.dims = {static_cast<std::int64_t>(x.items.size())};
          for (const auto& item : x.items)
            if (const Tensor* t = item->tensor()) s.dtype = static_cast<int>(t->dtype());
        } else {
          s.kind = 1;
          if constexpr (std::is_same_v<X, PrimitiveInt>) s.dtype = static_cast<int>(DType::I32);
          if constexpr (std::is_same_v<X, PrimitiveFloat>) s.dtype = static_cast<int>(DType::F32);
          if constexpr (std::is_same_v<X, PrimitiveBool>) s.dtype = static_cast<int>(DType::Bool);
        }
      },
      p);
  append_elements(p, s);
  return s;
}

Summary dummy_summary() {
  Summary s = summarize(Tensor::from(Shape{}, std::vector<std::int32_t>{0}));
  s.dummy = true;
  return s;
}

class Writer {
 public:
  Writer(const FeatureConfig& cfg, std::vector<float>* values, std::vector<std::string>* names)
      : cfg_(cfg), values_(values), names_(names) {}

  void real(const std::string& name, double x) {
    if (values_) values_->push_back(static_cast<float>(x));
    if (names_) names_->push_back(prefix_ + name);
  }
  void flag(const std::string& name, bool b) { real(name, b ? 1.0 : 0.0); }
  void one_hot(const std::string& name, const std::vector<std::string>& labels, int index) {
    for (std::size_t i = 0; i < labels.size(); ++i) flag(name + "=" + labels[i], static_cast<int>(i) == index);
  }
  // An absent statistic (empty value, NaN) leaves the whole one-hot at zero.
  void count_bucket(const std::string& name, std::optional<double> x) {
    one_hot(name, bucket_labels(cfg_.count_edges), x ? bucket_index(*x, cfg_.count_edges) : -1);
  }
  void value_bucket(const std::string& name, std::optional<double> x) {
    one_hot(name, bucket_labels(cfg_.value_edges), x ? bucket_index(*x, cfg_.value_edges) : -1);
  }
  void set_prefix(std::string p) { prefix_ = std::move(p); }

 private:
  const FeatureConfig& cfg_;
  std::vector<float>* values_;
  std::vector<std::string>* names_;
  std::string prefix_;
};

double fraction(std::size_t n, std::size_t d) { return d == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(d); }

void value_block(Writer& w, const Summary& s) {
  const auto& e = s.elems;
  const std::size_t n = e.size();
  w.flag("is_dummy", s.dummy);
  w.one_hot("kind", {"tensor", "primitive", "tuple"}, s.kind);
  w.one_hot("dtype", {"int32", "int64", "float32", "bool"}, s.dtype);
  w.one_hot("rank", {"0", "1", "2", "3", "4"}, static_cast<int>(s.dims.size()));
  w.count_bucket("num_elements", static_cast<double>(n));
  std::optional<double> first, last;
  if (!s.dims.empty()) {
    first = static_cast<double>(s.dims.front());
    last = static_cast<double>(s.dims.back());
  }
  w.count_bucket("first_dim", first);
  w.count_bucket("last_dim", last);

  std::optional<double> mx, mn, mean;
  if (n) {
    mx = *std::max_element(e.begin(), e.end());
    mn = *std::min_element(e.begin(), e.end());
    double sum = 0;
    for (double x : e) sum += x;
    mean = sum / static_cast<double>(n);
  }
  w.value_bucket("max", mx);
  w.value_bucket("min", mn);
  w.value_bucket("mean", mean);

  std::size_t zeros = 0, unit = 0, negative = 0, positive = 0, integral = 0;
  for (double x : e) {
    zeros += x == 0;
    unit += x >= 0 && x <= 1;
    negative += x < 0;
    positive += x > 0;
    integral += std::isfinite(x) && x == std::trunc(x);
  }
  const std::set<double> uniq(e.begin(), e.end());
  w.real("frac_zero", fraction(zeros, n));
  w.real("frac_in_0_1", fraction(unit, n));
  w.real("frac_unique", fraction(uniq.size(), n));
  w.real("frac_negative", fraction(negative, n));
  w.count_bucket("num_unique", static_cast<double>(uniq.size()));
  w.flag("all_positive", n && positive == n);
  w.flag("all_unique", n && uniq.size() == n);
  w.flag("sorted_asc", n > 1 && std::is_sorted(e.begin(), e.end()));
  w.flag("sorted_desc", n > 1 && std::is_sorted(e.begin(), e.end(), std::greater<>()));
  w.flag("all_integral", n && integral == n);
}

// How many elements of `a` occur somewhere in `b`.
std::size_t appearing(const std::vector<double>& a, const std::vector<double>& b) {
  const std::set<double> in_b(b.begin(), b.end());
  std::size_t c = 0;
  for (double x : a) c += in_b.count(x);
  return c;
}

bool dims_contained(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  return std::all_of(a.begin(), a.end(), [&](std::int64_t d) { return std::find(b.begin(), b.end(), d) != b.end(); });
}

int compare3(std::size_t a, std::size_t b) { return a < b ? 0 : a == b ? 1 : 2; }

void compare_block(Writer& w, const Summary& in, const Summary& out) {
  const bool real = !in.dummy;
  const std::size_t ni = in.elems.size(), no = out.elems.size();
  w.one_hot("size_cmp", {"lt", "eq", "gt"}, real ? compare3(ni, no) : -1);
  w.one_hot("rank_cmp", {"lt", "eq", "gt"}, real ? compare3(in.dims.size(), out.dims.size()) : -1);
  w.flag("same_shape", real && in.kind == out.kind && in.dims == out.dims);
  w.flag("same_dtype", real && in.dtype >= 0 && in.dtype == out.dtype);
  const std::size_t in_out = real ? appearing(in.elems, out.elems) : 0;
  const std::size_t out_in = real ? appearing(out.elems, in.elems) : 0;
  w.count_bucket("in_in_out", real ? std::optional<double>(static_cast<double>(in_out)) : std::nullopt);
  w.real("frac_in_in_out", fraction(in_out, ni));
  w.count_bucket("out_in_in", real ? std::optional<double>(static_cast<double>(out_in)) : std::nullopt);
  w.real("frac_out_in_in", fraction(out_in, no));
  w.flag("all_in_in_out", real && ni && in_out == ni);
  w.flag("all_out_in_in", real && no && out_in == no);
  w.flag("in_dims_in_out", real && dims_contained(in.dims, out.dims));
  w.flag("out_dims_in_in", real && dims_contained(out.dims, in.dims));
}

void write_features(Writer& w, const std::vector<Payload>& inputs, const Payload& output) {
  if (inputs.size() > static_cast<std::size_t>(kFeatureInputs)) throw TooManyInputs();
  std::vector<Summary> ins;
  for (const auto& p : inputs) ins.push_back(summarize(p));
  while (ins.size() < static_cast<std::size_t>(kFeatureInputs)) ins.push_back(dummy_summary());
  const Summary out = summarize(output);
  for (std::size_t i = 0; i < ins.size(); ++i) {
    w.set_prefix("in" + std::to_string(i + 1) + ".");
    value_block(w, ins[i]);
  }
  w.set_prefix("out.");
  value_block(w, out);
  for (std::size_t i = 0; i < ins.size(); ++i) {
    w.set_prefix("in" + std::to_string(i + 1) + "_vs_out.");
    compare_block(w, ins[i], out);
  }
  w.set_prefix("");
  w.real("num_inputs", static_cast<double>(inputs.size()));
}

}  // namespace

std::vector<float> featurize(const std::vector<Payload>& inputs, const Payload& output, const FeatureConfig& cfg) {
  std::vector<float> v;
  Writer w(cfg, &v, nullptr);
  write_features(w, inputs, output);
  return v;
}

std::vector<float> featurize(const TaskSpec& task, const FeatureConfig& cfg) {
  if (task.input_names.size() > static_cast<std::size_t>(kFeatureInputs)) throw TooManyInputs();
  if (task.examples.empty()) throw TaskError("task has no examples");
  return featurize(task.examples.front().inputs, task.examples.front().output, cfg);
}

std::vector<std::string> feature_names(const FeatureConfig& cfg) {
  std::vector<std::string> names;
  Writer w(cfg, nullptr, &names);
  write_features(w, {}, Tensor::from(Shape{}, std::vector<std::int32_t>{0}));
  return names;
}

std::size_t feature_count(const FeatureConfig& cfg) { return feature_names(cfg).size(); }

}  // namespace tsynth
