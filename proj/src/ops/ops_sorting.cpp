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

// Sorting, arg-extrema, top_k and searchsorted. NaN sorts after every number
// (before, for descending order); ties keep their original order.

#include <algorithm>
#include <numeric>

#include "op_util.hpp"

namespace tsynth::detail {

namespace {

bool numeric_with_axis(Args a) {
  const Tensor* t = a[0]->tensor();
  auto axis = a[1]->primitive_int();
  return t && is_numeric(t->dtype()) && axis && normalize_axis(*axis, t->rank());
}

// Strict "a before b" for an ascending sort with NaN last.
bool ascending_before(double a, double b) {
  if (std::isnan(a)) return false;
  if (std::isnan(b)) return true;
  return a < b;
}

// For every line along `axis`, the stable sort order of its positions.
std::vector<std::int64_t> sort_order(const Tensor& t, int axis, bool descending, AxisSplit& sp) {
  sp = split_at_axis(t.shape(), axis);
  std::vector<std::int64_t> order(static_cast<std::size_t>(t.size()));
  std::vector<std::int64_t> line(static_cast<std::size_t>(sp.len));
  for (std::int64_t o = 0; o < sp.outer; ++o)
    for (std::int64_t i = 0; i < sp.inner; ++i) {
      auto at = [&](std::int64_t k) { return t.as_double((o * sp.len + k) * sp.inner + i); };
      std::iota(line.begin(), line.end(), 0);
      std::stable_sort(line.begin(), line.end(), [&](std::int64_t x, std::int64_t y) {
        return descending ? ascending_before(at(y), at(x)) : ascending_before(at(x), at(y));
      });
      for (std::int64_t k = 0; k < sp.len; ++k)
        order[static_cast<std::size_t>((o * sp.len + k) * sp.inner + i)] = line[static_cast<std::size_t>(k)];
    }
  return order;
}

// Doubles are exact for every i32 and for i64 values below 2^53; larger i64
// magnitudes fall back to exact integer comparison.
bool needs_exact_ints(const Tensor& t) {
  if (t.dtype() != DType::I64) return false;
  for (auto x : t.data<std::int64_t>())
    if (x > (std::int64_t{1} << 53) || x < -(std::int64_t{1} << 53)) return true;
  return false;
}

std::vector<std::int64_t> sort_order_exact(const Tensor& t, int axis, bool descending, AxisSplit& sp) {
  sp = split_at_axis(t.shape(), axis);
  auto d = t.data<std::int64_t>();
  std::vector<std::int64_t> order(d.size());
  std::vector<std::int64_t> line(static_cast<std::size_t>(sp.len));
  for (std::int64_t o = 0; o < sp.outer; ++o)
    for (std::int64_t i = 0; i < sp.inner; ++i) {
      auto at = [&](std::int64_t k) { return d[static_cast<std::size_t>((o * sp.len + k) * sp.inner + i)]; };
      std::iota(line.begin(), line.end(), 0);
      std::stable_sort(line.begin(), line.end(),
                       [&](std::int64_t x, std::int64_t y) { return descending ? at(y) < at(x) : at(x) < at(y); });
      for (std::int64_t k = 0; k < sp.len; ++k)
        order[static_cast<std::size_t>((o * sp.len + k) * sp.inner + i)] = line[static_cast<std::size_t>(k)];
    }
  return order;
}

std::vector<std::int64_t> order_along(const Tensor& t, int axis, bool descending, AxisSplit& sp) {
  return needs_exact_ints(t) ? sort_order_exact(t, axis, descending, sp) : sort_order(t, axis, descending, sp);
}

Expected<Payload> sort(Args a, bool descending) {
  if (!numeric_with_axis(a)) return precondition("needs a numeric tensor and an in-range axis");
  const Tensor& t = *a[0]->tensor();
  AxisSplit sp;
  auto order = order_along(t, *normalize_axis(*a[1]->primitive_int(), t.rank()), descending, sp);
  std::vector<std::int64_t> src(order.size());
  for (std::int64_t o = 0; o < sp.outer; ++o)
    for (std::int64_t k = 0; k < sp.len; ++k)
      for (std::int64_t i = 0; i < sp.inner; ++i) {
        const auto pos = static_cast<std::size_t>((o * sp.len + k) * sp.inner + i);
        src[pos] = (o * sp.len + order[pos]) * sp.inner + i;
      }
  return Payload(take_elements(t, t.shape(), src));
}

Expected<Payload> argsort(Args a, bool descending) {
  if (!numeric_with_axis(a)) return precondition("needs a numeric tensor and an in-range axis");
  const Tensor& t = *a[0]->tensor();
  AxisSplit sp;
  auto order = order_along(t, *normalize_axis(*a[1]->primitive_int(), t.rank()), descending, sp);
  std::vector<std::int32_t> r(order.begin(), order.end());
  return Payload(Tensor::from(t.shape(), std::move(r)));
}

// First index of the extreme value; NaN wins as soon as it appears.
Expected<Payload> arg_extreme(Args a, bool want_max) {
  if (!numeric_with_axis(a)) return precondition("needs a numeric tensor and an in-range axis");
  const Tensor& t = *a[0]->tensor();
  const int axis = *normalize_axis(*a[1]->primitive_int(), t.rank());
  const AxisSplit sp = split_at_axis(t.shape(), axis);
  if (sp.len == 0) return precondition("arg-extremum over an empty axis");
  const bool exact = needs_exact_ints(t);
  std::vector<std::int64_t> r(static_cast<std::size_t>(sp.outer * sp.inner));
  for (std::int64_t o = 0; o < sp.outer; ++o)
    for (std::int64_t i = 0; i < sp.inner; ++i) {
      auto flat = [&](std::int64_t k) { return (o * sp.len + k) * sp.inner + i; };
      std::int64_t best = 0;
      for (std::int64_t k = 1; k < sp.len; ++k) {
        bool better;
        if (exact) {
          const auto x = t.as_int(flat(k)), b = t.as_int(flat(best));
          better = want_max ? x > b : x < b;
        } else {
          const double x = t.as_double(flat(k)), b = t.as_double(flat(best));
          if (std::isnan(b)) break;
          better = std::isnan(x) || (want_max ? x > b : x < b);
        }
        if (better) best = k;
      }
      r[static_cast<std::size_t>(o * sp.inner + i)] = best;
    }
  std::vector<std::int64_t> dims = t.shape().to_vector();
  dims.erase(dims.begin() + axis);
  return Payload(Tensor::from(make_shape(dims), std::move(r)));
}

bool top_k_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  auto k = a[1]->primitive_int();
  return t && is_numeric(t->dtype()) && t->rank() >= 1 && k && *k >= 0 && *k <= t->shape()[t->rank() - 1];
}

Expected<Payload> top_k(Args a) {
  if (!top_k_compat(a)) return precondition("k must be within the last dimension");
  const Tensor& t = *a[0]->tensor();
  const std::int64_t k = *a[1]->primitive_int();
  AxisSplit sp;
  auto order = order_along(t, t.rank() - 1, true, sp);
  std::vector<std::int64_t> dims = t.shape().to_vector();
  dims.back() = k;
  std::vector<std::int64_t> src;
  std::vector<std::int32_t> idx;
  for (std::int64_t o = 0; o < sp.outer; ++o)
    for (std::int64_t j = 0; j < k; ++j) {
      const std::int64_t pos = order[static_cast<std::size_t>(o * sp.len + j)];
      src.push_back(o * sp.len + pos);
      idx.push_back(static_cast<std::int32_t>(pos));
    }
  const Shape out = make_shape(dims);
  Tuple tup;
  const Origin element{OriginKind::HeuristicConstant, "element"};
  tup.items.push_back(Value::leaf(take_elements(t, out, src), element, 1));
  tup.items.push_back(Value::leaf(Tensor::from(out, std::move(idx)), element, 1));
  return Payload(std::move(tup));
}

bool searchsorted_compat(Args a) {
  const Tensor* s = a[0]->tensor();
  const Tensor* v = a[1]->tensor();
  if (!s || !v || s->dtype() != v->dtype() || !is_numeric(s->dtype()) || s->rank() < 1 || s->rank() != v->rank())
    return false;
  for (int i = 0; i + 1 < s->rank(); ++i)
    if (s->shape()[i] != v->shape()[i]) return false;
  return true;
}

Expected<Payload> searchsorted_left(Args a) {
  if (!searchsorted_compat(a)) return precondition("sequence and values must agree in leading dims");
  const Tensor& s = *a[0]->tensor();
  const Tensor& v = *a[1]->tensor();
  const std::int64_t n = s.shape()[s.rank() - 1];
  const std::int64_t m = v.shape()[v.rank() - 1];
  const std::int64_t rows = m == 0 ? 0 : v.size() / m;
  std::vector<std::int32_t> r(static_cast<std::size_t>(v.size()));
  for (std::int64_t row = 0; row < rows; ++row)
    for (std::int64_t j = 0; j < m; ++j) {
      const double x = v.as_double(row * m + j);
      // Binary search for the first position whose element is not below x.
      std::int64_t lo = 0, hi = n;
      while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (s.as_double(row * n + mid) < x) {
          lo = mid + 1;
        } else {
          hi = mid;
        }
      }
      r[static_cast<std::size_t>(row * m + j)] = static_cast<std::int32_t>(lo);
    }
  return Payload(Tensor::from(v.shape(), std::move(r)));
}

constexpr CombinationFilter kAxisInRange{"numeric_axis_in_range", numeric_with_axis};

}  // namespace

void append_sorting_ops(std::vector<OpDef>& defs) {
  using F = std::array<std::string_view, kMaxArity>;
  const F num_axis{"nonscalar_numeric_tensor", "axis"};
  defs.push_back({"sort", 2, num_axis, kAxisInRange, +[](Args a) { return sort(a, false); },
                  "tf.sort({0}, axis={1})"});
  defs.push_back({"sort_desc", 2, num_axis, kAxisInRange, +[](Args a) { return sort(a, true); },
                  "tf.sort({0}, axis={1}, direction='DESCENDING')"});
  defs.push_back({"argsort_stable", 2, num_axis, kAxisInRange, +[](Args a) { return argsort(a, false); },
                  "tf.argsort({0}, axis={1}, stable=True)"});
  defs.push_back({"argsort_desc_stable", 2, num_axis, kAxisInRange, +[](Args a) { return argsort(a, true); },
                  "tf.argsort({0}, axis={1}, direction='DESCENDING', stable=True)"});
  defs.push_back({"argmax_2", 2, num_axis, kAxisInRange, +[](Args a) { return arg_extreme(a, true); },
                  "tf.argmax({0}, axis={1})"});
  defs.push_back({"argmin_2", 2, num_axis, kAxisInRange, +[](Args a) { return arg_extreme(a, false); },
                  "tf.argmin({0}, axis={1})"});
  defs.push_back({"top_k", 2, {"nonscalar_numeric_tensor", "int_primitive"}, {"k_in_range", top_k_compat}, top_k,
                  "tf.math.top_k({0}, k={1})"});
  defs.push_back({"searchsorted_left", 2, {"nonscalar_numeric_tensor", "nonscalar_numeric_tensor"},
                  {"searchsorted_dims", searchsorted_compat}, searchsorted_left,
                  "tf.searchsorted({0}, {1}, side='left')"});
}

}  // namespace tsynth::detail
