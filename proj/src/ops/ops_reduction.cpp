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

// Reductions over all elements or along one axis, plus cumsum.

#include "op_util.hpp"

namespace tsynth::detail {

namespace {

enum class Reduce { Sum, Max, Min, Mean };

bool numeric_with_axis(Args a) {
  const Tensor* t = a[0]->tensor();
  auto axis = a[1]->primitive_int();
  return t && is_numeric(t->dtype()) && axis && normalize_axis(*axis, t->rank());
}

bool bool_with_axis(Args a) {
  const Tensor* t = a[0]->tensor();
  auto axis = a[1]->primitive_int();
  return t && t->dtype() == DType::Bool && axis && normalize_axis(*axis, t->rank());
}

bool tensor_with_axis(Args a) {
  const Tensor* t = a[0]->tensor();
  auto axis = a[1]->primitive_int();
  return t && axis && normalize_axis(*axis, t->rank());
}

// Reduces `t` viewed as [outer, len, inner] along the middle dimension.
Expected<Payload> reduce(const Tensor& t, Reduce kind, const AxisSplit& sp, Shape out) {
  if (sp.len == 0 && kind != Reduce::Sum) return precondition("reduction over an empty axis");
  return dispatch_dtype(t.dtype(), [&](auto tag) -> Expected<Payload> {
    using T = typename decltype(tag)::type;
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      return precondition("boolean operand");
    } else {
      auto d = t.data<T>();
      std::vector<T> r(static_cast<std::size_t>(sp.outer * sp.inner));
      for (std::int64_t o = 0; o < sp.outer; ++o) {
        for (std::int64_t i = 0; i < sp.inner; ++i) {
          auto at = [&](std::int64_t k) { return d[static_cast<std::size_t>((o * sp.len + k) * sp.inner + i)]; };
          T acc = kind == Reduce::Sum || kind == Reduce::Mean ? T(0) : at(0);
          for (std::int64_t k = 0; k < sp.len; ++k) {
            const T x = at(k);
            switch (kind) {
              case Reduce::Sum:
              case Reduce::Mean:
                if (!checked_add(acc, x, acc)) return numeric_error("integer overflow");
                break;
              case Reduce::Max:
                if constexpr (std::is_floating_point_v<T>) {
                  if (std::isnan(x) || std::isnan(acc)) {
                    acc = std::numeric_limits<T>::quiet_NaN();
                    break;
                  }
                }
                if (x > acc) acc = x;
                break;
              case Reduce::Min:
                if constexpr (std::is_floating_point_v<T>) {
                  if (std::isnan(x) || std::isnan(acc)) {
                    acc = std::numeric_limits<T>::quiet_NaN();
                    break;
                  }
                }
                if (x < acc) acc = x;
                break;
            }
          }
          if (kind == Reduce::Mean) acc = static_cast<T>(acc / static_cast<T>(sp.len));
          r[static_cast<std::size_t>(o * sp.inner + i)] = acc;
        }
      }
      return Payload(Tensor::from(out, std::move(r)));
    }
  });
}

Expected<Payload> reduce_all(Args a, Reduce kind) {
  if (!is_numeric_tensor(*a[0])) return precondition("operand must be a numeric tensor");
  const Tensor& t = *a[0]->tensor();
  return reduce(t, kind, AxisSplit{1, t.size(), 1}, Shape{});
}

Shape drop_axis(const Shape& s, int axis) {
  Shape out;
  for (int i = 0; i < s.rank(); ++i)
    if (i != axis) out.push_back(s[i]);
  return out;
}

Expected<Payload> reduce_axis(Args a, Reduce kind) {
  if (!numeric_with_axis(a)) return precondition("needs a numeric tensor and an in-range axis");
  const Tensor& t = *a[0]->tensor();
  const int axis = *normalize_axis(*a[1]->primitive_int(), t.rank());
  return reduce(t, kind, split_at_axis(t.shape(), axis), drop_axis(t.shape(), axis));
}

Expected<Payload> reduce_any_axis(Args a) {
  if (!bool_with_axis(a)) return precondition("needs a bool tensor and an in-range axis");
  const Tensor& t = *a[0]->tensor();
  const int axis = *normalize_axis(*a[1]->primitive_int(), t.rank());
  const AxisSplit sp = split_at_axis(t.shape(), axis);
  auto d = t.data<std::uint8_t>();
  std::vector<std::uint8_t> r(static_cast<std::size_t>(sp.outer * sp.inner), 0);
  for (std::int64_t o = 0; o < sp.outer; ++o)
    for (std::int64_t k = 0; k < sp.len; ++k)
      for (std::int64_t i = 0; i < sp.inner; ++i)
        if (d[static_cast<std::size_t>((o * sp.len + k) * sp.inner + i)]) r[static_cast<std::size_t>(o * sp.inner + i)] = 1;
  return Payload(Tensor::from(drop_axis(t.shape(), axis), std::move(r)));
}

Expected<Payload> count_nonzero(const Tensor& t, const AxisSplit& sp, Shape out) {
  std::vector<std::int64_t> r(static_cast<std::size_t>(sp.outer * sp.inner), 0);
  for (std::int64_t o = 0; o < sp.outer; ++o)
    for (std::int64_t k = 0; k < sp.len; ++k)
      for (std::int64_t i = 0; i < sp.inner; ++i)
        if (t.as_double((o * sp.len + k) * sp.inner + i) != 0.0) ++r[static_cast<std::size_t>(o * sp.inner + i)];
  return Payload(Tensor::from(out, std::move(r)));
}

Expected<Payload> cumsum(Args a) {
  if (!numeric_with_axis(a)) return precondition("needs a numeric tensor and an in-range axis");
  const Tensor& t = *a[0]->tensor();
  const int axis = *normalize_axis(*a[1]->primitive_int(), t.rank());
  const AxisSplit sp = split_at_axis(t.shape(), axis);
  return dispatch_dtype(t.dtype(), [&](auto tag) -> Expected<Payload> {
    using T = typename decltype(tag)::type;
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      return precondition("boolean operand");
    } else {
      auto d = t.data<T>();
      std::vector<T> r(d.size());
      for (std::int64_t o = 0; o < sp.outer; ++o)
        for (std::int64_t i = 0; i < sp.inner; ++i) {
          T acc = 0;
          for (std::int64_t k = 0; k < sp.len; ++k) {
            const auto idx = static_cast<std::size_t>((o * sp.len + k) * sp.inner + i);
            if (!checked_add(acc, d[idx], acc)) return numeric_error("integer overflow");
            r[idx] = acc;
          }
        }
      return Payload(Tensor::from(t.shape(), std::move(r)));
    }
  });
}

constexpr CombinationFilter kAxisInRange{"numeric_axis_in_range", numeric_with_axis};

}  // namespace

void append_reduction_ops(std::vector<OpDef>& defs) {
  using F = std::array<std::string_view, kMaxArity>;
  const F num1{"numeric_tensor"};
  const F num_axis{"nonscalar_numeric_tensor", "axis"};
  defs.push_back({"reduce_sum", 1, num1, {}, +[](Args a) { return reduce_all(a, Reduce::Sum); },
                  "tf.reduce_sum({0})"});
  defs.push_back({"reduce_sum_axis", 2, num_axis, kAxisInRange,
                  +[](Args a) { return reduce_axis(a, Reduce::Sum); }, "tf.reduce_sum({0}, axis={1})"});
  defs.push_back({"reduce_max", 1, num1, {}, +[](Args a) { return reduce_all(a, Reduce::Max); },
                  "tf.reduce_max({0})"});
  defs.push_back({"reduce_max_axis", 2, num_axis, kAxisInRange,
                  +[](Args a) { return reduce_axis(a, Reduce::Max); }, "tf.reduce_max({0}, axis={1})"});
  defs.push_back({"reduce_min", 1, num1, {}, +[](Args a) { return reduce_all(a, Reduce::Min); },
                  "tf.reduce_min({0})"});
  defs.push_back({"reduce_min_axis", 2, num_axis, kAxisInRange,
                  +[](Args a) { return reduce_axis(a, Reduce::Min); }, "tf.reduce_min({0}, axis={1})"});
  defs.push_back({"reduce_mean", 1, num1, {}, +[](Args a) { return reduce_all(a, Reduce::Mean); },
                  "tf.reduce_mean({0})"});
  defs.push_back({"reduce_mean_axis", 2, num_axis, kAxisInRange,
                  +[](Args a) { return reduce_axis(a, Reduce::Mean); }, "tf.reduce_mean({0}, axis={1})"});
  defs.push_back({"reduce_any_axis", 2, {"nonscalar_bool_tensor", "axis"}, {"bool_axis_in_range", bool_with_axis},
                  reduce_any_axis, "tf.reduce_any({0}, axis={1})"});
  defs.push_back({"count_nonzero", 1, {"tensor"}, {},
                  +[](Args a) -> Expected<Payload> {
                    const Tensor* t = a[0]->tensor();
                    if (!t) return precondition("operand must be a tensor");
                    return count_nonzero(*t, AxisSplit{1, t->size(), 1}, Shape{});
                  },
                  "tf.math.count_nonzero({0})"});
  defs.push_back({"count_nonzero_axis", 2, {"nonscalar_tensor", "axis"}, {"axis_in_range", tensor_with_axis},
                  +[](Args a) -> Expected<Payload> {
                    if (!tensor_with_axis(a)) return precondition("needs a tensor and an in-range axis");
                    const Tensor& t = *a[0]->tensor();
                    const int axis = *normalize_axis(*a[1]->primitive_int(), t.rank());
                    return count_nonzero(t, split_at_axis(t.shape(), axis), drop_axis(t.shape(), axis));
                  },
                  "tf.math.count_nonzero({0}, axis={1})"});
  defs.push_back({"cumsum", 2, num_axis, kAxisInRange, cumsum, "tf.math.cumsum({0}, axis={1})"});
}

}  // namespace tsynth::detail
