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

// Helpers shared by the operation families. Every executor validates its own
// preconditions with these; the filters in filters.cpp call the same checks
// so that a filter never rejects an argument list the executor would accept.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "tensorsynth/ops.hpp"

namespace tsynth::detail {

using Args = std::span<const ValuePtr>;

inline const Tensor* tensor_arg(const Value& v) { return v.tensor(); }
inline std::optional<std::int64_t> int_arg(const Value& v) { return v.primitive_int(); }

inline bool is_numeric_tensor(const Value& v) {
  const Tensor* t = v.tensor();
  return t && is_numeric(t->dtype());
}
inline bool is_int_tensor(const Value& v) {
  const Tensor* t = v.tensor();
  return t && is_integer(t->dtype());
}

/// Normalizes axis into [0, rank) or returns nullopt.
inline std::optional<int> normalize_axis(std::int64_t axis, int rank) {
  if (axis < -rank || axis >= rank) return std::nullopt;
  return static_cast<int>(axis < 0 ? axis + rank : axis);
}

/// Axis filter range: small integers usable as an axis of a rank<=4 tensor.
inline bool is_axis_literal(const Value& v) {
  auto a = v.primitive_int();
  return a && *a >= -4 && *a <= 4;
}

/// Values usable as a list of non-negative dims: tuple of ints, 1-D int
/// tensor, or a single non-negative int.
std::optional<std::vector<std::int64_t>> int_list(const Value& v);

/// A scalar integer: primitive int or rank-0 integer tensor.
std::optional<std::int64_t> scalar_int(const Value& v);

/// Checks raw output dims against the limits before allocating.
inline std::optional<OpError> check_output_dims(std::span<const std::int64_t> dims) {
  for (auto d : dims)
    if (d < 0) return precondition("negative dimension");
  if (!shape_within_limits(dims)) return limit_exceeded("result exceeds size limits");
  return std::nullopt;
}

inline Shape make_shape(std::span<const std::int64_t> dims) { return Shape(dims); }

// Overflow-checked integer arithmetic. Returns false on overflow.
template <typename T>
bool checked_add(T a, T b, T& out) {
  if constexpr (std::is_integral_v<T>) return !__builtin_add_overflow(a, b, &out);
  out = a + b;
  return true;
}
template <typename T>
bool checked_sub(T a, T b, T& out) {
  if constexpr (std::is_integral_v<T>) return !__builtin_sub_overflow(a, b, &out);
  out = a - b;
  return true;
}
template <typename T>
bool checked_mul(T a, T b, T& out) {
  if constexpr (std::is_integral_v<T>) return !__builtin_mul_overflow(a, b, &out);
  out = a * b;
  return true;
}

/// Iterates the broadcast of two shapes; calls fn(out_index, a_index, b_index).
template <typename Fn>
void broadcast_for_each(const Shape& out, const Shape& a, const Shape& b, Fn&& fn) {
  const int rank = out.rank();
  std::array<std::int64_t, Shape::kMaxRank> sa{}, sb{}, idx{};
  auto stride_of = [rank](const Shape& s, std::array<std::int64_t, Shape::kMaxRank>& st) {
    std::int64_t acc = 1;
    for (int i = s.rank() - 1; i >= 0; --i) {
      const int o = rank - s.rank() + i;
      st[static_cast<std::size_t>(o)] = s[i] == 1 ? 0 : acc;
      acc *= s[i];
    }
  };
  stride_of(a, sa);
  stride_of(b, sb);
  const std::int64_t n = out.num_elements();
  std::int64_t ia = 0, ib = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    fn(k, ia, ib);
    for (int d = rank - 1; d >= 0; --d) {
      const auto ud = static_cast<std::size_t>(d);
      ++idx[ud];
      ia += sa[ud];
      ib += sb[ud];
      if (idx[ud] < out[d]) break;
      ia -= sa[ud] * idx[ud];
      ib -= sb[ud] * idx[ud];
      idx[ud] = 0;
    }
  }
}

/// Maps a broadcast output index to the flat index in an operand shape.
inline std::int64_t broadcast_source_index(std::int64_t flat, const Shape& out, const Shape& src) {
  std::int64_t result = 0, stride = 1;
  for (int i = out.rank() - 1, j = src.rank() - 1; i >= 0; --i, --j) {
    const std::int64_t coord = flat % out[i];
    flat /= out[i];
    if (j >= 0) {
      if (src[j] != 1) result += coord * stride;
      stride *= src[j];
    }
  }
  return result;
}

/// Splits a shape around `axis` into outer * len * inner.
struct AxisSplit {
  std::int64_t outer = 1, len = 1, inner = 1;
};
inline AxisSplit split_at_axis(const Shape& s, int axis) {
  AxisSplit r;
  for (int i = 0; i < axis; ++i) r.outer *= s[i];
  r.len = s[axis];
  for (int i = axis + 1; i < s.rank(); ++i) r.inner *= s[i];
  return r;
}

/// Copies element j of `src` (same dtype) to element i of `dst`.
inline void copy_element(const Tensor& src, std::int64_t j, Tensor::Buffer& dst, std::int64_t i) {
  std::visit(
      [&](auto& d) {
        using T = typename std::decay_t<decltype(d)>::value_type;
        d[static_cast<std::size_t>(i)] = src.data<T>()[static_cast<std::size_t>(j)];
      },
      dst);
}

inline Tensor::Buffer make_buffer(DType dt, std::int64_t n) {
  return dispatch_dtype(dt, [n](auto tag) {
    using T = typename decltype(tag)::type;
    return Tensor::Buffer(std::vector<T>(static_cast<std::size_t>(n)));
  });
}

/// Gathers elements of `src` at the given flat indices into a new tensor.
Tensor take_elements(const Tensor& src, const Shape& out_shape, std::span<const std::int64_t> flat_indices);

// Registration hooks, one per family, appended in registry order.
void append_elementwise_ops(std::vector<OpDef>& defs);
void append_reduction_ops(std::vector<OpDef>& defs);
void append_shape_ops(std::vector<OpDef>& defs);
void append_indexing_ops(std::vector<OpDef>& defs);
void append_python_ops(std::vector<OpDef>& defs);
void append_sorting_ops(std::vector<OpDef>& defs);
void append_construction_ops(std::vector<OpDef>& defs);
void append_segment_ops(std::vector<OpDef>& defs);

}  // namespace tsynth::detail
