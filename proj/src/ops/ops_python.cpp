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

// Python syntax: subscripting, slicing and tuple construction.

#include <algorithm>

#include "op_util.hpp"

namespace tsynth::detail {

namespace {

// Python index normalization; nullopt when out of range.
std::optional<std::int64_t> py_index(std::int64_t i, std::int64_t n) {
  if (i < -n || i >= n) return std::nullopt;
  return i < 0 ? i + n : i;
}

// Python slice bound clamping for a step of 1.
std::int64_t py_bound(std::int64_t i, std::int64_t n) {
  if (i < 0) i += n;
  return std::clamp<std::int64_t>(i, 0, n);
}

// Elements [begin, end) along `axis`, everything else kept.
Tensor slice_axis(const Tensor& t, int axis, std::int64_t begin, std::int64_t end, bool keep_axis) {
  const AxisSplit sp = split_at_axis(t.shape(), axis);
  const std::int64_t len = std::max<std::int64_t>(0, end - begin);
  std::vector<std::int64_t> dims = t.shape().to_vector();
  if (keep_axis) {
    dims[static_cast<std::size_t>(axis)] = len;
  } else {
    dims.erase(dims.begin() + axis);
  }
  std::vector<std::int64_t> idx;
  idx.reserve(static_cast<std::size_t>(sp.outer * len * sp.inner));
  for (std::int64_t o = 0; o < sp.outer; ++o)
    for (std::int64_t k = begin; k < begin + len; ++k)
      for (std::int64_t i = 0; i < sp.inner; ++i) idx.push_back((o * sp.len + k) * sp.inner + i);
  return take_elements(t, make_shape(dims), idx);
}

std::int64_t sequence_length(const Value& v) {
  if (const Tuple* t = v.tuple()) return static_cast<std::int64_t>(t->items.size());
  if (const Tensor* t = v.tensor(); t && t->rank() >= 1) return t->shape()[0];
  return -1;
}

bool indexing_compat(Args a) {
  auto i = a[1]->primitive_int();
  const std::int64_t n = sequence_length(*a[0]);
  return i && n >= 0 && py_index(*i, n);
}

Expected<Payload> indexing(Args a) {
  if (!indexing_compat(a)) return precondition("index out of range");
  const std::int64_t i = *py_index(*a[1]->primitive_int(), sequence_length(*a[0]));
  if (const Tuple* t = a[0]->tuple()) return t->items[static_cast<std::size_t>(i)]->payload();
  return Payload(slice_axis(*a[0]->tensor(), 0, i, i + 1, false));
}

bool indexing_axis1_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  auto i = a[1]->primitive_int();
  return t && i && t->rank() >= 2 && py_index(*i, t->shape()[1]);
}

Expected<Payload> indexing_axis1(Args a) {
  if (!indexing_axis1_compat(a)) return precondition("index out of range");
  const Tensor& t = *a[0]->tensor();
  const std::int64_t i = *py_index(*a[1]->primitive_int(), t.shape()[1]);
  return Payload(slice_axis(t, 1, i, i + 1, false));
}

enum class ItemKind { Int, Tensor, IntTuple, Other };

ItemKind item_kind(const Value& v) {
  if (v.primitive_int()) return ItemKind::Int;
  if (v.is_tensor()) return ItemKind::Tensor;
  if (const Tuple* t = v.tuple())
    if (std::all_of(t->items.begin(), t->items.end(), [](const ValuePtr& x) { return x->primitive_int().has_value(); }))
      return ItemKind::IntTuple;
  return ItemKind::Other;
}

// Tuples are homogeneous: all ints, all tensors, or all int tuples.
bool homogeneous(Args a) {
  const ItemKind k = item_kind(*a[0]);
  if (k == ItemKind::Other) return false;
  return std::all_of(a.begin(), a.end(), [k](const ValuePtr& v) { return item_kind(*v) == k; });
}

Expected<Payload> make_tuple(Args a) {
  if (!homogeneous(a)) return precondition("tuple members must be all ints, all tensors or all int tuples");
  return Payload(Tuple{std::vector<ValuePtr>(a.begin(), a.end())});
}

enum class Bounds { Both, Left, Right };

template <int Axis, Bounds B>
bool slicing_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  if (!t || t->rank() < Axis + 1) return false;
  if (!a[1]->primitive_int()) return false;
  if constexpr (B == Bounds::Both) return a[2]->primitive_int().has_value();
  return true;
}

template <int Axis, Bounds B>
Expected<Payload> slicing(Args a) {
  if (!slicing_compat<Axis, B>(a)) return precondition("slicing needs a tensor of sufficient rank and int bounds");
  const Tensor& t = *a[0]->tensor();
  const std::int64_t n = t.shape()[Axis];
  std::int64_t begin = 0, end = n;
  if constexpr (B == Bounds::Both) {
    begin = py_bound(*a[1]->primitive_int(), n);
    end = py_bound(*a[2]->primitive_int(), n);
  } else if constexpr (B == Bounds::Left) {
    begin = py_bound(*a[1]->primitive_int(), n);
  } else {
    end = py_bound(*a[1]->primitive_int(), n);
  }
  return Payload(slice_axis(t, Axis, begin, end, true));
}

}  // namespace

void append_python_ops(std::vector<OpDef>& defs) {
  const CombinationFilter same_kind{"homogeneous_tuple", homogeneous};
  defs.push_back({"indexing", 2, {"sequence", "int_primitive"}, {"index_in_range", indexing_compat}, indexing,
                  "{0}[{1}]"});
  defs.push_back({"indexing_axis1", 2, {"matrix_plus_tensor", "int_primitive"}, {"index_in_range_axis1", indexing_axis1_compat},
                  indexing_axis1, "{0}[:, {1}]"});
  defs.push_back({"pair_creation", 2, {"tuple_item", "tuple_item"}, same_kind, make_tuple, "({0}, {1})"});
  defs.push_back({"singleton_tuple", 1, {"tuple_item"}, same_kind, make_tuple, "({0},)"});
  defs.push_back({"triple_creation", 3, {"tuple_item", "tuple_item", "tuple_item"}, same_kind, make_tuple,
                  "({0}, {1}, {2})"});
  defs.push_back({"slicing_axis0_both", 3, {"nonscalar_tensor", "int_primitive", "int_primitive"},
                  {"slice_axis0", slicing_compat<0, Bounds::Both>}, slicing<0, Bounds::Both>, "{0}[{1}:{2}]"});
  defs.push_back({"slicing_axis0_left", 2, {"nonscalar_tensor", "int_primitive"},
                  {"slice_axis0", slicing_compat<0, Bounds::Left>}, slicing<0, Bounds::Left>, "{0}[{1}:]"});
  defs.push_back({"slicing_axis0_right", 2, {"nonscalar_tensor", "int_primitive"},
                  {"slice_axis0", slicing_compat<0, Bounds::Right>}, slicing<0, Bounds::Right>, "{0}[:{1}]"});
  defs.push_back({"slicing_axis1_both", 3, {"matrix_plus_tensor", "int_primitive", "int_primitive"},
                  {"slice_axis1", slicing_compat<1, Bounds::Both>}, slicing<1, Bounds::Both>, "{0}[:, {1}:{2}]"});
  defs.push_back({"slicing_axis1_left", 2, {"matrix_plus_tensor", "int_primitive"},
                  {"slice_axis1", slicing_compat<1, Bounds::Left>}, slicing<1, Bounds::Left>, "{0}[:, {1}:]"});
  defs.push_back({"slicing_axis1_right", 2, {"matrix_plus_tensor", "int_primitive"},
                  {"slice_axis1", slicing_compat<1, Bounds::Right>}, slicing<1, Bounds::Right>, "{0}[:, :{1}]"});
}

}  // namespace tsynth::detail
