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

// Shape manipulation: reshape, expand/squeeze, transpose, concat/stack,
// unstack, tile, broadcast_to, shape.

#include <algorithm>
#include <numeric>

#include "op_util.hpp"

namespace tsynth::detail {

namespace {

// Resolves a reshape target (one -1 allowed) against an element count.
std::optional<std::vector<std::int64_t>> resolve_reshape(std::vector<std::int64_t> dims, std::int64_t count) {
  if (dims.size() > 4) return std::nullopt;
  int wildcard = -1;
  std::int64_t known = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == -1) {
      if (wildcard >= 0) return std::nullopt;
      wildcard = static_cast<int>(i);
    } else if (dims[i] < 0) {
      return std::nullopt;
    } else {
      known *= dims[i];
      if (known > 1000000) return std::nullopt;
    }
  }
  if (wildcard >= 0) {
    if (known == 0 || count % known != 0) return std::nullopt;
    dims[static_cast<std::size_t>(wildcard)] = count / known;
  } else if (known != count) {
    return std::nullopt;
  }
  return dims;
}

bool reshape_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  if (!t || a[1]->primitive_int()) return false;
  auto dims = int_list(*a[1]);
  return dims && resolve_reshape(*dims, t->size()).has_value();
}

Expected<Payload> reshape(Args a) {
  if (!reshape_compat(a)) return precondition("shape incompatible with element count");
  const Tensor& t = *a[0]->tensor();
  auto dims = *resolve_reshape(*int_list(*a[1]), t.size());
  if (auto e = check_output_dims(dims)) return *e;
  return Payload(Tensor(make_shape(dims), t.buffer()));
}

bool expand_dims_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  auto axis = a[1]->primitive_int();
  return t && axis && normalize_axis(*axis, t->rank() + 1);
}

Expected<Payload> expand_dims(Args a) {
  if (!expand_dims_compat(a)) return precondition("axis out of range");
  const Tensor& t = *a[0]->tensor();
  if (t.rank() >= 4) return limit_exceeded("rank would exceed 4");
  const int axis = *normalize_axis(*a[1]->primitive_int(), t.rank() + 1);
  auto dims = t.shape().to_vector();
  dims.insert(dims.begin() + axis, 1);
  return Payload(Tensor(make_shape(dims), t.buffer()));
}

Expected<Payload> squeeze(Args a) {
  const Tensor* t = a[0]->tensor();
  if (!t) return precondition("operand must be a tensor");
  std::vector<std::int64_t> dims;
  for (int i = 0; i < t->rank(); ++i)
    if (t->shape()[i] != 1) dims.push_back(t->shape()[i]);
  return Payload(Tensor(make_shape(dims), t->buffer()));
}

bool squeeze_axis_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  auto axis = a[1]->primitive_int();
  if (!t || !axis) return false;
  auto n = normalize_axis(*axis, t->rank());
  return n && t->shape()[*n] == 1;
}

Expected<Payload> squeeze_axis(Args a) {
  if (!squeeze_axis_compat(a)) return precondition("axis must name a dimension of length 1");
  const Tensor& t = *a[0]->tensor();
  const int axis = *normalize_axis(*a[1]->primitive_int(), t.rank());
  auto dims = t.shape().to_vector();
  dims.erase(dims.begin() + axis);
  return Payload(Tensor(make_shape(dims), t.buffer()));
}

Tensor permute(const Tensor& t, std::span<const int> perm) {
  const int r = t.rank();
  std::vector<std::int64_t> out_dims(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) out_dims[static_cast<std::size_t>(i)] = t.shape()[perm[static_cast<std::size_t>(i)]];
  const Shape out = make_shape(out_dims);
  const auto src_strides = row_major_strides(t.shape());
  std::vector<std::int64_t> idx(static_cast<std::size_t>(t.size()));
  std::array<std::int64_t, Shape::kMaxRank> coord{};
  for (std::int64_t k = 0; k < out.num_elements(); ++k) {
    std::int64_t src = 0;
    for (int i = 0; i < r; ++i) src += coord[static_cast<std::size_t>(i)] * src_strides[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    idx[static_cast<std::size_t>(k)] = src;
    for (int i = r - 1; i >= 0; --i) {
      if (++coord[static_cast<std::size_t>(i)] < out[i]) break;
      coord[static_cast<std::size_t>(i)] = 0;
    }
  }
  return take_elements(t, out, idx);
}

Expected<Payload> transpose(Args a) {
  const Tensor* t = a[0]->tensor();
  if (!t || t->rank() < 2) return precondition("operand must be a tensor of rank >= 2");
  std::vector<int> perm(static_cast<std::size_t>(t->rank()));
  for (int i = 0; i < t->rank(); ++i) perm[static_cast<std::size_t>(i)] = t->rank() - 1 - i;
  return Payload(permute(*t, perm));
}

std::optional<std::vector<int>> as_permutation(const Value& v, int rank) {
  auto p = int_list(v);
  if (!p || v.primitive_int() || static_cast<int>(p->size()) != rank) return std::nullopt;
  std::vector<int> perm(p->begin(), p->end());
  std::vector<bool> seen(static_cast<std::size_t>(rank), false);
  for (auto& x : perm) {
    if (x < 0 || x >= rank || seen[static_cast<std::size_t>(x)]) return std::nullopt;
    seen[static_cast<std::size_t>(x)] = true;
  }
  return perm;
}

bool transpose_perm_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  return t && t->rank() >= 2 && as_permutation(*a[1], t->rank());
}

Expected<Payload> transpose_perm(Args a) {
  if (!transpose_perm_compat(a)) return precondition("perm must be a permutation of the axes");
  const Tensor& t = *a[0]->tensor();
  return Payload(permute(t, *as_permutation(*a[1], t.rank())));
}

// Tensors of a tuple argument, all sharing a dtype, or empty.
std::vector<const Tensor*> tuple_tensors(const Value& v) {
  std::vector<const Tensor*> out;
  const Tuple* tup = v.tuple();
  if (!tup || tup->items.empty()) return out;
  for (const auto& item : tup->items) {
    const Tensor* t = item->tensor();
    if (!t || (!out.empty() && t->dtype() != out[0]->dtype())) return {};
    out.push_back(t);
  }
  return out;
}

bool concat_compat(Args a) {
  auto ts = tuple_tensors(*a[0]);
  auto axis = a[1]->primitive_int();
  if (ts.empty() || !axis) return false;
  const int r = ts[0]->rank();
  auto ax = normalize_axis(*axis, r);
  if (!ax) return false;
  for (const Tensor* t : ts) {
    if (t->rank() != r) return false;
    for (int i = 0; i < r; ++i)
      if (i != *ax && t->shape()[i] != ts[0]->shape()[i]) return false;
  }
  return true;
}

Expected<Payload> concat(Args a) {
  if (!concat_compat(a)) return precondition("tensors must agree except along axis");
  auto ts = tuple_tensors(*a[0]);
  const int axis = *normalize_axis(*a[1]->primitive_int(), ts[0]->rank());
  auto dims = ts[0]->shape().to_vector();
  dims[static_cast<std::size_t>(axis)] = 0;
  for (const Tensor* t : ts) dims[static_cast<std::size_t>(axis)] += t->shape()[axis];
  if (auto e = check_output_dims(dims)) return *e;
  const Shape out = make_shape(dims);
  auto buf = make_buffer(ts[0]->dtype(), out.num_elements());
  const AxisSplit so = split_at_axis(out, axis);
  std::int64_t offset = 0;
  for (const Tensor* t : ts) {
    const AxisSplit st = split_at_axis(t->shape(), axis);
    for (std::int64_t o = 0; o < st.outer; ++o)
      for (std::int64_t k = 0; k < st.len; ++k)
        for (std::int64_t i = 0; i < st.inner; ++i)
          copy_element(*t, (o * st.len + k) * st.inner + i, buf, (o * so.len + offset + k) * so.inner + i);
    offset += st.len;
  }
  return Payload(Tensor(out, std::move(buf)));
}

bool stack_compat(Args a) {
  auto ts = tuple_tensors(*a[0]);
  auto axis = a[1]->primitive_int();
  if (ts.empty() || !axis || !normalize_axis(*axis, ts[0]->rank() + 1)) return false;
  return std::all_of(ts.begin(), ts.end(), [&](const Tensor* t) { return t->shape() == ts[0]->shape(); });
}

Expected<Payload> stack(Args a) {
  if (!stack_compat(a)) return precondition("tensors must share a shape");
  auto ts = tuple_tensors(*a[0]);
  if (ts[0]->rank() >= 4) return limit_exceeded("rank would exceed 4");
  const int axis = *normalize_axis(*a[1]->primitive_int(), ts[0]->rank() + 1);
  auto dims = ts[0]->shape().to_vector();
  dims.insert(dims.begin() + axis, static_cast<std::int64_t>(ts.size()));
  if (auto e = check_output_dims(dims)) return *e;
  const Shape out = make_shape(dims);
  auto buf = make_buffer(ts[0]->dtype(), out.num_elements());
  const AxisSplit so = split_at_axis(out, axis);
  for (std::size_t n = 0; n < ts.size(); ++n)
    for (std::int64_t o = 0; o < so.outer; ++o)
      for (std::int64_t i = 0; i < so.inner; ++i)
        copy_element(*ts[n], o * so.inner + i, buf, (o * so.len + static_cast<std::int64_t>(n)) * so.inner + i);
  return Payload(Tensor(out, std::move(buf)));
}

bool unstack_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  auto axis = a[1]->primitive_int();
  return t && t->rank() >= 1 && axis && normalize_axis(*axis, t->rank());
}

Expected<Payload> unstack(Args a) {
  if (!unstack_compat(a)) return precondition("axis out of range");
  const Tensor& t = *a[0]->tensor();
  const int axis = *normalize_axis(*a[1]->primitive_int(), t.rank());
  const AxisSplit sp = split_at_axis(t.shape(), axis);
  if (sp.len > static_cast<std::int64_t>(kDefaultLimits.max_tuple_length))
    return limit_exceeded("too many pieces for a tuple");
  auto dims = t.shape().to_vector();
  dims.erase(dims.begin() + axis);
  const Shape piece = make_shape(dims);
  Tuple tup;
  for (std::int64_t k = 0; k < sp.len; ++k) {
    std::vector<std::int64_t> idx;
    idx.reserve(static_cast<std::size_t>(sp.outer * sp.inner));
    for (std::int64_t o = 0; o < sp.outer; ++o)
      for (std::int64_t i = 0; i < sp.inner; ++i) idx.push_back((o * sp.len + k) * sp.inner + i);
    tup.items.push_back(Value::leaf(take_elements(t, piece, idx), Origin{OriginKind::HeuristicConstant, "element"}, 1));
  }
  return Payload(std::move(tup));
}

bool tile_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  if (!t || t->rank() < 1 || a[1]->primitive_int()) return false;
  auto m = int_list(*a[1]);
  return m && static_cast<int>(m->size()) == t->rank() &&
         std::all_of(m->begin(), m->end(), [](std::int64_t x) { return x >= 0; });
}

Expected<Payload> tile(Args a) {
  if (!tile_compat(a)) return precondition("multiples must match rank");
  const Tensor& t = *a[0]->tensor();
  auto m = *int_list(*a[1]);
  std::vector<std::int64_t> dims(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] > 100) return limit_exceeded("multiple too large");
    dims[i] = t.shape()[static_cast<int>(i)] * m[i];
  }
  if (auto e = check_output_dims(dims)) return *e;
  const Shape out = make_shape(dims);
  const auto strides = row_major_strides(t.shape());
  std::vector<std::int64_t> idx(static_cast<std::size_t>(out.num_elements()));
  std::array<std::int64_t, Shape::kMaxRank> coord{};
  const int r = out.rank();
  for (std::int64_t k = 0; k < out.num_elements(); ++k) {
    std::int64_t src = 0;
    for (int i = 0; i < r; ++i) src += (coord[static_cast<std::size_t>(i)] % t.shape()[i]) * strides[static_cast<std::size_t>(i)];
    idx[static_cast<std::size_t>(k)] = src;
    for (int i = r - 1; i >= 0; --i) {
      if (++coord[static_cast<std::size_t>(i)] < out[i]) break;
      coord[static_cast<std::size_t>(i)] = 0;
    }
  }
  return Payload(take_elements(t, out, idx));
}

bool broadcast_to_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  if (!t) return false;
  auto dims = int_list(*a[1]);
  if (!dims || !shape_within_limits(*dims)) return false;
  const Shape target = make_shape(*dims);
  Shape out;
  return try_broadcast_shapes(t->shape(), target, out) && out == target;
}

Expected<Payload> broadcast_to(Args a) {
  if (!broadcast_to_compat(a)) return precondition("cannot broadcast to shape");
  const Tensor& t = *a[0]->tensor();
  const Shape out = make_shape(*int_list(*a[1]));
  std::vector<std::int64_t> idx(static_cast<std::size_t>(out.num_elements()));
  for (std::int64_t k = 0; k < out.num_elements(); ++k) idx[static_cast<std::size_t>(k)] = broadcast_source_index(k, out, t.shape());
  return Payload(take_elements(t, out, idx));
}

Expected<Payload> shape_of(Args a) {
  const Tensor* t = a[0]->tensor();
  if (!t) return precondition("operand must be a tensor");
  std::vector<std::int32_t> d;
  for (int i = 0; i < t->rank(); ++i) d.push_back(static_cast<std::int32_t>(t->shape()[i]));
  const Shape s{static_cast<std::int64_t>(d.size())};
  return Payload(Tensor::from(s, std::move(d)));
}

}  // namespace

void append_shape_ops(std::vector<OpDef>& defs) {
  defs.push_back({"reshape", 2, {"tensor", "reshape_shape"}, {"reshape_count", reshape_compat}, reshape,
                  "tf.reshape({0}, {1})"});
  defs.push_back({"expand_dims", 2, {"tensor", "axis"}, {"expand_axis_in_range", expand_dims_compat}, expand_dims,
                  "tf.expand_dims({0}, axis={1})"});
  defs.push_back({"squeeze", 1, {"tensor"}, {}, squeeze, "tf.squeeze({0})"});
  defs.push_back({"squeeze_axis", 2, {"nonscalar_tensor", "axis"}, {"unit_axis", squeeze_axis_compat}, squeeze_axis,
                  "tf.squeeze({0}, axis={1})"});
  defs.push_back({"transpose", 1, {"matrix_plus_tensor"}, {}, transpose, "tf.transpose({0})"});
  defs.push_back({"transpose_perm", 2, {"matrix_plus_tensor", "int_sequence"}, {"permutation", transpose_perm_compat},
                  transpose_perm, "tf.transpose({0}, perm={1})"});
  defs.push_back({"concat", 2, {"tensor_tuple", "axis"}, {"concat_shapes", concat_compat}, concat,
                  "tf.concat({0}, axis={1})"});
  defs.push_back({"stack", 2, {"tensor_tuple", "axis"}, {"stack_shapes", stack_compat}, stack,
                  "tf.stack({0}, axis={1})"});
  defs.push_back({"unstack", 2, {"nonscalar_tensor", "axis"}, {"unstack_axis", unstack_compat}, unstack,
                  "tf.unstack({0}, axis={1})"});
  defs.push_back({"tile", 2, {"nonscalar_tensor", "int_sequence"}, {"multiples_match_rank", tile_compat}, tile,
                  "tf.tile({0}, {1})"});
  defs.push_back({"broadcast_to", 2, {"tensor", "shape_like"}, {"broadcastable_to", broadcast_to_compat},
                  broadcast_to, "tf.broadcast_to({0}, {1})"});
  defs.push_back({"shape", 1, {"tensor"}, {}, shape_of, "tf.shape({0})"});
}

}  // namespace tsynth::detail
