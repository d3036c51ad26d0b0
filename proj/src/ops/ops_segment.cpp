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

// Counting, segments, padding, where, cast, products, roll and reverse.

#include <algorithm>
#include <map>

#include "op_util.hpp"

namespace tsynth::detail {

namespace {

Expected<Payload> bincount(Args a) {
  const Tensor* t = a[0]->tensor();
  if (!t || t->dtype() != DType::I32) return precondition("bincount needs an int32 tensor");
  std::int64_t mx = -1;
  for (auto x : t->data<std::int32_t>()) {
    if (x < 0) return precondition("negative value in bincount");
    mx = std::max<std::int64_t>(mx, x);
  }
  if (auto e = check_output_dims(std::vector<std::int64_t>{mx + 1})) return *e;
  std::vector<std::int32_t> r(static_cast<std::size_t>(mx + 1), 0);
  for (auto x : t->data<std::int32_t>()) ++r[static_cast<std::size_t>(x)];
  return Payload(Tensor::from(Shape{mx + 1}, std::move(r)));
}

// Index of each element's first-occurrence rank among distinct values.
Expected<Payload> unique_index(Args a) {
  const Tensor* t = a[0]->tensor();
  if (!t || t->rank() != 1) return precondition("unique needs a vector");
  std::vector<std::int32_t> r(static_cast<std::size_t>(t->size()));
  dispatch_dtype(t->dtype(), [&](auto tag) {
    using T = typename decltype(tag)::type;
    auto d = t->data<T>();
    std::vector<T> seen;
    for (std::size_t i = 0; i < d.size(); ++i) {
      std::size_t k = 0;
      while (k < seen.size() && !(seen[k] == d[i])) ++k;
      if (k == seen.size()) seen.push_back(d[i]);
      r[i] = static_cast<std::int32_t>(k);
    }
  });
  return Payload(Tensor::from(t->shape(), std::move(r)));
}

enum class SegReduce { Sum, Max };

// Shared kernel: data rows grouped by ids (ids cover a prefix of data's shape).
Expected<Payload> segment_reduce(const Tensor& data, const Tensor& ids, std::int64_t num, SegReduce kind,
                                 bool unsorted) {
  std::int64_t inner = 1;
  for (int i = ids.rank(); i < data.rank(); ++i) inner *= data.shape()[i];
  std::vector<std::int64_t> dims{num};
  for (int i = ids.rank(); i < data.rank(); ++i) dims.push_back(data.shape()[i]);
  if (auto e = check_output_dims(dims)) return *e;
  return dispatch_dtype(data.dtype(), [&](auto tag) -> Expected<Payload> {
    using T = typename decltype(tag)::type;
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      return precondition("boolean data");
    } else {
      auto d = data.data<T>();
      const T empty = kind == SegReduce::Sum || !unsorted ? T(0) : std::numeric_limits<T>::lowest();
      std::vector<T> r(static_cast<std::size_t>(num * inner), empty);
      std::vector<bool> touched(static_cast<std::size_t>(num), false);
      for (std::int64_t row = 0; row < ids.size(); ++row) {
        const std::int64_t s = ids.as_int(row);
        if (s < 0 && unsorted) continue;
        if (s < 0 || s >= num) return precondition("segment id out of range");
        for (std::int64_t j = 0; j < inner; ++j) {
          T& acc = r[static_cast<std::size_t>(s * inner + j)];
          const T x = d[static_cast<std::size_t>(row * inner + j)];
          if (kind == SegReduce::Sum) {
            if (!checked_add(acc, x, acc)) return numeric_error("integer overflow");
          } else if (!touched[static_cast<std::size_t>(s)]) {
            acc = x;
          } else if (x > acc) {
            acc = x;
          }
        }
        touched[static_cast<std::size_t>(s)] = true;
      }
      return Payload(Tensor::from(make_shape(dims), std::move(r)));
    }
  });
}

bool segment_compat(Args a) {
  const Tensor* d = a[0]->tensor();
  const Tensor* ids = a[1]->tensor();
  return d && ids && is_numeric(d->dtype()) && is_integer(ids->dtype()) && ids->rank() == 1 && d->rank() >= 1 &&
         d->shape()[0] == ids->shape()[0];
}

Expected<Payload> segment(Args a, SegReduce kind) {
  if (!segment_compat(a)) return precondition("segment ids must be a vector matching data's first dim");
  const Tensor& ids = *a[1]->tensor();
  std::int64_t prev = 0;
  for (std::int64_t i = 0; i < ids.size(); ++i) {
    const std::int64_t s = ids.as_int(i);
    if (s < prev) return precondition("segment ids must be sorted and non-negative");
    prev = s;
  }
  return segment_reduce(*a[0]->tensor(), ids, ids.size() == 0 ? 0 : prev + 1, kind, false);
}

bool unsorted_segment_compat(Args a) {
  const Tensor* d = a[0]->tensor();
  const Tensor* ids = a[1]->tensor();
  auto n = scalar_int(*a[2]);
  if (!d || !ids || !n || *n < 0 || !is_numeric(d->dtype()) || !is_integer(ids->dtype()) || ids->rank() > d->rank())
    return false;
  for (int i = 0; i < ids->rank(); ++i)
    if (ids->shape()[i] != d->shape()[i]) return false;
  return true;
}

Expected<Payload> unsorted_segment(Args a, SegReduce kind) {
  if (!unsorted_segment_compat(a)) return precondition("segment ids shape must prefix data shape");
  return segment_reduce(*a[0]->tensor(), *a[1]->tensor(), *scalar_int(*a[2]), kind, true);
}

// Paddings as (before, after) pairs from a [rank, 2] tensor or tuple of pairs.
std::optional<std::vector<std::pair<std::int64_t, std::int64_t>>> paddings_of(const Value& v) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  if (const Tensor* t = v.tensor()) {
    if (!is_integer(t->dtype()) || t->rank() != 2 || t->shape()[1] != 2) return std::nullopt;
    for (std::int64_t r = 0; r < t->shape()[0]; ++r) out.emplace_back(t->as_int(2 * r), t->as_int(2 * r + 1));
  } else if (const Tuple* tup = v.tuple()) {
    for (const auto& row : tup->items) {
      const Tuple* pair = row->tuple();
      if (!pair || pair->items.size() != 2) return std::nullopt;
      auto b = pair->items[0]->primitive_int();
      auto e = pair->items[1]->primitive_int();
      if (!b || !e) return std::nullopt;
      out.emplace_back(*b, *e);
    }
  } else {
    return std::nullopt;
  }
  for (auto& [b, e] : out)
    if (b < 0 || e < 0) return std::nullopt;
  return out;
}

bool pad_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  auto p = paddings_of(*a[1]);
  return t && t->rank() >= 1 && p && static_cast<int>(p->size()) == t->rank();
}

Expected<Payload> pad_constant(Args a) {
  if (!pad_compat(a)) return precondition("paddings must be non-negative pairs, one per axis");
  const Tensor& t = *a[0]->tensor();
  auto p = *paddings_of(*a[1]);
  std::vector<std::int64_t> dims(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].first > 100 || p[i].second > 100) return limit_exceeded("padding too large");
    dims[i] = t.shape()[static_cast<int>(i)] + p[i].first + p[i].second;
  }
  if (auto e = check_output_dims(dims)) return *e;
  const Shape out = make_shape(dims);
  auto buf = make_buffer(t.dtype(), out.num_elements());
  const auto ostr = row_major_strides(out);
  std::array<std::int64_t, Shape::kMaxRank> c{};
  for (std::int64_t k = 0; k < t.size(); ++k) {
    std::int64_t dst = 0;
    for (int i = 0; i < t.rank(); ++i)
      dst += (c[static_cast<std::size_t>(i)] + p[static_cast<std::size_t>(i)].first) * ostr[static_cast<std::size_t>(i)];
    copy_element(t, k, buf, dst);
    for (int i = t.rank() - 1; i >= 0; --i) {
      if (++c[static_cast<std::size_t>(i)] < t.shape()[i]) break;
      c[static_cast<std::size_t>(i)] = 0;
    }
  }
  return Payload(Tensor(out, std::move(buf)));
}

Expected<Payload> where_1(Args a) {
  const Tensor* t = a[0]->tensor();
  if (!t || t->dtype() != DType::Bool) return precondition("where needs a bool tensor");
  const int r = t->rank();
  std::vector<std::int64_t> coords;
  std::array<std::int64_t, Shape::kMaxRank> c{};
  auto d = t->data<std::uint8_t>();
  std::int64_t n = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k]) {
      for (int i = 0; i < r; ++i) coords.push_back(c[static_cast<std::size_t>(i)]);
      ++n;
    }
    for (int i = r - 1; i >= 0; --i) {
      if (++c[static_cast<std::size_t>(i)] < t->shape()[i]) break;
      c[static_cast<std::size_t>(i)] = 0;
    }
  }
  return Payload(Tensor::from(Shape{n, r}, std::move(coords)));
}

bool cast_compat(Args a) {
  return a[0]->is_tensor() && std::holds_alternative<DTypeLiteral>(a[1]->payload());
}

template <typename To>
bool convert(double x, std::int64_t xi, bool from_float, To& out) {
  if constexpr (std::is_same_v<To, std::uint8_t>) {
    out = from_float ? (x != 0.0 ? 1 : 0) : (xi != 0 ? 1 : 0);
    return true;
  } else if constexpr (std::is_same_v<To, float>) {
    out = from_float ? static_cast<float>(x) : static_cast<float>(xi);
    return true;
  } else {
    if (from_float) {
      if (!std::isfinite(x)) return false;
      const double tr = std::trunc(x);
      if (tr < static_cast<double>(std::numeric_limits<To>::min()) ||
          tr >= -static_cast<double>(std::numeric_limits<To>::min()))
        return false;
      out = static_cast<To>(tr);
      return true;
    }
    if (xi < std::numeric_limits<To>::min() || xi > std::numeric_limits<To>::max()) return false;
    out = static_cast<To>(xi);
    return true;
  }
}

Expected<Payload> cast(Args a) {
  if (!cast_compat(a)) return precondition("cast needs a tensor and a dtype");
  const Tensor& t = *a[0]->tensor();
  const DType to = std::get<DTypeLiteral>(a[1]->payload()).dtype;
  const bool from_float = t.dtype() == DType::F32;
  return dispatch_dtype(to, [&](auto tag) -> Expected<Payload> {
    using T = typename decltype(tag)::type;
    std::vector<T> r(static_cast<std::size_t>(t.size()));
    for (std::int64_t i = 0; i < t.size(); ++i) {
      const double x = from_float ? t.as_double(i) : 0.0;
      const std::int64_t xi = from_float ? 0 : t.as_int(i);
      if (!convert<T>(x, xi, from_float, r[static_cast<std::size_t>(i)]))
        return numeric_error("value not representable in target dtype");
    }
    return Payload(Tensor::from(t.shape(), std::move(r)));
  });
}

bool matmul_compat(Args a) {
  const Tensor* x = a[0]->tensor();
  const Tensor* y = a[1]->tensor();
  if (!x || !y || x->dtype() != y->dtype() || !is_numeric(x->dtype()) || x->rank() < 2 || x->rank() != y->rank())
    return false;
  const int r = x->rank();
  for (int i = 0; i < r - 2; ++i)
    if (x->shape()[i] != y->shape()[i]) return false;
  return x->shape()[r - 1] == y->shape()[r - 2];
}

// Contracts x viewed as [batch, m, k] with y viewed as [batch, k, n].
template <typename T>
Expected<Payload> contract(const Tensor& x, const Tensor& y, std::int64_t batch, std::int64_t m, std::int64_t k,
                           std::int64_t n, std::vector<std::int64_t> dims) {
  if (auto e = check_output_dims(dims)) return *e;
  auto dx = x.data<T>();
  auto dy = y.data<T>();
  std::vector<T> r(static_cast<std::size_t>(batch * m * n), T(0));
  for (std::int64_t b = 0; b < batch; ++b)
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        T acc = 0;
        for (std::int64_t q = 0; q < k; ++q) {
          T prod;
          if (!checked_mul(dx[static_cast<std::size_t>((b * m + i) * k + q)], dy[static_cast<std::size_t>((b * k + q) * n + j)],
                           prod) ||
              !checked_add(acc, prod, acc))
            return numeric_error("integer overflow");
        }
        r[static_cast<std::size_t>((b * m + i) * n + j)] = acc;
      }
  return Payload(Tensor::from(make_shape(dims), std::move(r)));
}

Expected<Payload> matmul(Args a) {
  if (!matmul_compat(a)) return precondition("matmul shapes incompatible");
  const Tensor& x = *a[0]->tensor();
  const Tensor& y = *a[1]->tensor();
  const int r = x.rank();
  std::int64_t batch = 1;
  std::vector<std::int64_t> dims;
  for (int i = 0; i < r - 2; ++i) {
    batch *= x.shape()[i];
    dims.push_back(x.shape()[i]);
  }
  const std::int64_t m = x.shape()[r - 2], k = x.shape()[r - 1], n = y.shape()[r - 1];
  dims.push_back(m);
  dims.push_back(n);
  return dispatch_dtype(x.dtype(), [&](auto tag) -> Expected<Payload> {
    using T = typename decltype(tag)::type;
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      return precondition("boolean operands");
    } else {
      return contract<T>(x, y, batch, m, k, n, dims);
    }
  });
}

bool tensordot_compat(Args a) {
  const Tensor* x = a[0]->tensor();
  const Tensor* y = a[1]->tensor();
  auto axes = a[2]->primitive_int();
  if (!x || !y || !axes || x->dtype() != y->dtype() || !is_numeric(x->dtype())) return false;
  if (*axes < 0 || *axes > x->rank() || *axes > y->rank()) return false;
  for (int i = 0; i < *axes; ++i)
    if (x->shape()[x->rank() - static_cast<int>(*axes) + i] != y->shape()[i]) return false;
  return true;
}

Expected<Payload> tensordot(Args a) {
  if (!tensordot_compat(a)) return precondition("tensordot axes incompatible");
  const Tensor& x = *a[0]->tensor();
  const Tensor& y = *a[1]->tensor();
  const int axes = static_cast<int>(*a[2]->primitive_int());
  std::int64_t m = 1, k = 1, n = 1;
  std::vector<std::int64_t> dims;
  for (int i = 0; i < x.rank() - axes; ++i) {
    m *= x.shape()[i];
    dims.push_back(x.shape()[i]);
  }
  for (int i = x.rank() - axes; i < x.rank(); ++i) k *= x.shape()[i];
  for (int i = axes; i < y.rank(); ++i) {
    n *= y.shape()[i];
    dims.push_back(y.shape()[i]);
  }
  return dispatch_dtype(x.dtype(), [&](auto tag) -> Expected<Payload> {
    using T = typename decltype(tag)::type;
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      return precondition("boolean operands");
    } else {
      return contract<T>(x, y, 1, m, k, n, dims);
    }
  });
}

bool roll_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  auto shift = a[1]->primitive_int();
  auto axis = a[2]->primitive_int();
  return t && shift && axis && normalize_axis(*axis, t->rank());
}

Expected<Payload> roll(Args a) {
  if (!roll_compat(a)) return precondition("roll axis out of range");
  const Tensor& t = *a[0]->tensor();
  const int axis = *normalize_axis(*a[2]->primitive_int(), t.rank());
  const AxisSplit sp = split_at_axis(t.shape(), axis);
  std::vector<std::int64_t> src(static_cast<std::size_t>(t.size()));
  const std::int64_t shift = sp.len == 0 ? 0 : ((*a[1]->primitive_int() % sp.len) + sp.len) % sp.len;
  for (std::int64_t o = 0; o < sp.outer; ++o)
    for (std::int64_t k = 0; k < sp.len; ++k)
      for (std::int64_t i = 0; i < sp.inner; ++i)
        src[static_cast<std::size_t>((o * sp.len + (k + shift) % sp.len) * sp.inner + i)] = (o * sp.len + k) * sp.inner + i;
  return Payload(take_elements(t, t.shape(), src));
}

bool reverse_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  auto axis = a[1]->primitive_int();
  return t && axis && normalize_axis(*axis, t->rank());
}

Expected<Payload> reverse(Args a) {
  if (!reverse_compat(a)) return precondition("reverse axis out of range");
  const Tensor& t = *a[0]->tensor();
  const int axis = *normalize_axis(*a[1]->primitive_int(), t.rank());
  const AxisSplit sp = split_at_axis(t.shape(), axis);
  std::vector<std::int64_t> src(static_cast<std::size_t>(t.size()));
  for (std::int64_t o = 0; o < sp.outer; ++o)
    for (std::int64_t k = 0; k < sp.len; ++k)
      for (std::int64_t i = 0; i < sp.inner; ++i)
        src[static_cast<std::size_t>((o * sp.len + k) * sp.inner + i)] = (o * sp.len + (sp.len - 1 - k)) * sp.inner + i;
  return Payload(take_elements(t, t.shape(), src));
}

}  // namespace

void append_segment_ops(std::vector<OpDef>& defs) {
  defs.push_back({"bincount", 1, {"int32_tensor"}, {}, bincount, "tf.math.bincount({0})"});
  defs.push_back({"unique_with_counts_index", 1, {"vector_tensor"}, {}, unique_index, "tf.unique_with_counts({0})[1]"});
  defs.push_back({"segment_sum", 2, {"nonscalar_numeric_tensor", "int_vector_tensor"}, {"segment_lengths", segment_compat},
                  +[](Args a) { return segment(a, SegReduce::Sum); }, "tf.math.segment_sum({0}, {1})"});
  defs.push_back({"segment_max", 2, {"nonscalar_numeric_tensor", "int_vector_tensor"}, {"segment_lengths", segment_compat},
                  +[](Args a) { return segment(a, SegReduce::Max); }, "tf.math.segment_max({0}, {1})"});
  defs.push_back({"unsorted_segment_sum", 3, {"numeric_tensor", "int_tensor", "scalar_int"},
                  {"segment_prefix", unsorted_segment_compat},
                  +[](Args a) { return unsorted_segment(a, SegReduce::Sum); },
                  "tf.math.unsorted_segment_sum({0}, {1}, {2})"});
  defs.push_back({"unsorted_segment_max", 3, {"numeric_tensor", "int_tensor", "scalar_int"},
                  {"segment_prefix", unsorted_segment_compat},
                  +[](Args a) { return unsorted_segment(a, SegReduce::Max); },
                  "tf.math.unsorted_segment_max({0}, {1}, {2})"});
  defs.push_back({"pad_constant", 2, {"nonscalar_tensor", "paddings"}, {"paddings_match_rank", pad_compat}, pad_constant,
                  "tf.pad({0}, {1}, mode='CONSTANT')"});
  defs.push_back({"where_1", 1, {"bool_tensor"}, {}, where_1, "tf.where({0})"});
  defs.push_back({"cast", 2, {"tensor", "dtype"}, {}, cast, "tf.cast({0}, {1})"});
  defs.push_back({"matmul", 2, {"matrix_plus_numeric_tensor", "matrix_plus_numeric_tensor"}, {"matmul_shapes", matmul_compat},
                  matmul, "tf.matmul({0}, {1})"});
  defs.push_back({"tensordot", 3, {"numeric_tensor", "numeric_tensor", "int_primitive"}, {"tensordot_axes", tensordot_compat},
                  tensordot, "tf.tensordot({0}, {1}, {2})"});
  defs.push_back({"roll", 3, {"nonscalar_tensor", "int_primitive", "axis"}, {"roll_axis", roll_compat}, roll,
                  "tf.roll({0}, {1}, {2})"});
  defs.push_back({"reverse", 2, {"nonscalar_tensor", "axis"}, {"reverse_axis", reverse_compat}, reverse,
                  "tf.reverse({0}, axis=[{1}])"});
}

}  // namespace tsynth::detail
