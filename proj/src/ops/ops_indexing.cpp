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

// gather, gather_nd and boolean_mask.

#include "op_util.hpp"

namespace tsynth::detail {

namespace {

struct GatherPlan {
  int axis = 0;
  int batch = 0;
};

std::optional<GatherPlan> gather_plan(const Tensor& params, const Tensor& indices, std::int64_t axis,
                                      std::int64_t batch) {
  if (params.rank() < 1 || !is_integer(indices.dtype())) return std::nullopt;
  auto ax = normalize_axis(axis, params.rank());
  if (!ax || batch < 0 || batch > *ax || batch > indices.rank()) return std::nullopt;
  for (int i = 0; i < batch; ++i)
    if (params.shape()[i] != indices.shape()[i]) return std::nullopt;
  return GatherPlan{*ax, static_cast<int>(batch)};
}

Expected<Payload> gather(const Tensor& params, const Tensor& indices, const GatherPlan& plan) {
  const Shape& ps = params.shape();
  const Shape& is = indices.shape();
  std::vector<std::int64_t> dims;
  for (int i = 0; i < plan.axis; ++i) dims.push_back(ps[i]);
  for (int i = plan.batch; i < is.rank(); ++i) dims.push_back(is[i]);
  for (int i = plan.axis + 1; i < ps.rank(); ++i) dims.push_back(ps[i]);
  if (auto e = check_output_dims(dims)) return *e;
  const Shape out = make_shape(dims);
  const auto pstr = row_major_strides(ps);
  const auto istr = row_major_strides(is);
  const std::int64_t limit = ps[plan.axis];
  const int idx_free = is.rank() - plan.batch;
  std::vector<std::int64_t> src(static_cast<std::size_t>(out.num_elements()));
  std::array<std::int64_t, Shape::kMaxRank> c{};
  for (std::int64_t k = 0; k < out.num_elements(); ++k) {
    // Output coords: [batch | params axes b..axis-1 | index free axes | params trailing].
    std::int64_t iflat = 0;
    for (int i = 0; i < plan.batch; ++i) iflat += c[static_cast<std::size_t>(i)] * istr[static_cast<std::size_t>(i)];
    for (int j = 0; j < idx_free; ++j)
      iflat += c[static_cast<std::size_t>(plan.axis + j)] * istr[static_cast<std::size_t>(plan.batch + j)];
    const std::int64_t sel = indices.as_int(iflat);
    if (sel < 0 || sel >= limit) return precondition("index out of range");
    std::int64_t p = 0;
    for (int i = 0; i < plan.axis; ++i) p += c[static_cast<std::size_t>(i)] * pstr[static_cast<std::size_t>(i)];
    p += sel * pstr[static_cast<std::size_t>(plan.axis)];
    for (int i = plan.axis + 1; i < ps.rank(); ++i)
      p += c[static_cast<std::size_t>(i - 1 + idx_free)] * pstr[static_cast<std::size_t>(i)];
    src[static_cast<std::size_t>(k)] = p;
    for (int d = out.rank() - 1; d >= 0; --d) {
      if (++c[static_cast<std::size_t>(d)] < out[d]) break;
      c[static_cast<std::size_t>(d)] = 0;
    }
  }
  return Payload(take_elements(params, out, src));
}

bool gather2_compat(Args a) {
  const Tensor* p = a[0]->tensor();
  const Tensor* i = a[1]->tensor();
  return p && i && gather_plan(*p, *i, 0, 0);
}

Expected<Payload> gather2(Args a) {
  if (!gather2_compat(a)) return precondition("gather needs a non-scalar tensor and integer indices");
  return gather(*a[0]->tensor(), *a[1]->tensor(), GatherPlan{0, 0});
}

bool gather4_compat(Args a) {
  const Tensor* p = a[0]->tensor();
  const Tensor* i = a[1]->tensor();
  auto axis = a[2]->primitive_int();
  auto batch = a[3]->primitive_int();
  return p && i && axis && batch && gather_plan(*p, *i, *axis, *batch);
}

Expected<Payload> gather4(Args a) {
  if (!gather4_compat(a)) return precondition("invalid gather axis/batch_dims");
  const Tensor& p = *a[0]->tensor();
  const Tensor& i = *a[1]->tensor();
  return gather(p, i, *gather_plan(p, i, *a[2]->primitive_int(), *a[3]->primitive_int()));
}

bool gather_nd_compat(Args a) {
  const Tensor* p = a[0]->tensor();
  const Tensor* i = a[1]->tensor();
  return p && i && p->rank() >= 1 && is_integer(i->dtype()) && i->rank() >= 1 && i->shape()[i->rank() - 1] <= p->rank();
}

Expected<Payload> gather_nd(Args a) {
  if (!gather_nd_compat(a)) return precondition("gather_nd index depth exceeds params rank");
  const Tensor& p = *a[0]->tensor();
  const Tensor& ind = *a[1]->tensor();
  const int depth = static_cast<int>(ind.shape()[ind.rank() - 1]);
  std::vector<std::int64_t> dims;
  for (int i = 0; i + 1 < ind.rank(); ++i) dims.push_back(ind.shape()[i]);
  for (int i = depth; i < p.rank(); ++i) dims.push_back(p.shape()[i]);
  if (auto e = check_output_dims(dims)) return *e;
  const Shape out = make_shape(dims);
  const auto pstr = row_major_strides(p.shape());
  std::int64_t slice = 1;
  for (int i = depth; i < p.rank(); ++i) slice *= p.shape()[i];
  const std::int64_t rows = ind.size() / std::max<std::int64_t>(depth, 1);
  std::vector<std::int64_t> src;
  src.reserve(static_cast<std::size_t>(out.num_elements()));
  const std::int64_t n_rows = depth == 0 ? out.num_elements() / std::max<std::int64_t>(slice, 1) : rows;
  for (std::int64_t r = 0; r < n_rows; ++r) {
    std::int64_t base = 0;
    for (int j = 0; j < depth; ++j) {
      const std::int64_t x = ind.as_int(r * depth + j);
      if (x < 0 || x >= p.shape()[j]) return precondition("index out of range");
      base += x * pstr[static_cast<std::size_t>(j)];
    }
    for (std::int64_t s = 0; s < slice; ++s) src.push_back(base + s);
  }
  if (static_cast<std::int64_t>(src.size()) != out.num_elements()) return precondition("empty gather_nd indices");
  return Payload(take_elements(p, out, src));
}

bool boolean_mask_compat(Args a) {
  const Tensor* t = a[0]->tensor();
  const Tensor* m = a[1]->tensor();
  if (!t || !m || m->dtype() != DType::Bool || m->rank() < 1 || m->rank() > t->rank()) return false;
  for (int i = 0; i < m->rank(); ++i)
    if (m->shape()[i] != t->shape()[i]) return false;
  return true;
}

Expected<Payload> boolean_mask(Args a) {
  if (!boolean_mask_compat(a)) return precondition("mask shape must prefix tensor shape");
  const Tensor& t = *a[0]->tensor();
  const Tensor& m = *a[1]->tensor();
  std::int64_t inner = 1;
  for (int i = m.rank(); i < t.rank(); ++i) inner *= t.shape()[i];
  auto md = m.data<std::uint8_t>();
  std::vector<std::int64_t> src;
  std::int64_t count = 0;
  for (std::size_t r = 0; r < md.size(); ++r) {
    if (!md[r]) continue;
    ++count;
    for (std::int64_t s = 0; s < inner; ++s) src.push_back(static_cast<std::int64_t>(r) * inner + s);
  }
  std::vector<std::int64_t> dims{count};
  for (int i = m.rank(); i < t.rank(); ++i) dims.push_back(t.shape()[i]);
  return Payload(take_elements(t, make_shape(dims), src));
}

}  // namespace

void append_indexing_ops(std::vector<OpDef>& defs) {
  defs.push_back({"gather_2", 2, {"nonscalar_tensor", "int_tensor"}, {"gather_indices", gather2_compat}, gather2,
                  "tf.gather({0}, {1})"});
  defs.push_back({"gather_4", 4, {"nonscalar_tensor", "int_tensor", "axis", "batch_dims"},
                  {"gather_axis_batch", gather4_compat}, gather4,
                  "tf.gather({0}, {1}, axis={2}, batch_dims={3})"});
  defs.push_back({"gather_nd", 2, {"nonscalar_tensor", "nonscalar_int_tensor"}, {"gather_nd_depth", gather_nd_compat},
                  gather_nd, "tf.gather_nd({0}, {1})"});
  defs.push_back({"boolean_mask", 2, {"nonscalar_tensor", "nonscalar_bool_tensor"}, {"mask_prefix", boolean_mask_compat},
                  boolean_mask, "tf.boolean_mask({0}, {1})"});
}

}  // namespace tsynth::detail
