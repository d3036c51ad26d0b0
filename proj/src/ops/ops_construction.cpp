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

// Tensor constructors: constant, zeros/ones, fill, eye, range, one_hot,
// sequence_mask.

#include <algorithm>

#include "op_util.hpp"

namespace tsynth::detail {

namespace {

bool fits_i32(std::int64_t x) {
  return x >= std::numeric_limits<std::int32_t>::min() && x <= std::numeric_limits<std::int32_t>::max();
}

// Scalar tensor with the dtype a framework would infer for a Python literal.
std::optional<Tensor> scalar_from_literal(const Value& v) {
  const Payload& p = v.payload();
  if (auto* i = std::get_if<PrimitiveInt>(&p)) {
    if (fits_i32(i->value)) return Tensor::from(Shape{}, std::vector<std::int32_t>{static_cast<std::int32_t>(i->value)});
    return Tensor::from(Shape{}, std::vector<std::int64_t>{i->value});
  }
  if (auto* f = std::get_if<PrimitiveFloat>(&p))
    return Tensor::from(Shape{}, std::vector<float>{static_cast<float>(f->value)});
  if (auto* b = std::get_if<PrimitiveBool>(&p))
    return Tensor::from(Shape{}, std::vector<std::uint8_t>{static_cast<std::uint8_t>(b->value)});
  if (const Tensor* t = v.tensor(); t && t->rank() == 0) return *t;
  return std::nullopt;
}

Expected<Payload> constant(Args a) {
  if (a[0]->tuple()) {
    auto xs = int_list(*a[0]);
    if (!xs || xs->empty()) return precondition("constant needs a non-empty tuple of ints");
    if (auto e = check_output_dims(std::vector<std::int64_t>{static_cast<std::int64_t>(xs->size())})) return *e;
    const Shape s{static_cast<std::int64_t>(xs->size())};
    if (std::all_of(xs->begin(), xs->end(), fits_i32))
      return Payload(Tensor::from(s, std::vector<std::int32_t>(xs->begin(), xs->end())));
    return Payload(Tensor::from(s, std::move(*xs)));
  }
  if (a[0]->is_tensor()) return precondition("constant takes a literal");
  auto t = scalar_from_literal(*a[0]);
  if (!t) return precondition("constant takes a literal");
  return Payload(std::move(*t));
}

std::optional<OpError> shape_arg(const Value& v, std::vector<std::int64_t>& dims) {
  auto d = int_list(v);
  if (!d) return precondition("shape must be ints");
  dims = std::move(*d);
  return check_output_dims(dims);
}

Expected<Payload> filled(Args a, float value) {
  std::vector<std::int64_t> dims;
  if (auto e = shape_arg(*a[0], dims)) return *e;
  const Shape s = make_shape(dims);
  return Payload(Tensor::from(s, std::vector<float>(static_cast<std::size_t>(s.num_elements()), value)));
}

Expected<Payload> like(Args a, int value) {
  const Tensor* t = a[0]->tensor();
  if (!t) return precondition("operand must be a tensor");
  auto buf = dispatch_dtype(t->dtype(), [&](auto tag) {
    using T = typename decltype(tag)::type;
    return Tensor::Buffer(std::vector<T>(static_cast<std::size_t>(t->size()), static_cast<T>(value)));
  });
  return Payload(Tensor(t->shape(), std::move(buf)));
}

Expected<Payload> fill(Args a) {
  std::vector<std::int64_t> dims;
  if (auto e = shape_arg(*a[0], dims)) return *e;
  auto scalar = scalar_from_literal(*a[1]);
  if (!scalar || std::holds_alternative<Tuple>(a[1]->payload())) return precondition("fill value must be a scalar");
  const Shape s = make_shape(dims);
  std::vector<std::int64_t> zeros(static_cast<std::size_t>(s.num_elements()), 0);
  return Payload(take_elements(*scalar, s, zeros));
}

bool positive_count(const Value& v) {
  auto n = scalar_int(v);
  return n && *n >= 1 && *n <= 100;
}

Expected<Payload> eye(Args a) {
  if (!positive_count(*a[0])) return precondition("eye size must be in 1..100");
  const std::int64_t n = *scalar_int(*a[0]);
  std::vector<float> r(static_cast<std::size_t>(n * n), 0.0f);
  for (std::int64_t i = 0; i < n; ++i) r[static_cast<std::size_t>(i * n + i)] = 1.0f;
  return Payload(Tensor::from(Shape{n, n}, std::move(r)));
}

// dtype of a range built from scalar arguments: i64 if any tensor argument is
// i64, else i32.
DType range_dtype(Args a) {
  for (const auto& v : a)
    if (const Tensor* t = v->tensor(); t && t->dtype() == DType::I64) return DType::I64;
  return DType::I32;
}

Expected<Payload> range(std::int64_t start, std::int64_t limit, std::int64_t delta, DType dt) {
  if (delta == 0) return precondition("range delta must be non-zero");
  std::int64_t count = 0;
  if ((delta > 0 && limit > start) || (delta < 0 && limit < start)) {
    const std::int64_t span = delta > 0 ? limit - start : start - limit;
    const std::int64_t step = delta > 0 ? delta : -delta;
    if (span / step > 1000) return limit_exceeded("range too long");
    count = (span + step - 1) / step;
  }
  if (auto e = check_output_dims(std::vector<std::int64_t>{count})) return *e;
  std::vector<std::int64_t> xs(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) xs[static_cast<std::size_t>(i)] = start + i * delta;
  if (dt == DType::I64) return Payload(Tensor::from(Shape{count}, std::move(xs)));
  for (auto x : xs)
    if (!fits_i32(x)) return numeric_error("range value exceeds int32");
  return Payload(Tensor::from(Shape{count}, std::vector<std::int32_t>(xs.begin(), xs.end())));
}

bool range3_compat(Args a) {
  auto d = scalar_int(*a[2]);
  return scalar_int(*a[0]) && scalar_int(*a[1]) && d && *d != 0;
}

Expected<Payload> range_1(Args a) {
  auto limit = scalar_int(*a[0]);
  if (!limit) return precondition("range limit must be an integer scalar");
  if (*limit > 100000 || *limit < -100000) return limit_exceeded("range too long");
  return range(0, *limit, 1, range_dtype(a));
}

Expected<Payload> range_3(Args a) {
  if (!range3_compat(a)) return precondition("range needs integer scalars and a non-zero delta");
  const std::int64_t s = *scalar_int(*a[0]), l = *scalar_int(*a[1]), d = *scalar_int(*a[2]);
  if (s > (1LL << 40) || s < -(1LL << 40) || l > (1LL << 40) || l < -(1LL << 40)) return limit_exceeded("range too long");
  return range(s, l, d, range_dtype(a));
}

bool one_hot_compat(Args a) { return is_int_tensor(*a[0]) && positive_count(*a[1]); }

Expected<Payload> one_hot(Args a) {
  if (!one_hot_compat(a)) return precondition("one_hot needs integer indices and a depth in 1..100");
  const Tensor& t = *a[0]->tensor();
  const std::int64_t depth = *scalar_int(*a[1]);
  std::vector<std::int64_t> dims = t.shape().to_vector();
  dims.push_back(depth);
  if (auto e = check_output_dims(dims)) return *e;
  std::vector<float> r(static_cast<std::size_t>(t.size() * depth), 0.0f);
  for (std::int64_t i = 0; i < t.size(); ++i) {
    const std::int64_t x = t.as_int(i);
    if (x >= 0 && x < depth) r[static_cast<std::size_t>(i * depth + x)] = 1.0f;
  }
  return Payload(Tensor::from(make_shape(dims), std::move(r)));
}

Expected<Payload> sequence_mask(const Tensor& lengths, std::int64_t maxlen) {
  std::vector<std::int64_t> dims = lengths.shape().to_vector();
  dims.push_back(maxlen);
  if (auto e = check_output_dims(dims)) return *e;
  std::vector<std::uint8_t> r(static_cast<std::size_t>(lengths.size() * maxlen), 0);
  for (std::int64_t i = 0; i < lengths.size(); ++i) {
    const std::int64_t n = std::min(lengths.as_int(i), maxlen);
    for (std::int64_t j = 0; j < n; ++j) r[static_cast<std::size_t>(i * maxlen + j)] = 1;
  }
  return Payload(Tensor::from(make_shape(dims), std::move(r)));
}

Expected<Payload> sequence_mask_1(Args a) {
  const Tensor* t = a[0]->tensor();
  if (!t || !is_integer(t->dtype()) || t->size() == 0) return precondition("lengths must be a non-empty integer tensor");
  std::int64_t maxlen = t->as_int(0);
  for (std::int64_t i = 1; i < t->size(); ++i) maxlen = std::max(maxlen, t->as_int(i));
  if (maxlen < 0) return precondition("negative maximum length");
  return sequence_mask(*t, maxlen);
}

bool sequence_mask_2_compat(Args a) {
  auto m = scalar_int(*a[1]);
  return is_int_tensor(*a[0]) && m && *m >= 0;
}

Expected<Payload> sequence_mask_2(Args a) {
  if (!sequence_mask_2_compat(a)) return precondition("needs integer lengths and a non-negative maxlen");
  const std::int64_t m = *scalar_int(*a[1]);
  if (m > 100) return limit_exceeded("maxlen too large");
  return sequence_mask(*a[0]->tensor(), m);
}

}  // namespace

void append_construction_ops(std::vector<OpDef>& defs) {
  defs.push_back({"constant", 1, {"constant_value"}, {}, constant, "tf.constant({0})"});
  defs.push_back({"zeros", 1, {"shape_like"}, {}, +[](Args a) { return filled(a, 0.0f); }, "tf.zeros({0})"});
  defs.push_back({"ones", 1, {"shape_like"}, {}, +[](Args a) { return filled(a, 1.0f); }, "tf.ones({0})"});
  defs.push_back({"zeros_like", 1, {"tensor"}, {}, +[](Args a) { return like(a, 0); }, "tf.zeros_like({0})"});
  defs.push_back({"ones_like", 1, {"tensor"}, {}, +[](Args a) { return like(a, 1); }, "tf.ones_like({0})"});
  defs.push_back({"fill", 2, {"shape_like", "fill_value"}, {}, fill, "tf.fill({0}, {1})"});
  defs.push_back({"eye", 1, {"positive_scalar_int"}, {}, eye, "tf.eye({0})"});
  defs.push_back({"range_1", 1, {"scalar_int"}, {}, range_1, "tf.range({0})"});
  defs.push_back({"range_3", 3, {"scalar_int", "scalar_int", "scalar_int"}, {"nonzero_delta", range3_compat}, range_3,
                  "tf.range({0}, {1}, {2})"});
  defs.push_back({"one_hot", 2, {"int_tensor", "positive_scalar_int"}, {}, one_hot, "tf.one_hot({0}, {1})"});
  defs.push_back({"sequence_mask", 1, {"int_tensor"}, {}, sequence_mask_1, "tf.sequence_mask({0})"});
  defs.push_back({"sequence_mask_maxlen", 2, {"int_tensor", "scalar_int"}, {"maxlen_non_negative", sequence_mask_2_compat},
                  sequence_mask_2, "tf.sequence_mask({0}, {1})"});
}

}  // namespace tsynth::detail
