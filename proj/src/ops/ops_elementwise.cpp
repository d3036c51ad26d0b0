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

// Elementwise arithmetic and comparison. Binary ops broadcast and require
// both operands to share a dtype; integer overflow is an error.

#include "op_util.hpp"

namespace tsynth::detail {

namespace {

bool same_dtype_broadcastable(Args a, bool allow_bool) {
  const Tensor* x = a[0]->tensor();
  const Tensor* y = a[1]->tensor();
  if (!x || !y || x->dtype() != y->dtype()) return false;
  if (!allow_bool && x->dtype() == DType::Bool) return false;
  Shape out;
  return try_broadcast_shapes(x->shape(), y->shape(), out);
}

bool numeric_pair(Args a) { return same_dtype_broadcastable(a, false); }
bool any_pair(Args a) { return same_dtype_broadcastable(a, true); }
bool float_pair(Args a) { return numeric_pair(a) && a[0]->tensor()->dtype() == DType::F32; }

struct AddOp {
  template <typename T> bool operator()(T x, T y, T& o) const { return checked_add(x, y, o); }
};
struct SubOp {
  template <typename T> bool operator()(T x, T y, T& o) const { return checked_sub(x, y, o); }
};
struct MulOp {
  template <typename T> bool operator()(T x, T y, T& o) const { return checked_mul(x, y, o); }
};
struct DivOp {
  template <typename T> bool operator()(T x, T y, T& o) const {
    o = x / y;
    return true;
  }
};
struct MaxOp {
  template <typename T> bool operator()(T x, T y, T& o) const {
    if constexpr (std::is_floating_point_v<T>) {
      if (std::isnan(x) || std::isnan(y)) {
        o = std::numeric_limits<T>::quiet_NaN();
        return true;
      }
    }
    o = x < y ? y : x;
    return true;
  }
};
struct MinOp {
  template <typename T> bool operator()(T x, T y, T& o) const {
    if constexpr (std::is_floating_point_v<T>) {
      if (std::isnan(x) || std::isnan(y)) {
        o = std::numeric_limits<T>::quiet_NaN();
        return true;
      }
    }
    o = y < x ? y : x;
    return true;
  }
};

struct GreaterOp {
  template <typename T> bool operator()(T x, T y) const { return x > y; }
};
struct GreaterEqualOp {
  template <typename T> bool operator()(T x, T y) const { return x >= y; }
};
struct EqualOp {
  template <typename T> bool operator()(T x, T y) const { return x == y; }
};
struct NotEqualOp {
  template <typename T> bool operator()(T x, T y) const { return x != y; }
};

template <typename Op>
Expected<Payload> arithmetic(Args a, bool (*compat)(Args)) {
  if (!compat(a)) return precondition("operands must be broadcastable numeric tensors of one dtype");
  const Tensor& x = *a[0]->tensor();
  const Tensor& y = *a[1]->tensor();
  const Shape out = broadcast_shapes(x.shape(), y.shape());
  if (auto e = check_output_dims(out.to_vector())) return *e;
  return dispatch_dtype(x.dtype(), [&](auto tag) -> Expected<Payload> {
    using T = typename decltype(tag)::type;
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      return precondition("boolean operands");
    } else {
      std::vector<T> r(static_cast<std::size_t>(out.num_elements()));
      auto dx = x.data<T>();
      auto dy = y.data<T>();
      bool ok = true;
      Op op;
      broadcast_for_each(out, x.shape(), y.shape(), [&](std::int64_t k, std::int64_t i, std::int64_t j) {
        if (!op(dx[static_cast<std::size_t>(i)], dy[static_cast<std::size_t>(j)], r[static_cast<std::size_t>(k)]))
          ok = false;
      });
      if (!ok) return numeric_error("integer overflow");
      return Payload(Tensor::from(out, std::move(r)));
    }
  });
}

template <typename Op>
Expected<Payload> comparison(Args a, bool (*compat)(Args)) {
  if (!compat(a)) return precondition("operands must be broadcastable tensors of one dtype");
  const Tensor& x = *a[0]->tensor();
  const Tensor& y = *a[1]->tensor();
  const Shape out = broadcast_shapes(x.shape(), y.shape());
  if (auto e = check_output_dims(out.to_vector())) return *e;
  std::vector<std::uint8_t> r(static_cast<std::size_t>(out.num_elements()));
  dispatch_dtype(x.dtype(), [&](auto tag) {
    using T = typename decltype(tag)::type;
    auto dx = x.data<T>();
    auto dy = y.data<T>();
    Op op;
    broadcast_for_each(out, x.shape(), y.shape(), [&](std::int64_t k, std::int64_t i, std::int64_t j) {
      r[static_cast<std::size_t>(k)] = op(dx[static_cast<std::size_t>(i)], dy[static_cast<std::size_t>(j)]) ? 1 : 0;
    });
  });
  return Payload(Tensor::from(out, std::move(r)));
}

bool unary_numeric(Args a) { return is_numeric_tensor(*a[0]); }

template <typename Fn>
Expected<Payload> unary(Args a, Fn&& fn) {
  if (!unary_numeric(a)) return precondition("operand must be a numeric tensor");
  const Tensor& x = *a[0]->tensor();
  return dispatch_dtype(x.dtype(), [&](auto tag) -> Expected<Payload> {
    using T = typename decltype(tag)::type;
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      return precondition("boolean operand");
    } else {
      auto dx = x.data<T>();
      std::vector<T> r(dx.size());
      for (std::size_t i = 0; i < dx.size(); ++i)
        if (!fn(dx[i], r[i])) return numeric_error("integer overflow");
      return Payload(Tensor::from(x.shape(), std::move(r)));
    }
  });
}

struct AbsFn {
  template <typename T> bool operator()(T x, T& o) const {
    if constexpr (std::is_integral_v<T>) {
      if (x == std::numeric_limits<T>::min()) return false;
      o = x < 0 ? -x : x;
    } else {
      o = std::fabs(x);
    }
    return true;
  }
};
struct SquareFn {
  template <typename T> bool operator()(T x, T& o) const { return checked_mul(x, x, o); }
};
struct SignFn {
  template <typename T> bool operator()(T x, T& o) const {
    if constexpr (std::is_floating_point_v<T>) {
      if (std::isnan(x)) {
        o = x;
        return true;
      }
    }
    o = static_cast<T>((x > 0) - (x < 0));
    return true;
  }
};

bool where3_compat(Args a) {
  const Tensor* c = a[0]->tensor();
  const Tensor* x = a[1]->tensor();
  const Tensor* y = a[2]->tensor();
  if (!c || !x || !y || c->dtype() != DType::Bool || x->dtype() != y->dtype()) return false;
  Shape s1, s2;
  return try_broadcast_shapes(x->shape(), y->shape(), s1) && try_broadcast_shapes(c->shape(), s1, s2);
}

Expected<Payload> where3(Args a) {
  if (!where3_compat(a)) return precondition("where needs a bool condition and two same-dtype branches");
  const Tensor& c = *a[0]->tensor();
  const Tensor& x = *a[1]->tensor();
  const Tensor& y = *a[2]->tensor();
  const Shape out = broadcast_shapes(c.shape(), broadcast_shapes(x.shape(), y.shape()));
  if (auto e = check_output_dims(out.to_vector())) return *e;
  auto buf = make_buffer(x.dtype(), out.num_elements());
  auto dc = c.data<std::uint8_t>();
  for (std::int64_t k = 0; k < out.num_elements(); ++k) {
    const bool pick = dc[static_cast<std::size_t>(broadcast_source_index(k, out, c.shape()))] != 0;
    const Tensor& src = pick ? x : y;
    copy_element(src, broadcast_source_index(k, out, src.shape()), buf, k);
  }
  return Payload(Tensor(out, std::move(buf)));
}

constexpr CombinationFilter kNumericPair{"numeric_pair", numeric_pair};
constexpr CombinationFilter kAnyPair{"same_dtype_pair", any_pair};
constexpr CombinationFilter kFloatPair{"float_pair", float_pair};

}  // namespace

void append_elementwise_ops(std::vector<OpDef>& defs) {
  using F = std::array<std::string_view, kMaxArity>;
  const F num2{"numeric_tensor", "numeric_tensor"};
  const F any2{"tensor", "tensor"};
  defs.push_back({"add", 2, num2, kNumericPair,
                  +[](Args a) { return arithmetic<AddOp>(a, numeric_pair); }, "tf.add({0}, {1})"});
  defs.push_back({"subtract", 2, num2, kNumericPair,
                  +[](Args a) { return arithmetic<SubOp>(a, numeric_pair); }, "tf.subtract({0}, {1})"});
  defs.push_back({"multiply", 2, num2, kNumericPair,
                  +[](Args a) { return arithmetic<MulOp>(a, numeric_pair); }, "tf.multiply({0}, {1})"});
  defs.push_back({"divide", 2, {"float_tensor", "float_tensor"}, kFloatPair,
                  +[](Args a) { return arithmetic<DivOp>(a, float_pair); }, "tf.divide({0}, {1})"});
  defs.push_back({"maximum", 2, num2, kNumericPair,
                  +[](Args a) { return arithmetic<MaxOp>(a, numeric_pair); }, "tf.maximum({0}, {1})"});
  defs.push_back({"minimum", 2, num2, kNumericPair,
                  +[](Args a) { return arithmetic<MinOp>(a, numeric_pair); }, "tf.minimum({0}, {1})"});
  defs.push_back({"greater", 2, num2, kNumericPair,
                  +[](Args a) { return comparison<GreaterOp>(a, numeric_pair); }, "tf.greater({0}, {1})"});
  defs.push_back({"greater_equal", 2, num2, kNumericPair,
                  +[](Args a) { return comparison<GreaterEqualOp>(a, numeric_pair); },
                  "tf.greater_equal({0}, {1})"});
  defs.push_back({"equal", 2, any2, kAnyPair,
                  +[](Args a) { return comparison<EqualOp>(a, any_pair); }, "tf.equal({0}, {1})"});
  defs.push_back({"not_equal", 2, any2, kAnyPair,
                  +[](Args a) { return comparison<NotEqualOp>(a, any_pair); }, "tf.not_equal({0}, {1})"});
  defs.push_back({"abs", 1, {"numeric_tensor"}, {}, +[](Args a) { return unary(a, AbsFn{}); }, "tf.abs({0})"});
  defs.push_back(
      {"square", 1, {"numeric_tensor"}, {}, +[](Args a) { return unary(a, SquareFn{}); }, "tf.square({0})"});
  defs.push_back({"sign", 1, {"numeric_tensor"}, {}, +[](Args a) { return unary(a, SignFn{}); }, "tf.sign({0})"});
  defs.push_back({"where_3", 3, {"bool_tensor", "tensor", "tensor"}, {"where_branches", where3_compat}, where3,
                  "tf.where({0}, {1}, {2})"});
}

}  // namespace tsynth::detail
