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

#include <algorithm>

#include "op_util.hpp"

namespace tsynth {

using namespace detail;

namespace {

bool any(const Value&) { return true; }
bool tensor(const Value& v) { return v.is_tensor(); }
bool numeric_tensor(const Value& v) { return is_numeric_tensor(v); }
bool int_tensor(const Value& v) { return is_int_tensor(v); }
bool int32_tensor(const Value& v) {
  const Tensor* t = v.tensor();
  return t && t->dtype() == DType::I32;
}
bool float_tensor(const Value& v) {
  const Tensor* t = v.tensor();
  return t && t->dtype() == DType::F32;
}
bool bool_tensor(const Value& v) {
  const Tensor* t = v.tensor();
  return t && t->dtype() == DType::Bool;
}
bool nonscalar_tensor(const Value& v) {
  const Tensor* t = v.tensor();
  return t && t->rank() >= 1;
}
bool nonscalar_numeric_tensor(const Value& v) { return nonscalar_tensor(v) && is_numeric_tensor(v); }
bool vector_tensor(const Value& v) {
  const Tensor* t = v.tensor();
  return t && t->rank() == 1;
}
bool int_vector_tensor(const Value& v) { return vector_tensor(v) && is_int_tensor(v); }
bool nonscalar_int_tensor(const Value& v) { return nonscalar_tensor(v) && is_int_tensor(v); }
bool nonscalar_bool_tensor(const Value& v) { return nonscalar_tensor(v) && bool_tensor(v); }
bool matrix_plus_tensor(const Value& v) {
  const Tensor* t = v.tensor();
  return t && t->rank() >= 2;
}
bool matrix_plus_numeric_tensor(const Value& v) { return matrix_plus_tensor(v) && is_numeric_tensor(v); }
bool axis(const Value& v) { return is_axis_literal(v); }
bool int_primitive(const Value& v) { return v.primitive_int().has_value(); }
bool batch_dims(const Value& v) {
  auto b = v.primitive_int();
  return b && *b >= 0 && *b <= 4;
}
bool dtype_literal(const Value& v) { return std::holds_alternative<DTypeLiteral>(v.payload()); }
bool shape_like(const Value& v) {
  auto dims = int_list(v);
  return dims && shape_within_limits(*dims);
}
bool reshape_shape(const Value& v) {
  if (v.primitive_int()) return false;
  auto dims = int_list(v);
  if (!dims || dims->size() > 4) return false;
  return std::all_of(dims->begin(), dims->end(), [](std::int64_t d) { return d >= -1; });
}
bool int_sequence(const Value& v) {
  if (v.primitive_int()) return false;
  auto dims = int_list(v);
  return dims && dims->size() <= 4;
}
bool scalar_integer(const Value& v) { return scalar_int(v).has_value(); }
bool positive_scalar_integer(const Value& v) {
  auto n = scalar_int(v);
  return n && *n >= 1 && *n <= 100;
}
bool tensor_tuple(const Value& v) {
  const Tuple* t = v.tuple();
  if (!t || t->items.empty()) return false;
  return std::all_of(t->items.begin(), t->items.end(), [](const ValuePtr& x) { return x->is_tensor(); });
}
bool sequence(const Value& v) { return v.tuple() != nullptr || nonscalar_tensor(v); }
bool tuple_item(const Value& v) {
  if (v.primitive_int() || v.is_tensor()) return true;
  const Tuple* t = v.tuple();
  return t && std::all_of(t->items.begin(), t->items.end(),
                          [](const ValuePtr& x) { return x->primitive_int().has_value(); });
}
bool int_tuple(const Value& v) {
  const Tuple* t = v.tuple();
  return t && std::all_of(t->items.begin(), t->items.end(),
                          [](const ValuePtr& x) { return x->primitive_int().has_value(); });
}
bool paddings(const Value& v) {
  if (const Tensor* t = v.tensor()) {
    if (!is_integer(t->dtype()) || t->rank() != 2 || t->shape()[1] != 2 || t->shape()[0] > 4) return false;
    for (std::int64_t i = 0; i < t->size(); ++i)
      if (t->as_int(i) < 0) return false;
    return true;
  }
  const Tuple* t = v.tuple();
  if (!t || t->items.empty() || t->items.size() > 4) return false;
  for (const auto& row : t->items) {
    const Tuple* pair = row->tuple();
    if (!pair || pair->items.size() != 2) return false;
    for (const auto& x : pair->items) {
      auto p = x->primitive_int();
      if (!p || *p < 0) return false;
    }
  }
  return true;
}
bool constant_value(const Value& v) {
  const auto& p = v.payload();
  if (std::holds_alternative<PrimitiveInt>(p) || std::holds_alternative<PrimitiveFloat>(p) ||
      std::holds_alternative<PrimitiveBool>(p))
    return true;
  const Tuple* t = v.tuple();
  return t && !t->items.empty() &&
         std::all_of(t->items.begin(), t->items.end(), [](const ValuePtr& x) { return x->primitive_int().has_value(); });
}
bool fill_value(const Value& v) {
  const auto& p = v.payload();
  if (std::holds_alternative<PrimitiveInt>(p) || std::holds_alternative<PrimitiveFloat>(p) ||
      std::holds_alternative<PrimitiveBool>(p))
    return true;
  const Tensor* t = v.tensor();
  return t && t->rank() == 0;
}

constexpr ArgFilter kFilters[] = {
    {"any", any},
    {"tensor", tensor},
    {"numeric_tensor", numeric_tensor},
    {"int_tensor", int_tensor},
    {"int32_tensor", int32_tensor},
    {"float_tensor", float_tensor},
    {"bool_tensor", bool_tensor},
    {"nonscalar_tensor", nonscalar_tensor},
    {"nonscalar_numeric_tensor", nonscalar_numeric_tensor},
    {"nonscalar_int_tensor", nonscalar_int_tensor},
    {"nonscalar_bool_tensor", nonscalar_bool_tensor},
    {"vector_tensor", vector_tensor},
    {"int_vector_tensor", int_vector_tensor},
    {"matrix_plus_tensor", matrix_plus_tensor},
    {"matrix_plus_numeric_tensor", matrix_plus_numeric_tensor},
    {"axis", axis},
    {"int_primitive", int_primitive},
    {"batch_dims", batch_dims},
    {"dtype", dtype_literal},
    {"shape_like", shape_like},
    {"reshape_shape", reshape_shape},
    {"int_sequence", int_sequence},
    {"scalar_int", scalar_integer},
    {"positive_scalar_int", positive_scalar_integer},
    {"tensor_tuple", tensor_tuple},
    {"sequence", sequence},
    {"tuple_item", tuple_item},
    {"int_tuple", int_tuple},
    {"paddings", paddings},
    {"constant_value", constant_value},
    {"fill_value", fill_value},
};

}  // namespace

std::span<const ArgFilter> arg_filter_table() { return kFilters; }

FilterId arg_filter_id(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kFilters); ++i)
    if (kFilters[i].name == name) return static_cast<FilterId>(i);
  throw std::invalid_argument("unknown argument filter: " + std::string(name));
}

}  // namespace tsynth
