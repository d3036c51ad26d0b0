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

#include "tensorsynth/literal.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace tsynth {

using nlohmann::json;

namespace {

struct Flat {
  std::vector<std::int64_t> dims;
  std::vector<const json*> leaves;
};

void flatten(const json& j, std::size_t depth, Flat& f) {
  if (j.is_array()) {
    if (depth == f.dims.size()) {
      f.dims.push_back(static_cast<std::int64_t>(j.size()));
    } else if (depth > f.dims.size() || f.dims[depth] != static_cast<std::int64_t>(j.size())) {
      throw LiteralError("ragged nested array at depth " + std::to_string(depth));
    }
    for (const auto& x : j) flatten(x, depth + 1, f);
    return;
  }
  if (depth != f.dims.size()) throw LiteralError("ragged nested array: scalar at depth " + std::to_string(depth));
  if (!j.is_number() && !j.is_boolean() && !j.is_string())
    throw LiteralError("tensor element must be a number or boolean, got " + j.dump());
  f.leaves.push_back(&j);
}

double element_double(const json& x) {
  if (x.is_string()) {
    const auto s = x.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw LiteralError("unexpected string element " + x.dump());
  }
  if (x.is_boolean()) return x.get<bool>() ? 1.0 : 0.0;
  return x.get<double>();
}

std::int64_t element_int(const json& x) {
  if (x.is_boolean()) return x.get<bool>() ? 1 : 0;
  if (x.is_number_integer()) return x.get<std::int64_t>();
  if (x.is_number_float()) {
    const double d = x.get<double>();
    if (d != std::trunc(d)) throw LiteralError("non-integral value " + x.dump() + " in integer tensor");
    return static_cast<std::int64_t>(d);
  }
  throw LiteralError("expected integer element, got " + x.dump());
}

Tensor build_tensor(const json& data, std::optional<DType> dtype, const json* shape) {
  Flat f;
  flatten(data, 0, f);
  if (!dtype) {
    bool all_bool = !f.leaves.empty();
    bool any_float = false;
    for (const json* x : f.leaves) {
      all_bool = all_bool && x->is_boolean();
      any_float = any_float || x->is_number_float() || x->is_string();
      if (x->is_boolean() && !all_bool) throw LiteralError("booleans mixed with numbers");
    }
    dtype = all_bool ? DType::Bool : any_float ? DType::F32 : DType::I32;
  }
  std::vector<std::int64_t> dims = f.dims;
  if (shape) {
    dims.clear();
    for (const auto& d : *shape) {
      if (!d.is_number_integer() || d.get<std::int64_t>() < 0) throw LiteralError("bad shape entry " + d.dump());
      dims.push_back(d.get<std::int64_t>());
    }
  }
  if (dims.size() > Shape::kMaxRank) throw LiteralError("rank too large");
  const Shape s(dims);
  if (s.num_elements() != static_cast<std::int64_t>(f.leaves.size()))
    throw LiteralError("shape " + s.to_string() + " does not match " + std::to_string(f.leaves.size()) + " elements");
  auto buf = dispatch_dtype(*dtype, [&](auto tag) {
    using T = typename decltype(tag)::type;
    std::vector<T> v;
    v.reserve(f.leaves.size());
    for (const json* x : f.leaves) {
      if constexpr (std::is_same_v<T, float>) {
        v.push_back(static_cast<float>(element_double(*x)));
      } else if constexpr (std::is_same_v<T, std::uint8_t>) {
        if (!x->is_boolean() && !(x->is_number_integer() && (x->get<std::int64_t>() == 0 || x->get<std::int64_t>() == 1)))
          throw LiteralError("bool tensor element must be true/false, got " + x->dump());
        v.push_back(static_cast<std::uint8_t>(element_int(*x)));
      } else {
        const std::int64_t n = element_int(*x);
        if (n < std::numeric_limits<T>::min() || n > std::numeric_limits<T>::max())
          throw LiteralError("value " + x->dump() + " out of range for " + std::string(dtype_name(*dtype)));
        v.push_back(static_cast<T>(n));
      }
    }
    return Tensor::Buffer(std::move(v));
  });
  return Tensor(s, std::move(buf));
}

DType dtype_field(const json& j) {
  DType dt;
  if (!j.is_string() || !parse_dtype(j.get<std::string>(), dt)) throw LiteralError("unknown dtype " + j.dump());
  return dt;
}

// Rounds a float to the shortest decimal that reads back as the same float,
// so JSON output stays short.
double pretty_float(float f) {
  const std::string s = format_float(f);
  return std::strtod(s.c_str(), nullptr);
}

json element_json(const Tensor& t, std::int64_t i) {
  switch (t.dtype()) {
    case DType::F32: {
      const float f = t.data<float>()[static_cast<std::size_t>(i)];
      if (std::isnan(f)) return "nan";
      if (std::isinf(f)) return f > 0 ? "inf" : "-inf";
      return pretty_float(f);
    }
    case DType::Bool: return t.as_int(i) != 0;
    default: return t.as_int(i);
  }
}

json nested_json(const Tensor& t, int dim, std::int64_t& pos) {
  if (dim == t.rank()) return element_json(t, pos++);
  json arr = json::array();
  for (std::int64_t i = 0; i < t.shape()[dim]; ++i) arr.push_back(nested_json(t, dim + 1, pos));
  return arr;
}

}  // namespace

Payload parse_literal(const json& j, BareScalars scalars) {
  if (j.is_object()) {
    if (j.contains("data")) {
      std::optional<DType> dt;
      if (j.contains("dtype")) dt = dtype_field(j.at("dtype"));
      return build_tensor(j.at("data"), dt, j.contains("shape") ? &j.at("shape") : nullptr);
    }
    if (j.size() != 1) throw LiteralError("unrecognized literal object " + j.dump());
    if (j.contains("int")) {
      if (!j.at("int").is_number_integer()) throw LiteralError("int literal must be an integer");
      return PrimitiveInt{j.at("int").get<std::int64_t>()};
    }
    if (j.contains("float")) return PrimitiveFloat{element_double(j.at("float"))};
    if (j.contains("bool")) {
      if (!j.at("bool").is_boolean()) throw LiteralError("bool literal must be true/false");
      return PrimitiveBool{j.at("bool").get<bool>()};
    }
    if (j.contains("dtype")) return DTypeLiteral{dtype_field(j.at("dtype"))};
    if (j.contains("tuple")) {
      if (!j.at("tuple").is_array()) throw LiteralError("tuple literal must be an array");
      Tuple t;
      for (const auto& item : j.at("tuple"))
        t.items.push_back(Value::leaf(parse_literal(item, BareScalars::AsPrimitives),
                                      Origin{OriginKind::UserConstant, ""}, 1));
      return t;
    }
    throw LiteralError("unrecognized literal object " + j.dump());
  }
  if (scalars == BareScalars::AsPrimitives) {
    if (j.is_boolean()) return PrimitiveBool{j.get<bool>()};
    if (j.is_number_integer()) return PrimitiveInt{j.get<std::int64_t>()};
    if (j.is_number_float()) return PrimitiveFloat{j.get<double>()};
    if (j.is_string()) {
      DType dt;
      if (parse_dtype(j.get<std::string>(), dt)) return DTypeLiteral{dt};
    }
  }
  if (j.is_array() || j.is_number() || j.is_boolean()) return build_tensor(j, std::nullopt, nullptr);
  throw LiteralError("unrecognized literal " + j.dump());
}

Payload parse_literal_text(const std::string& text, BareScalars scalars) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw LiteralError(e.what());
  }
  return parse_literal(j, scalars);
}

json to_literal(const Payload& p) {
  return std::visit(
      [](const auto& x) -> json {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, PrimitiveInt>) {
          return {{"int", x.value}};
        } else if constexpr (std::is_same_v<X, PrimitiveFloat>) {
          if (std::isnan(x.value)) return {{"float", "nan"}};
          if (std::isinf(x.value)) return {{"float", x.value > 0 ? "inf" : "-inf"}};
          return {{"float", x.value}};
        } else if constexpr (std::is_same_v<X, PrimitiveBool>) {
          return {{"bool", x.value}};
        } else if constexpr (std::is_same_v<X, DTypeLiteral>) {
          return {{"dtype", std::string(dtype_name(x.dtype))}};
        } else if constexpr (std::is_same_v<X, Tuple>) {
          json items = json::array();
          for (const auto& item : x.items) items.push_back(to_literal(item->payload()));
          return {{"tuple", items}};
        } else {
          std::int64_t pos = 0;
          json j = json::object();
          j["dtype"] = std::string(dtype_name(x.dtype()));
          j["shape"] = x.shape().to_vector();
          j["data"] = nested_json(x, 0, pos);
          return j;
        }
      },
      p);
}

ValuePtr literal_value(const json& j, Origin origin, int weight, BareScalars scalars) {
  return Value::leaf(parse_literal(j, scalars), std::move(origin), weight);
}

}  // namespace tsynth
