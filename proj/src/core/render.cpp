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

#include <charconv>
#include <cmath>

#include "tensorsynth/ops.hpp"

namespace tsynth {

namespace {

template <typename F>
std::string shortest(F x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string element_text(const Tensor& t, std::int64_t i, RenderStyle style) {
  switch (t.dtype()) {
    case DType::F32: return format_float(t.data<float>()[static_cast<std::size_t>(i)]);
    case DType::Bool:
      if (style == RenderStyle::Pythonic) return t.as_int(i) ? "True" : "False";
      return t.as_int(i) ? "true" : "false";
    default: return std::to_string(t.as_int(i));
  }
}

void nested(const Tensor& t, int dim, std::int64_t& pos, RenderStyle style, std::string& out) {
  if (dim == t.rank()) {
    out += element_text(t, pos++, style);
    return;
  }
  out += '[';
  for (std::int64_t i = 0; i < t.shape()[dim]; ++i) {
    if (i) out += ", ";
    nested(t, dim + 1, pos, style, out);
  }
  out += ']';
}

std::string tensor_text(const Tensor& t, RenderStyle style) {
  std::string data;
  std::int64_t pos = 0;
  if (style == RenderStyle::Pythonic) {
    nested(t, 0, pos, style, data);
    return "tf.constant(" + data + ", dtype=" + std::string(dtype_python_name(t.dtype())) + ")";
  }
  // Flat data plus explicit shape: unambiguous even with zero-length dims.
  std::string shape = "[";
  for (int i = 0; i < t.rank(); ++i) shape += (i ? ", " : "") + std::to_string(t.shape()[i]);
  shape += "]";
  data = "[";
  for (std::int64_t i = 0; i < t.size(); ++i) data += (i ? ", " : "") + element_text(t, i, style);
  data += "]";
  return "tensor(" + std::string(dtype_name(t.dtype())) + ", " + shape + ", " + data + ")";
}

std::string render_derived(const ExpressionNode& node, RenderStyle style) {
  std::vector<std::string> args;
  args.reserve(node.args.size());
  for (const auto& a : node.args) args.push_back(render(*a, style));
  if (style == RenderStyle::Functional) {
    std::string s = node.op->name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i];
    return s + ")";
  }
  const std::string& pat = node.op->pythonic;
  std::string s;
  for (std::size_t i = 0; i < pat.size(); ++i) {
    if (pat[i] == '{' && i + 2 < pat.size() && pat[i + 2] == '}' && pat[i + 1] >= '0' && pat[i + 1] <= '9') {
      const auto k = static_cast<std::size_t>(pat[i + 1] - '0');
      if (k < args.size()) s += args[k];
      i += 2;
    } else {
      s += pat[i];
    }
  }
  return s;
}

}  // namespace

std::string format_float(float f) { return shortest(f); }
std::string format_double(double d) { return shortest(d); }

std::string render_payload(const Payload& p, RenderStyle style) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, PrimitiveInt>) {
          return std::to_string(x.value);
        } else if constexpr (std::is_same_v<X, PrimitiveFloat>) {
          return format_double(x.value);
        } else if constexpr (std::is_same_v<X, PrimitiveBool>) {
          return x.value ? "True" : "False";
        } else if constexpr (std::is_same_v<X, DTypeLiteral>) {
          return std::string(dtype_python_name(x.dtype));
        } else if constexpr (std::is_same_v<X, Tuple>) {
          std::string s = "(";
          for (std::size_t i = 0; i < x.items.size(); ++i) s += (i ? ", " : "") + render(*x.items[i], style);
          if (x.items.size() == 1) s += ",";
          return s + ")";
        } else {
          return tensor_text(x, style);
        }
      },
      p);
}

std::string render(const Value& v, RenderStyle style) {
  if (const ExpressionNode* node = v.history()) return render_derived(*node, style);
  if (v.origin().kind == OriginKind::UserInput) return v.origin().label;
  return render_payload(v.payload(), style);
}

}  // namespace tsynth
