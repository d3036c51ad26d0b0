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

#include "op_util.hpp"

namespace tsynth::detail {

std::optional<std::vector<std::int64_t>> int_list(const Value& v) {
  if (auto i = v.primitive_int()) return std::vector<std::int64_t>{*i};
  if (const Tuple* tup = v.tuple()) {
    std::vector<std::int64_t> out;
    out.reserve(tup->items.size());
    for (const auto& item : tup->items) {
      auto x = item->primitive_int();
      if (!x) return std::nullopt;
      out.push_back(*x);
    }
    return out;
  }
  if (const Tensor* t = v.tensor()) {
    if (t->rank() != 1 || !is_integer(t->dtype())) return std::nullopt;
    std::vector<std::int64_t> out(static_cast<std::size_t>(t->size()));
    for (std::int64_t i = 0; i < t->size(); ++i) out[static_cast<std::size_t>(i)] = t->as_int(i);
    return out;
  }
  return std::nullopt;
}

std::optional<std::int64_t> scalar_int(const Value& v) {
  if (auto i = v.primitive_int()) return i;
  if (const Tensor* t = v.tensor(); t && t->rank() == 0 && is_integer(t->dtype())) return t->as_int(0);
  return std::nullopt;
}

Tensor take_elements(const Tensor& src, const Shape& out_shape, std::span<const std::int64_t> flat_indices) {
  auto buf = make_buffer(src.dtype(), static_cast<std::int64_t>(flat_indices.size()));
  std::visit(
      [&](auto& d) {
        using T = typename std::decay_t<decltype(d)>::value_type;
        auto s = src.data<T>();
        for (std::size_t i = 0; i < flat_indices.size(); ++i) d[i] = s[static_cast<std::size_t>(flat_indices[i])];
      },
      buf);
  return Tensor(out_shape, std::move(buf));
}

}  // namespace tsynth::detail
