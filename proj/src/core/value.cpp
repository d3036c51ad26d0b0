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

#include "tensorsynth/value.hpp"

#include <bit>
#include <cmath>

namespace tsynth {

namespace {

constexpr std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Hasher {
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  void add(std::uint64_t x) { h = splitmix(h ^ x); }
};

std::uint32_t canonical_bits(float f) {
  if (std::isnan(f)) return 0x7FC00000U;
  if (f == 0.0f) return 0;
  return std::bit_cast<std::uint32_t>(f);
}

std::uint64_t canonical_bits(double d) {
  if (std::isnan(d)) return 0x7FF8000000000000ULL;
  if (d == 0.0) return 0;
  return std::bit_cast<std::uint64_t>(d);
}

void hash_payload(Hasher& hs, const Payload& p) {
  hs.add(p.index());
  std::visit(
      [&](const auto& x) {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, PrimitiveInt>) {
          hs.add(static_cast<std::uint64_t>(x.value));
        } else if constexpr (std::is_same_v<X, PrimitiveFloat>) {
          hs.add(canonical_bits(x.value));
        } else if constexpr (std::is_same_v<X, PrimitiveBool>) {
          hs.add(x.value ? 1 : 0);
        } else if constexpr (std::is_same_v<X, DTypeLiteral>) {
          hs.add(static_cast<std::uint64_t>(x.dtype));
        } else if constexpr (std::is_same_v<X, Tuple>) {
          hs.add(x.items.size());
          for (const auto& item : x.items) hs.add(item->fingerprint());
        } else {
          const Tensor& t = x;
          hs.add(static_cast<std::uint64_t>(t.dtype()));
          hs.add(static_cast<std::uint64_t>(t.rank()));
          for (int i = 0; i < t.rank(); ++i) hs.add(static_cast<std::uint64_t>(t.shape()[i]));
          std::visit(
              [&](const auto& buf) {
                using T = typename std::decay_t<decltype(buf)>::value_type;
                for (const T& e : buf) {
                  if constexpr (std::is_same_v<T, float>) {
                    hs.add(canonical_bits(e));
                  } else {
                    hs.add(static_cast<std::uint64_t>(static_cast<std::int64_t>(e)));
                  }
                }
              },
              t.buffer());
        }
      },
      p);
}

bool tensors_equal_exact(const Tensor& a, const Tensor& b) {
  if (a.dtype() != b.dtype() || !(a.shape() == b.shape())) return false;
  if (a.dtype() == DType::F32) {
    auto da = a.data<float>();
    auto db = b.data<float>();
    for (std::size_t i = 0; i < da.size(); ++i)
      if (canonical_bits(da[i]) != canonical_bits(db[i])) return false;
    return true;
  }
  return a.buffer() == b.buffer();
}

bool close(double x, double y, const ToleranceConfig& tol) {
  if (std::isnan(x) || std::isnan(y)) return std::isnan(x) && std::isnan(y);
  if (x == y) return true;
  // Infinities only match themselves (handled above).
  if (std::isinf(x) || std::isinf(y)) return false;
  return std::fabs(x - y) <= std::max(tol.abs_tol, tol.rel_tol * std::max(std::fabs(x), std::fabs(y)));
}

}  // namespace

Value::Value(Payload payload, Origin origin, std::optional<ExpressionNode> history, int weight)
    : payload_(std::move(payload)),
      history_(std::move(history)),
      origin_(std::move(origin)),
      weight_(weight),
      fingerprint_(tsynth::fingerprint(payload_)) {}

ValuePtr Value::leaf(Payload payload, Origin origin, int weight) {
  return std::make_shared<const Value>(std::move(payload), std::move(origin), std::nullopt, weight);
}

ValuePtr Value::input(Payload payload, std::string name, int weight) {
  return leaf(std::move(payload), Origin{OriginKind::UserInput, std::move(name)}, weight);
}

ValuePtr Value::derived(Payload payload, const OperationSpec& op, std::vector<ValuePtr> args, int op_weight) {
  int w = op_weight;
  for (const auto& a : args) w += a->weight();
  return std::make_shared<const Value>(std::move(payload), Origin{},
                                       ExpressionNode{&op, std::move(args), op_weight}, w);
}

Fingerprint fingerprint(const Payload& p) {
  Hasher hs;
  hash_payload(hs, p);
  return hs.h;
}

Fingerprint combine_fingerprints(Fingerprint seed, Fingerprint next) { return splitmix(seed ^ splitmix(next)); }

bool equal_exact(const Payload& a, const Payload& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using X = std::decay_t<decltype(x)>;
        const X& y = std::get<X>(b);
        if constexpr (std::is_same_v<X, PrimitiveInt>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<X, PrimitiveFloat>) {
          return canonical_bits(x.value) == canonical_bits(y.value);
        } else if constexpr (std::is_same_v<X, PrimitiveBool>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<X, DTypeLiteral>) {
          return x.dtype == y.dtype;
        } else if constexpr (std::is_same_v<X, Tuple>) {
          if (x.items.size() != y.items.size()) return false;
          for (std::size_t i = 0; i < x.items.size(); ++i)
            if (!equal_exact(x.items[i]->payload(), y.items[i]->payload())) return false;
          return true;
        } else {
          return tensors_equal_exact(x, y);
        }
      },
      a);
}

bool equal_output(const Payload& candidate, const Payload& target, const ToleranceConfig& tol) {
  if (candidate.index() != target.index()) return false;
  if (const auto* c = std::get_if<Tensor>(&candidate)) {
    const auto& t = std::get<Tensor>(target);
    if (c->dtype() != t.dtype() || !(c->shape() == t.shape())) return false;
    if (c->dtype() != DType::F32) return c->buffer() == t.buffer();
    auto dc = c->data<float>();
    auto dt = t.data<float>();
    for (std::size_t i = 0; i < dc.size(); ++i)
      if (!close(dc[i], dt[i], tol)) return false;
    return true;
  }
  if (const auto* c = std::get_if<PrimitiveFloat>(&candidate))
    return close(c->value, std::get<PrimitiveFloat>(target).value, tol);
  if (const auto* c = std::get_if<Tuple>(&candidate)) {
    const auto& t = std::get<Tuple>(target);
    if (c->items.size() != t.items.size()) return false;
    for (std::size_t i = 0; i < c->items.size(); ++i)
      if (!equal_output(c->items[i]->payload(), t.items[i]->payload(), tol)) return false;
    return true;
  }
  return equal_exact(candidate, target);
}

bool shape_within_limits(std::span<const std::int64_t> dims, const Limits& limits) {
  if (static_cast<int>(dims.size()) > limits.max_rank) return false;
  std::int64_t n = 1;
  for (auto d : dims) {
    if (d < 0 || d > limits.max_dim) return false;
    n *= d;
  }
  return n <= limits.max_elements;
}

bool within_limits(const Payload& p, const Limits& limits) {
  if (const auto* t = std::get_if<Tensor>(&p)) {
    if (t->rank() > limits.max_rank) return false;
    for (int i = 0; i < t->rank(); ++i)
      if (t->shape()[i] > limits.max_dim) return false;
    return t->size() <= limits.max_elements;
  }
  if (const auto* tup = std::get_if<Tuple>(&p)) {
    if (tup->items.size() > limits.max_tuple_length) return false;
    for (const auto& item : tup->items)
      if (!within_limits(item->payload(), limits)) return false;
  }
  return true;
}

int expression_weight(const Value& v) {
  const ExpressionNode* node = v.history();
  if (!node) return v.weight();
  int w = node->op_weight;
  for (const auto& a : node->args) w += expression_weight(*a);
  return w;
}

int operation_count(const Value& v) {
  const ExpressionNode* node = v.history();
  if (!node) return 0;
  int n = 1;
  for (const auto& a : node->args) n += operation_count(*a);
  return n;
}

}  // namespace tsynth
