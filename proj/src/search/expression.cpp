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


#include "tensorsynth/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

namespace tsynth {

namespace {

ValuePtr constant_leaf(Payload p) {
  return Value::leaf(std::move(p), Origin{OriginKind::UserConstant, ""}, 1);
}

class Parser {
 public:
  Parser(std::string_view text, const OperationRegistry& registry, const Bindings& inputs)
      : text_(text), registry_(registry), inputs_(inputs) {}

  Expected<ValuePtr> parse_all() {
    Expected<ValuePtr> v = expr();
    skip_ws();
    if (v && pos_ != text_.size()) fail("trailing text");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const { throw ExpressionSyntaxError(pos_, why); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  std::string_view identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '.'))
      ++pos_;
    if (start == pos_) fail("expected identifier");
    return text_.substr(start, pos_ - start);
  }

  // A numeric token, or nan/inf/-inf. Returns the text and whether it is a float.
  std::pair<std::string_view, bool> number_token() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    if (text_.substr(pos_).starts_with("inf")) {
      pos_ += 3;
      return {text_.substr(start, pos_ - start), true};
    }
    if (text_.substr(pos_).starts_with("nan")) {
      pos_ += 3;
      return {text_.substr(start, pos_ - start), true};
    }
    bool is_float = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '.' || c == 'e' || c == 'E') {
        is_float = true;
        ++pos_;
        if ((c == 'e' || c == 'E') && pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected number");
    return {text_.substr(start, pos_ - start), is_float};
  }

  double to_double(std::string_view tok) {
    std::string_view t = tok;
    bool neg = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
      neg = t[0] == '-';
      t.remove_prefix(1);
    }
    double d = 0;
    if (t == "inf") {
      d = std::numeric_limits<double>::infinity();
    } else if (t == "nan") {
      d = std::numeric_limits<double>::quiet_NaN();
    } else {
      auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), d);
      if (ec != std::errc() || p != t.data() + t.size()) fail("bad number");
    }
    return neg ? -d : d;
  }

  std::int64_t to_int(std::string_view tok) {
    if (!tok.empty() && tok[0] == '+') tok.remove_prefix(1);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) fail("bad integer");
    return v;
  }

  Expected<ValuePtr> expr() {
    const char c = peek();
    if (c == '(') return tuple();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      auto [tok, is_float] = number_token();
      if (is_float) return constant_leaf(PrimitiveFloat{to_double(tok)});
      return constant_leaf(PrimitiveInt{to_int(tok)});
    }
    const std::size_t start = pos_;
    const std::string_view id = identifier();
    if (id.starts_with("tf.")) {
      DType dt;
      if (!parse_dtype(id, dt)) {
        pos_ = start;
        fail("unknown dtype " + std::string(id));
      }
      return constant_leaf(DTypeLiteral{dt});
    }
    if (peek() == '(') {
      if (id == "tensor") return tensor_literal();
      return call(id, start);
    }
    if (id == "True") return constant_leaf(PrimitiveBool{true});
    if (id == "False") return constant_leaf(PrimitiveBool{false});
    if (auto it = inputs_.find(id); it != inputs_.end()) return it->second;
    if (id == "nan" || id == "inf") return constant_leaf(PrimitiveFloat{to_double(id)});
    pos_ = start;
    fail("unbound name " + std::string(id));
  }

  Expected<ValuePtr> tuple() {
    expect('(');
    Tuple t;
    while (!eat(')')) {
      Expected<ValuePtr> item = expr();
      if (!item) return item;
      t.items.push_back(item.take());
      if (!eat(',')) {
        expect(')');
        break;
      }
    }
    return constant_leaf(std::move(t));
  }

  Expected<ValuePtr> call(std::string_view name, std::size_t start) {
    const OperationSpec* op = registry_.find(name);
    if (!op) {
      pos_ = start;
      fail("unknown operation " + std::string(name));
    }
    expect('(');
    std::vector<ValuePtr> args;
    while (!eat(')')) {
      Expected<ValuePtr> a = expr();
      if (!a) return a;
      args.push_back(a.take());
      if (!eat(',')) {
        expect(')');
        break;
      }
    }
    if (static_cast<int>(args.size()) != op->arity) {
      pos_ = start;
      fail(op->name + " takes " + std::to_string(op->arity) + " arguments");
    }
    return apply_operation(*op, args, op->base_weight);
  }

  Expected<ValuePtr> tensor_literal() {
    expect('(');
    DType dt;
    if (!parse_dtype(identifier(), dt)) fail("unknown dtype");
    expect(',');
    expect('[');
    std::vector<std::int64_t> dims;
    while (!eat(']')) {
      dims.push_back(to_int(number_token().first));
      if (!eat(',')) {
        expect(']');
        break;
      }
    }
    expect(',');
    expect('[');
    std::vector<std::string_view> elems;
    while (!eat(']')) {
      const char c = peek();
      if (c == 't' || c == 'f') {
        const std::string_view w = identifier();
        if (w != "true" && w != "false") fail("bad bool element");
        elems.push_back(w);
      } else {
        elems.push_back(number_token().first);
      }
      if (!eat(',')) {
        expect(']');
        break;
      }
    }
    expect(')');
    if (dims.size() > 4) fail("rank too large");
    for (auto d : dims)
      if (d < 0) fail("negative dimension");
    const Shape shape(dims);
    if (shape.num_elements() != static_cast<std::int64_t>(elems.size())) fail("element count does not match shape");
    Tensor::Buffer buf = dispatch_dtype(dt, [&](auto tag) {
      using T = typename decltype(tag)::type;
      std::vector<T> v;
      for (auto e : elems) {
        if constexpr (std::is_same_v<T, std::uint8_t>) {
          if (e != "true" && e != "false") fail("bool tensor needs true/false elements");
          v.push_back(e == "true");
        } else if constexpr (std::is_same_v<T, float>) {
          v.push_back(static_cast<float>(to_double(e)));
        } else {
          const std::int64_t x = to_int(e);
          if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) fail("element out of range");
          v.push_back(static_cast<T>(x));
        }
      }
      return Tensor::Buffer(std::move(v));
    });
    return constant_leaf(Tensor(shape, std::move(buf)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  const OperationRegistry& registry_;
  const Bindings& inputs_;
};

void collect_inputs(const Value& v, std::set<std::string>& out) {
  if (const ExpressionNode* n = v.history()) {
    for (const auto& a : n->args) collect_inputs(*a, out);
  } else if (v.origin().kind == OriginKind::UserInput) {
    out.insert(v.origin().label);
  }
}

void collect_ops(const Value& v, std::set<std::string>& out) {
  if (const ExpressionNode* n = v.history()) {
    out.insert(n->op->name);
    for (const auto& a : n->args) collect_ops(*a, out);
  }
}

}  // namespace

Expected<ValuePtr> evaluate_text(std::string_view text, const OperationRegistry& registry, const Bindings& inputs) {
  return Parser(text, registry, inputs).parse_all();
}

Expected<ValuePtr> evaluate_expression(const Value& expr, const Bindings& inputs) {
  const ExpressionNode* node = expr.history();
  if (!node) {
    if (expr.origin().kind == OriginKind::UserInput) {
      auto it = inputs.find(expr.origin().label);
      if (it == inputs.end()) return precondition("unbound input " + expr.origin().label);
      return it->second;
    }
    return std::make_shared<const Value>(expr);
  }
  std::vector<ValuePtr> args;
  args.reserve(node->args.size());
  for (const auto& a : node->args) {
    Expected<ValuePtr> r = evaluate_expression(*a, inputs);
    if (!r) return r;
    args.push_back(r.take());
  }
  return apply_operation(*node->op, args, node->op_weight);
}

std::vector<std::string> referenced_inputs(const Value& expr) {
  std::set<std::string> s;
  collect_inputs(expr, s);
  return {s.begin(), s.end()};
}

std::vector<std::string> used_ops(const Value& expr) {
  std::set<std::string> s;
  collect_ops(expr, s);
  return {s.begin(), s.end()};
}

}  // namespace tsynth
