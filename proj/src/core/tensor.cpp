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

#include "tensorsynth/tensor.hpp"

#include <algorithm>

namespace tsynth {

std::string_view dtype_name(DType dt) {
  switch (dt) {
    case DType::I32: return "i32";
    case DType::I64: return "i64";
    case DType::F32: return "f32";
    case DType::Bool: return "bool";
  }
  return "?";
}

std::string_view dtype_python_name(DType dt) {
  switch (dt) {
    case DType::I32: return "tf.int32";
    case DType::I64: return "tf.int64";
    case DType::F32: return "tf.float32";
    case DType::Bool: return "tf.bool";
  }
  return "?";
}

bool parse_dtype(std::string_view text, DType& out) {
  if (text.starts_with("tf.")) text.remove_prefix(3);
  if (text == "i32" || text == "int32") { out = DType::I32; return true; }
  if (text == "i64" || text == "int64") { out = DType::I64; return true; }
  if (text == "f32" || text == "float32") { out = DType::F32; return true; }
  if (text == "bool") { out = DType::Bool; return true; }
  return false;
}

Shape::Shape(std::initializer_list<std::int64_t> dims) {
  for (auto d : dims) push_back(d);
}

Shape::Shape(std::span<const std::int64_t> dims) {
  for (auto d : dims) push_back(d);
}

void Shape::push_back(std::int64_t d) {
  if (rank_ >= kMaxRank) throw std::length_error("Shape: rank exceeds capacity");
  if (d < 0) throw std::invalid_argument("Shape: negative dimension");
  dims_[rank_++] = static_cast<std::int32_t>(d);
}

std::int64_t Shape::num_elements() const {
  std::int64_t n = 1;
  for (int i = 0; i < rank_; ++i) n *= dims_[static_cast<std::size_t>(i)];
  return n;
}

std::vector<std::int64_t> Shape::to_vector() const {
  return std::vector<std::int64_t>(dims_.begin(), dims_.begin() + rank_);
}

std::string Shape::to_string() const {
  std::string s = "[";
  for (int i = 0; i < rank_; ++i) {
    if (i) s += ", ";
    s += std::to_string(dims_[static_cast<std::size_t>(i)]);
  }
  return s + "]";
}

bool try_broadcast_shapes(const Shape& a, const Shape& b, Shape& out) {
  const int rank = std::max(a.rank(), b.rank());
  std::array<std::int64_t, Shape::kMaxRank> dims{};
  for (int i = 0; i < rank; ++i) {
    const int ia = a.rank() - rank + i;
    const int ib = b.rank() - rank + i;
    const std::int64_t da = ia >= 0 ? a[ia] : 1;
    const std::int64_t db = ib >= 0 ? b[ib] : 1;
    if (da == db || db == 1) {
      dims[static_cast<std::size_t>(i)] = da;
    } else if (da == 1) {
      dims[static_cast<std::size_t>(i)] = db;
    } else {
      return false;
    }
  }
  out = Shape(std::span<const std::int64_t>(dims.data(), static_cast<std::size_t>(rank)));
  return true;
}

Shape broadcast_shapes(const Shape& a, const Shape& b) {
  Shape out;
  if (!try_broadcast_shapes(a, b, out))
    throw IncompatibleShapes("cannot broadcast " + a.to_string() + " with " + b.to_string());
  return out;
}

Tensor::Tensor(Shape shape, Buffer buffer) : shape_(shape), buffer_(std::move(buffer)) {
  const auto n = static_cast<std::size_t>(shape_.num_elements());
  const auto len = std::visit([](const auto& v) { return v.size(); }, buffer_);
  if (n != len) throw std::invalid_argument("Tensor: buffer length does not match shape " + shape_.to_string());
}

Tensor Tensor::zeros(DType dt, const Shape& shape) {
  const auto n = static_cast<std::size_t>(shape.num_elements());
  return dispatch_dtype(dt, [&](auto tag) {
    using T = typename decltype(tag)::type;
    return Tensor(shape, Buffer(std::vector<T>(n, T{})));
  });
}

double Tensor::as_double(std::int64_t i) const {
  return std::visit([i](const auto& v) { return static_cast<double>(v[static_cast<std::size_t>(i)]); }, buffer_);
}

std::int64_t Tensor::as_int(std::int64_t i) const {
  return std::visit([i](const auto& v) { return static_cast<std::int64_t>(v[static_cast<std::size_t>(i)]); },
                    buffer_);
}

std::array<std::int64_t, Shape::kMaxRank> row_major_strides(const Shape& s) {
  std::array<std::int64_t, Shape::kMaxRank> strides{};
  std::int64_t acc = 1;
  for (int i = s.rank() - 1; i >= 0; --i) {
    strides[static_cast<std::size_t>(i)] = acc;
    acc *= s[i];
  }
  return strides;
}

}  // namespace tsynth
