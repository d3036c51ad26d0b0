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

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace tsynth {

/// Element types a tensor may carry. The enumerator order matches the
/// alternatives of Tensor::Buffer.
enum class DType : std::uint8_t { I32, I64, F32, Bool };

inline constexpr std::array<DType, 4> kAllDTypes = {DType::I32, DType::I64,
                                                    DType::F32, DType::Bool};

/// Short literal name: "i32", "i64", "f32", "bool".
std::string_view dtype_name(DType dt);
/// Framework spelling: "tf.int32", ...
std::string_view dtype_python_name(DType dt);
/// Accepts both the short and the framework spelling (with or without "tf.").
bool parse_dtype(std::string_view text, DType& out);

inline bool is_integer(DType dt) { return dt == DType::I32 || dt == DType::I64; }
inline bool is_numeric(DType dt) { return dt != DType::Bool; }

template <DType D> struct dtype_traits;
template <> struct dtype_traits<DType::I32> { using type = std::int32_t; };
template <> struct dtype_traits<DType::I64> { using type = std::int64_t; };
template <> struct dtype_traits<DType::F32> { using type = float; };
template <> struct dtype_traits<DType::Bool> { using type = std::uint8_t; };

template <typename T> constexpr DType dtype_of();
template <> constexpr DType dtype_of<std::int32_t>() { return DType::I32; }
template <> constexpr DType dtype_of<std::int64_t>() { return DType::I64; }
template <> constexpr DType dtype_of<float>() { return DType::F32; }
template <> constexpr DType dtype_of<std::uint8_t>() { return DType::Bool; }

template <typename T> struct type_tag { using type = T; };

/// Calls fn(type_tag<T>{}) with T the storage type of `dt`.
template <typename Fn>
decltype(auto) dispatch_dtype(DType dt, Fn&& fn) {
  switch (dt) {
    case DType::I32: return fn(type_tag<std::int32_t>{});
    case DType::I64: return fn(type_tag<std::int64_t>{});
    case DType::F32: return fn(type_tag<float>{});
    case DType::Bool: break;
  }
  return fn(type_tag<std::uint8_t>{});
}

class IncompatibleShapes : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension list with inline storage. Ranks above kMaxRank are never
/// materialized; callers check limits on raw dims first.
class Shape {
 public:
  static constexpr int kMaxRank = 8;

  Shape() = default;
  Shape(std::initializer_list<std::int64_t> dims);
  explicit Shape(std::span<const std::int64_t> dims);

  int rank() const { return rank_; }
  std::int64_t operator[](int i) const { return dims_[static_cast<std::size_t>(i)]; }
  void set(int i, std::int64_t d) { dims_[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(d); }
  void push_back(std::int64_t d);
  std::int64_t num_elements() const;
  std::vector<std::int64_t> to_vector() const;
  std::string to_string() const;

  friend bool operator==(const Shape& a, const Shape& b) {
    if (a.rank_ != b.rank_) return false;
    for (int i = 0; i < a.rank_; ++i)
      if (a.dims_[static_cast<std::size_t>(i)] != b.dims_[static_cast<std::size_t>(i)]) return false;
    return true;
  }

 private:
  std::array<std::int32_t, kMaxRank> dims_{};
  std::uint8_t rank_ = 0;
};

/// Right-aligned broadcasting. Throws IncompatibleShapes.
Shape broadcast_shapes(const Shape& a, const Shape& b);
/// Non-throwing variant; returns false when incompatible.
bool try_broadcast_shapes(const Shape& a, const Shape& b, Shape& out);

/// Dense row-major tensor. Immutable once wrapped in a Value.
class Tensor {
 public:
  using Buffer = std::variant<std::vector<std::int32_t>, std::vector<std::int64_t>,
                              std::vector<float>, std::vector<std::uint8_t>>;

  Tensor() : buffer_(std::vector<std::int32_t>{}) {}
  Tensor(Shape shape, Buffer buffer);

  /// Zero-filled tensor of the given dtype.
  static Tensor zeros(DType dt, const Shape& shape);

  template <typename T>
  static Tensor from(const Shape& shape, std::vector<T> data) {
    return Tensor(shape, Buffer(std::move(data)));
  }

  DType dtype() const { return static_cast<DType>(buffer_.index()); }
  const Shape& shape() const { return shape_; }
  int rank() const { return shape_.rank(); }
  std::int64_t size() const { return shape_.num_elements(); }

  template <typename T>
  std::span<const T> data() const { return std::get<std::vector<T>>(buffer_); }
  template <typename T>
  std::span<T> mutable_data() { return std::get<std::vector<T>>(buffer_); }

  const Buffer& buffer() const { return buffer_; }

  /// Element i widened to double (for statistics and tolerant comparison).
  double as_double(std::int64_t i) const;
  /// Element i as int64; only meaningful for integer and bool dtypes.
  std::int64_t as_int(std::int64_t i) const;

 private:
  Shape shape_;
  Buffer buffer_;
};

/// Row-major strides of a shape (element units).
std::array<std::int64_t, Shape::kMaxRank> row_major_strides(const Shape& s);

}  // namespace tsynth
