// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace wsc::ir {

// Closed-open index range per dimension, printed in the [lb,ub] listing style.
struct Bounds {
  std::vector<std::pair<int64_t, int64_t>> dims;

  int rank() const { return static_cast<int>(dims.size()); }
  int64_t lb(int d) const { return dims[d].first; }
  int64_t ub(int d) const { return dims[d].second; }
  int64_t extent(int d) const { return dims[d].second - dims[d].first; }
  int64_t cells() const {
    int64_t n = 1;
    for (auto& [l, u] : dims) n *= (u - l);
    return n;
  }
  bool contains(const std::vector<int64_t>& idx) const {
    if (static_cast<int>(idx.size()) != rank()) return false;
    for (int d = 0; d < rank(); ++d)
      if (idx[d] < lb(d) || idx[d] >= ub(d)) return false;
    return true;
  }
  bool operator==(const Bounds& o) const { return dims == o.dims; }
};

enum class ScalarKind { F32, I32, I64, I1, Index };

struct TensorTy {
  std::vector<int64_t> shape; // rank 1 or 2, f32 elements
  bool operator==(const TensorTy& o) const { return shape == o.shape; }
};

// Grid-typed values. z_tensor == 0: scalar f32 cells over `bounds`.
// z_tensor > 0: cells are tensor<z_tensor x f32> (post z-tensorization).
struct FieldTy {
  Bounds bounds;
  int64_t z_tensor = 0;
  bool operator==(const FieldTy& o) const { return bounds == o.bounds && z_tensor == o.z_tensor; }
};
struct TempTy {
  Bounds bounds;
  int64_t z_tensor = 0;
  bool operator==(const TempTy& o) const { return bounds == o.bounds && z_tensor == o.z_tensor; }
};

struct MemRefTy {
  int64_t extent; // f32 elements
  bool operator==(const MemRefTy& o) const { return extent == o.extent; }
};

struct DsdTy {
  bool operator==(const DsdTy&) const { return true; }
};

class Type;
struct FuncTy {
  std::vector<Type> inputs;
  std::vector<Type> results;
  bool operator==(const FuncTy& o) const;
};

using TypeData = std::variant<ScalarKind, TensorTy, FieldTy, TempTy, MemRefTy, DsdTy, FuncTy>;

class Type {
public:
  Type() = default;
  explicit Type(TypeData d) : data_(std::make_shared<TypeData>(std::move(d))) {}

  static Type f32() { return Type(ScalarKind::F32); }
  static Type i32() { return Type(ScalarKind::I32); }
  static Type i64() { return Type(ScalarKind::I64); }
  static Type i1() { return Type(ScalarKind::I1); }
  static Type index() { return Type(ScalarKind::Index); }
  static Type tensor(std::vector<int64_t> shape) { return Type(TensorTy{std::move(shape)}); }
  static Type field(Bounds b, int64_t zt = 0) { return Type(FieldTy{std::move(b), zt}); }
  static Type temp(Bounds b, int64_t zt = 0) { return Type(TempTy{std::move(b), zt}); }
  static Type memref(int64_t n) { return Type(MemRefTy{n}); }
  static Type dsd() { return Type(DsdTy{}); }
  static Type func(std::vector<Type> in, std::vector<Type> out) {
    return Type(FuncTy{std::move(in), std::move(out)});
  }
  explicit Type(ScalarKind k) : data_(std::make_shared<TypeData>(k)) {}

  bool valid() const { return data_ != nullptr; }
  const TypeData& data() const { return *data_; }

  template <typename T> const T* as() const {
    return data_ ? std::get_if<T>(data_.get()) : nullptr;
  }
  bool is_scalar(ScalarKind k) const {
    auto* s = as<ScalarKind>();
    return s && *s == k;
  }
  bool is_f32() const { return is_scalar(ScalarKind::F32); }
  bool is_index() const { return is_scalar(ScalarKind::Index); }
  bool is_tensor() const { return as<TensorTy>() != nullptr; }
  bool is_temp() const { return as<TempTy>() != nullptr; }
  bool is_field() const { return as<FieldTy>() != nullptr; }
  bool is_memref() const { return as<MemRefTy>() != nullptr; }

  bool operator==(const Type& o) const;
  bool operator!=(const Type& o) const { return !(*this == o); }

  std::string str() const;

private:
  std::shared_ptr<const TypeData> data_;
};

} // namespace wsc::ir
