// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ir/type.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace wsc::ir {

class Attribute;

struct IntAttr {
  int64_t value;
  ScalarKind kind = ScalarKind::I64;
  bool operator==(const IntAttr& o) const { return value == o.value && kind == o.kind; }
};

struct FloatAttr {
  float value;
  bool operator==(const FloatAttr& o) const; // bit compare
};

// dense<v> splat over a tensor type.
struct SplatAttr {
  float value;
  TensorTy type;
  bool operator==(const SplatAttr& o) const;
};

struct StringAttr {
  std::string value;
  bool operator==(const StringAttr& o) const { return value == o.value; }
};

struct SymbolRefAttr {
  std::string name; // printed @name
  bool operator==(const SymbolRefAttr& o) const { return name == o.name; }
};

struct TypeAttr {
  Type type;
  bool operator==(const TypeAttr& o) const { return type == o.type; }
};

// #dmp.topo<PXxPY>
struct TopoAttr {
  int64_t px, py;
  bool operator==(const TopoAttr& o) const { return px == o.px && py == o.py; }
};

// #csl_stencil.exchange<to [dx, dy]>
struct ExchangeAttr {
  int64_t dx, dy;
  bool operator==(const ExchangeAttr& o) const { return dx == o.dx && dy == o.dy; }
};

// #dmp.swap<op N to [dx, dy] width W z [zb, ze]>
// One exchanged direction of one communicated operand: `width` hops along the
// unit direction (dx, dy), z-slices [zb, ze) required from each hop.
struct SwapAttr {
  int64_t operand = 0;
  int64_t dx = 0, dy = 0; // unit direction
  int64_t width = 0;      // hops
  int64_t zb = 0, ze = 0; // required z-range, closed-open
  bool operator==(const SwapAttr& o) const {
    return operand == o.operand && dx == o.dx && dy == o.dy && width == o.width &&
           zb == o.zb && ze == o.ze;
  }
};

struct ArrayAttrStorage;
struct DictAttrStorage;

using AttrData = std::variant<IntAttr, FloatAttr, SplatAttr, StringAttr, SymbolRefAttr, TypeAttr,
                              TopoAttr, ExchangeAttr, SwapAttr, ArrayAttrStorage, DictAttrStorage>;

struct ArrayAttrStorage {
  std::vector<Attribute> elems;
  bool operator==(const ArrayAttrStorage& o) const;
};
struct DictAttrStorage {
  std::map<std::string, Attribute> entries;
  bool operator==(const DictAttrStorage& o) const;
};

class Attribute {
public:
  Attribute() = default;
  explicit Attribute(AttrData d);

  static Attribute integer(int64_t v, ScalarKind k = ScalarKind::I64) {
    return Attribute(IntAttr{v, k});
  }
  static Attribute boolean(bool v) { return Attribute(IntAttr{v ? 1 : 0, ScalarKind::I1}); }
  static Attribute flt(float v) { return Attribute(FloatAttr{v}); }
  static Attribute splat(float v, TensorTy t) { return Attribute(SplatAttr{v, std::move(t)}); }
  static Attribute str(std::string s) { return Attribute(StringAttr{std::move(s)}); }
  static Attribute symbol(std::string s) { return Attribute(SymbolRefAttr{std::move(s)}); }
  static Attribute type(Type t) { return Attribute(TypeAttr{std::move(t)}); }
  static Attribute topo(int64_t px, int64_t py) { return Attribute(TopoAttr{px, py}); }
  static Attribute exchange(int64_t dx, int64_t dy) { return Attribute(ExchangeAttr{dx, dy}); }
  static Attribute swap(SwapAttr s) { return Attribute(std::move(s)); }
  static Attribute array(std::vector<Attribute> v) {
    return Attribute(ArrayAttrStorage{std::move(v)});
  }
  static Attribute array_i64(const std::vector<int64_t>& v);
  static Attribute dict(std::map<std::string, Attribute> m) {
    return Attribute(DictAttrStorage{std::move(m)});
  }

  bool valid() const { return data_ != nullptr; }
  const AttrData& data() const { return *data_; }

  template <typename T> const T* as() const {
    return data_ ? std::get_if<T>(data_.get()) : nullptr;
  }

  // Convenience accessors; throw on kind mismatch.
  int64_t as_int() const;
  bool as_bool() const;
  float as_float() const;
  const std::string& as_string() const;
  const std::string& as_symbol() const;
  const std::vector<Attribute>& as_array() const;
  std::vector<int64_t> as_int_array() const;

  bool operator==(const Attribute& o) const;
  bool operator!=(const Attribute& o) const { return !(*this == o); }

  std::string str() const;

private:
  std::shared_ptr<const AttrData> data_;
};

} // namespace wsc::ir
