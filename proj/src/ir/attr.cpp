// SPDX-License-Identifier: Apache-2.0
#include "ir/attr.hpp"

#include "support/diag.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

namespace wsc::ir {

namespace {
// Bit-compare floats so attribute equality is exact and NaN-stable.
bool bits_equal(float a, float b) {
  uint32_t x, y;
  std::memcpy(&x, &a, 4);
  std::memcpy(&y, &b, 4);
  return x == y;
}
} // namespace

bool FloatAttr::operator==(const FloatAttr& o) const { return bits_equal(value, o.value); }
bool SplatAttr::operator==(const SplatAttr& o) const {
  return bits_equal(value, o.value) && type == o.type;
}
bool ArrayAttrStorage::operator==(const ArrayAttrStorage& o) const { return elems == o.elems; }
bool DictAttrStorage::operator==(const DictAttrStorage& o) const { return entries == o.entries; }

Attribute::Attribute(AttrData d) : data_(std::make_shared<AttrData>(std::move(d))) {}

Attribute Attribute::array_i64(const std::vector<int64_t>& v) {
  std::vector<Attribute> elems;
  elems.reserve(v.size());
  for (auto x : v) elems.push_back(Attribute::integer(x));
  return Attribute::array(std::move(elems));
}

int64_t Attribute::as_int() const {
  if (auto* i = as<IntAttr>()) return i->value;
  fail(ErrorKind::Verify, "attribute is not an integer: " + str());
}

bool Attribute::as_bool() const { return as_int() != 0; }

float Attribute::as_float() const {
  if (auto* f = as<FloatAttr>()) return f->value;
  if (auto* s = as<SplatAttr>()) return s->value;
  fail(ErrorKind::Verify, "attribute is not a float: " + str());
}

const std::string& Attribute::as_string() const {
  if (auto* s = as<StringAttr>()) return s->value;
  fail(ErrorKind::Verify, "attribute is not a string: " + str());
}

const std::string& Attribute::as_symbol() const {
  if (auto* s = as<SymbolRefAttr>()) return s->name;
  fail(ErrorKind::Verify, "attribute is not a symbol ref: " + str());
}

const std::vector<Attribute>& Attribute::as_array() const {
  if (auto* a = as<ArrayAttrStorage>()) return a->elems;
  fail(ErrorKind::Verify, "attribute is not an array: " + str());
}

std::vector<int64_t> Attribute::as_int_array() const {
  std::vector<int64_t> out;
  for (auto& e : as_array()) out.push_back(e.as_int());
  return out;
}

bool Attribute::operator==(const Attribute& o) const {
  if (data_ == o.data_) return true;
  if (!data_ || !o.data_) return false;
  return *data_ == *o.data_;
}

namespace {
// %.9g round-trips binary32 exactly through strtof.
std::string fmt_f32(float v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
  std::string s(buf);
  if (s.find_first_of(".einfa") == std::string::npos) s += ".0";
  return s;
}
} // namespace

std::string Attribute::str() const {
  if (!data_) return "<<null-attr>>";
  std::ostringstream os;
  struct V {
    std::ostream& os;
    void operator()(const IntAttr& a) {
      os << a.value;
      switch (a.kind) {
      case ScalarKind::I1: os << " : i1"; break;
      case ScalarKind::I32: os << " : i32"; break;
      case ScalarKind::I64: break; // default integer kind, printed bare
      case ScalarKind::Index: os << " : index"; break;
      case ScalarKind::F32: break;
      }
    }
    void operator()(const FloatAttr& a) { os << fmt_f32(a.value) << " : f32"; }
    void operator()(const SplatAttr& a) {
      os << "dense<" << fmt_f32(a.value) << "> : " << Type(TypeData(a.type)).str();
    }
    void operator()(const StringAttr& a) { os << '"' << a.value << '"'; }
    void operator()(const SymbolRefAttr& a) { os << '@' << a.name; }
    void operator()(const TypeAttr& a) { os << a.type.str(); }
    void operator()(const TopoAttr& a) { os << "#dmp.topo<" << a.px << "x" << a.py << ">"; }
    void operator()(const ExchangeAttr& a) {
      os << "#csl_stencil.exchange<to [" << a.dx << ", " << a.dy << "]>";
    }
    void operator()(const SwapAttr& a) {
      os << "#dmp.swap<op " << a.operand << " to [" << a.dx << ", " << a.dy << "] width "
         << a.width << " z [" << a.zb << "," << a.ze << "]>";
    }
    void operator()(const ArrayAttrStorage& a) {
      os << "[";
      for (size_t i = 0; i < a.elems.size(); ++i) os << (i ? ", " : "") << a.elems[i].str();
      os << "]";
    }
    void operator()(const DictAttrStorage& a) {
      os << "{";
      bool first = true;
      for (auto& [k, v] : a.entries) {
        if (!first) os << ", ";
        first = false;
        os << k << " = " << v.str();
      }
      os << "}";
    }
  } v{os};
  std::visit(v, *data_);
  return os.str();
}

} // namespace wsc::ir
