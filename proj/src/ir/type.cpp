// SPDX-License-Identifier: Apache-2.0
#include "ir/type.hpp"

#include <sstream>

namespace wsc::ir {

bool FuncTy::operator==(const FuncTy& o) const {
  return inputs == o.inputs && results == o.results;
}

bool Type::operator==(const Type& o) const {
  if (data_ == o.data_) return true;
  if (!data_ || !o.data_) return false;
  return *data_ == *o.data_;
}

namespace {

void print_bounds_elem(std::ostream& os, const Bounds& b, int64_t zt) {
  for (int d = 0; d < b.rank(); ++d)
    os << "[" << b.lb(d) << "," << b.ub(d) << "]x";
  if (zt > 0)
    os << "tensor<" << zt << "xf32>";
  else
    os << "f32";
}

} // namespace

std::string Type::str() const {
  if (!data_) return "<<null-type>>";
  std::ostringstream os;
  struct V {
    std::ostream& os;
    void operator()(ScalarKind k) {
      switch (k) {
      case ScalarKind::F32: os << "f32"; break;
      case ScalarKind::I32: os << "i32"; break;
      case ScalarKind::I64: os << "i64"; break;
      case ScalarKind::I1: os << "i1"; break;
      case ScalarKind::Index: os << "index"; break;
      }
    }
    void operator()(const TensorTy& t) {
      os << "tensor<";
      for (auto d : t.shape) os << d << "x";
      os << "f32>";
    }
    void operator()(const FieldTy& t) {
      os << "!stencil.field<";
      print_bounds_elem(os, t.bounds, t.z_tensor);
      os << ">";
    }
    void operator()(const TempTy& t) {
      os << "!stencil.temp<";
      print_bounds_elem(os, t.bounds, t.z_tensor);
      os << ">";
    }
    void operator()(const MemRefTy& t) { os << "memref<" << t.extent << "xf32>"; }
    void operator()(const DsdTy&) { os << "!csl.dsd"; }
    void operator()(const FuncTy& t) {
      os << "(";
      for (size_t i = 0; i < t.inputs.size(); ++i)
        os << (i ? ", " : "") << t.inputs[i].str();
      os << ") -> ";
      if (t.results.size() == 1) {
        os << t.results[0].str();
      } else {
        os << "(";
        for (size_t i = 0; i < t.results.size(); ++i)
          os << (i ? ", " : "") << t.results[i].str();
        os << ")";
      }
    }
  } v{os};
  std::visit(v, *data_);
  return os.str();
}

} // namespace wsc::ir
