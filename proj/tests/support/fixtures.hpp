// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dialects/ops.hpp"
#include "ir/ir.hpp"

// Small hand-built modules shared by the unit tests.

namespace wsc::test {

using namespace wsc::ir;

// The running example: out[x,y,z] = (in[x,y,z] + in[x,y,z+1]) * 0.12345 over a
// 254x254x510 output, input holding one extra cell in z.
inline IrModule build_z_pair_scale(int64_t nx = 254, int64_t ny = 254, int64_t nz = 510) {
  IrModule m;
  Bounds in_b{{{0, nx}, {0, ny}, {0, nz + 1}}};
  Bounds out_b{{{0, nx}, {0, ny}, {0, nz}}};
  Type in_f = Type::field(in_b), in_t = Type::temp(in_b);
  Type out_f = Type::field(out_b), out_t = Type::temp(out_b);

  auto& fn = m.block().append(make_op(ops::func_func, {}, {},
                                      {{"sym_name", Attribute::str("main")},
                                       {"field_names", Attribute::array({Attribute::str("in"), Attribute::str("out")})},
                                       {"function_type", Attribute::type(Type::func({in_f, out_f}, {}))}},
                                      1));
  Block& body = fn.region(0).add_block({in_f, out_f});
  OpBuilder b(body);
  Value t0 = b.create(ops::stencil_load, {body.arg(0)}, {in_t}).result();
  auto& apply = b.create(ops::stencil_apply, {t0}, {out_t}, {}, 1);
  Block& ab = apply.region(0).add_block({in_t});
  OpBuilder ib(ab);
  Value a0 = ib.create(ops::stencil_access, {ab.arg(0)}, {Type::f32()},
                       {{"offset", Attribute::array_i64({0, 0, 0})}})
                 .result();
  Value a1 = ib.create(ops::stencil_access, {ab.arg(0)}, {Type::f32()},
                       {{"offset", Attribute::array_i64({0, 0, 1})}})
                 .result();
  Value sum = ib.create(ops::arith_addf, {a0, a1}, {Type::f32()}).result();
  Value c = ib.const_f32(0.12345f);
  Value prod = ib.create(ops::arith_mulf, {sum, c}, {Type::f32()}).result();
  ib.create(ops::stencil_return, {prod}, {});
  b.create(ops::stencil_store, {apply.result(), body.arg(1)}, {});
  b.create(ops::func_return, {}, {});
  return m;
}

// Radius-1 star in x/y (plus center): the smallest communicating kernel.
inline IrModule build_xy_star1(int64_t nx, int64_t ny, int64_t nz) {
  IrModule m;
  Bounds in_b{{{-1, nx + 1}, {-1, ny + 1}, {0, nz}}};
  Bounds out_b{{{0, nx}, {0, ny}, {0, nz}}};
  Type in_f = Type::field(in_b), in_t = Type::temp(in_b);
  Type out_f = Type::field(out_b), out_t = Type::temp(out_b);

  auto& fn = m.block().append(make_op(ops::func_func, {}, {},
                                      {{"sym_name", Attribute::str("main")},
                                       {"field_names", Attribute::array({Attribute::str("in"), Attribute::str("out")})},
                                       {"function_type", Attribute::type(Type::func({in_f, out_f}, {}))}},
                                      1));
  Block& body = fn.region(0).add_block({in_f, out_f});
  OpBuilder b(body);
  Value t0 = b.create(ops::stencil_load, {body.arg(0)}, {in_t}).result();
  auto& apply = b.create(ops::stencil_apply, {t0}, {out_t}, {}, 1);
  Block& ab = apply.region(0).add_block({in_t});
  OpBuilder ib(ab);
  auto access = [&](int64_t dx, int64_t dy) {
    return ib.create(ops::stencil_access, {ab.arg(0)}, {Type::f32()},
                     {{"offset", Attribute::array_i64({dx, dy, 0})}})
        .result();
  };
  Value w = access(-1, 0), e = access(1, 0), n = access(0, -1), s = access(0, 1);
  Value c0 = access(0, 0);
  Value sum = ib.create(ops::varith_add, {w, e, n, s, c0}, {Type::f32()}).result();
  Value k = ib.const_f32(0.2f);
  Value res = ib.create(ops::arith_mulf, {sum, k}, {Type::f32()}).result();
  ib.create(ops::stencil_return, {res}, {});
  b.create(ops::stencil_store, {apply.result(), body.arg(1)}, {});
  b.create(ops::func_return, {}, {});
  return m;
}

} // namespace wsc::test
