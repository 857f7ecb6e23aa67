// SPDX-License-Identifier: Apache-2.0

// Group 1: decompose the 3D stencil over the 2D PE grid. Each PE owns one
// (x, y) column; x/y bounds collapse to per-PE local windows, halo demands
// become dmp.swap declarations, and the z dimension turns into value tensors.

#include "dialects/ops.hpp"
#include "ir/pass.hpp"
#include "ir/registry.hpp"

#include <map>
#include <set>

namespace wsc::passes {

using namespace ir;
namespace o = ir::ops;

namespace {

struct GlobalShape {
  int64_t nx = -1, ny = -1; // output extents
};

GlobalShape output_shape(IrModule& m) {
  GlobalShape g;
  walk(m, [&](Operation& op) {
    if (op.name() != o::stencil_apply) return;
    auto* t = op.result_type().as<TempTy>();
    int64_t nx = t->bounds.extent(0), ny = t->bounds.extent(1);
    if (g.nx < 0) {
      g.nx = nx;
      g.ny = ny;
    } else if (g.nx != nx || g.ny != ny) {
      verify_fail(op, "applies with differing output x/y extents cannot be distributed");
    }
  });
  if (g.nx < 0) fail(ErrorKind::Pass, "no stencil.apply in module");
  return g;
}

// Local per-PE window: [lb, ub - n + 1) along a distributed dimension.
std::pair<int64_t, int64_t> localize(int64_t lb, int64_t ub, int64_t n) {
  return {lb, ub - n + 1};
}

Type localize_type(Type t, const GlobalShape& g) {
  auto conv = [&](const Bounds& b) {
    Bounds nb = b;
    auto [xl, xu] = localize(b.lb(0), b.ub(0), g.nx);
    auto [yl, yu] = localize(b.lb(1), b.ub(1), g.ny);
    nb.dims[0] = {xl, xu};
    nb.dims[1] = {yl, yu};
    return nb;
  };
  if (auto* f = t.as<FieldTy>()) return Type::field(conv(f->bounds), f->z_tensor);
  if (auto* tt = t.as<TempTy>()) return Type::temp(conv(tt->bounds), tt->z_tensor);
  if (auto* ft = t.as<FuncTy>()) {
    std::vector<Type> ins, outs;
    for (auto& i : ft->inputs) ins.push_back(localize_type(i, g));
    for (auto& r : ft->results) outs.push_back(localize_type(r, g));
    return Type::func(ins, outs);
  }
  return t;
}

void retype_everything(IrModule& m, const GlobalShape& g) {
  std::function<void(Block&)> fix_block = [&](Block& b) {
    std::vector<Type> args;
    for (auto& t : b.arg_types()) args.push_back(localize_type(t, g));
    // Block arg types are rewritten in place via reconstruction.
    b.set_arg_types(args);
    for (auto& op : b.ops()) {
      std::vector<Type> res;
      for (auto& t : op->result_types()) res.push_back(localize_type(t, g));
      op->set_result_types(res);
      if (auto* a = op->attr("function_type"))
        op->set_attr("function_type", Attribute::type(localize_type(a->as<TypeAttr>()->type, g)));
      for (auto& r : op->regions())
        for (auto& blk : r->blocks()) fix_block(*blk);
    }
  };
  for (auto& blk : m.body().blocks()) fix_block(*blk);
}

void distribute_stencil(IrModule& m, const PassOptions& opts) {
  int64_t px = opts.get_int("px", 1), py = opts.get_int("py", 1);
  GlobalShape g = output_shape(m);
  if (g.nx > px || g.ny > py)
    fail(ErrorKind::Pass, "grid " + std::to_string(g.nx) + "x" + std::to_string(g.ny) +
                              " does not fit the " + std::to_string(px) + "x" +
                              std::to_string(py) + " PE topology");

  // star-shape check first: reject diagonal dependencies
  walk(m, [&](Operation& op) {
    if (op.name() != o::stencil_access) return;
    auto off = op.attr_req("offset").as_int_array();
    if (off[0] != 0 && off[1] != 0)
      verify_fail(op,
                  "non-star access pattern (diagonal x/y offset); the star-shaped "
                  "communication library cannot route it");
  });

  // per-apply swap insertion, before types change (offsets are global here)
  std::vector<Operation*> applies;
  walk(m, [&](Operation& op) {
    if (op.name() == o::stencil_apply) applies.push_back(&op);
  });
  for (Operation* apply : applies) {
    auto* out_t = apply->result_type().as<TempTy>();
    int64_t nz_out = out_t->bounds.extent(2);
    // (operand, dir) -> (width, zmin, zmax)
    struct Demand {
      int64_t width = 0, zb = 0, ze = 0;
      bool any = false;
    };
    std::map<std::pair<int64_t, int>, Demand> demands;
    for (auto& inner : apply->region(0).front().ops()) {
      if (inner->name() != o::stencil_access) continue;
      auto off = inner->attr_req("offset").as_int_array();
      if (off[0] == 0 && off[1] == 0) continue;
      int64_t operand = inner->operand(0).index;
      int64_t dx = off[0] == 0 ? 0 : (off[0] > 0 ? 1 : -1);
      int64_t dy = off[1] == 0 ? 0 : (off[1] > 0 ? 1 : -1);
      int dir = o::dir_index(dx, dy);
      Demand& d = demands[{operand, dir}];
      d.width = std::max(d.width, std::abs(off[0]) + std::abs(off[1]));
      int64_t zb = off[2], ze = off[2] + nz_out;
      if (!d.any) {
        d.zb = zb;
        d.ze = ze;
        d.any = true;
      } else {
        d.zb = std::min(d.zb, zb);
        d.ze = std::max(d.ze, ze);
      }
    }
    if (demands.empty()) {
      // z-only stencil: still record an empty swap so downstream passes see
      // the (vacuous) exchange point
      Block* parent = apply->parent();
      size_t pos = static_cast<size_t>(parent->index_of(apply));
      parent->insert(pos, make_op(o::dmp_swap, {}, {},
                                  {{"topo", Attribute::topo(px, py)},
                                   {"swaps", Attribute::array({})}}));
      continue;
    }
    // communicated operand set, in operand order
    std::set<int64_t> comm_set;
    for (auto& [k, d] : demands) comm_set.insert(k.first);
    std::vector<Value> operands;
    std::vector<Type> types;
    std::map<int64_t, int> swap_slot;
    for (int64_t idx : comm_set) {
      swap_slot[idx] = static_cast<int>(operands.size());
      operands.push_back(apply->operand(static_cast<int>(idx)));
      types.push_back(apply->operand(static_cast<int>(idx)).type());
    }
    std::vector<Attribute> swaps;
    for (int64_t idx : comm_set) {
      for (auto& [dx, dy] : o::dir_order()) {
        auto it = demands.find({idx, o::dir_index(dx, dy)});
        if (it == demands.end()) continue;
        SwapAttr s;
        s.operand = swap_slot[idx];
        s.dx = dx;
        s.dy = dy;
        s.width = it->second.width;
        s.zb = it->second.zb;
        s.ze = it->second.ze;
        swaps.push_back(Attribute::swap(s));
      }
    }
    Block* parent = apply->parent();
    size_t pos = static_cast<size_t>(parent->index_of(apply));
    auto& swap = parent->insert(pos, make_op(o::dmp_swap, operands, types,
                                             {{"topo", Attribute::topo(px, py)},
                                              {"swaps", Attribute::array(swaps)}}));
    for (auto& [idx, slot] : swap_slot)
      apply->set_operand(static_cast<int>(idx), swap.result(slot));
  }

  retype_everything(m, g);
}

// ---------------------------------------------------------------------------
// tensorize-z
// ---------------------------------------------------------------------------

Type tensorize_type(Type t) {
  auto conv = [&](const Bounds& b, int64_t zt) {
    if (zt > 0 || b.rank() != 3) return std::make_pair(b, zt);
    Bounds nb;
    nb.dims = {b.dims[0], b.dims[1]};
    return std::make_pair(nb, b.extent(2));
  };
  if (auto* f = t.as<FieldTy>()) {
    auto [b, zt] = conv(f->bounds, f->z_tensor);
    return Type::field(b, zt);
  }
  if (auto* tt = t.as<TempTy>()) {
    auto [b, zt] = conv(tt->bounds, tt->z_tensor);
    return Type::temp(b, zt);
  }
  if (auto* ft = t.as<FuncTy>()) {
    std::vector<Type> ins, outs;
    for (auto& i : ft->inputs) ins.push_back(tensorize_type(i));
    for (auto& r : ft->results) outs.push_back(tensorize_type(r));
    return Type::func(ins, outs);
  }
  return t;
}

void tensorize_apply_body(Operation& apply) {
  Block& body = apply.region(0).front();
  auto* out_t = apply.result_type().as<TempTy>(); // already tensorized
  int64_t nz_out = out_t->z_tensor;
  int64_t out_zl = 0; // output z ranges start at 0 by construction

  // arg types were tensorized by the caller; rebuild ops
  std::vector<std::unique_ptr<Operation>> old;
  old.swap(body.ops());
  OpBuilder b(body);
  std::map<Value, Value> map;
  for (auto& op : old) {
    const std::string& n = op->name();
    if (n == o::stencil_access) {
      Value src = op->operand(0); // block arg, type already tensorized
      auto* t = src.type().as<TempTy>();
      auto off = op->attr_req("offset").as_int_array();
      // z origin of the operand column: recover from the operand's original
      // rank-3 bounds, preserved in the access's stored offset arithmetic
      int64_t tzl = op->int_attr("z_lb");
      Value col = b.create(o::stencil_access, {src}, {Type::tensor({t->z_tensor})},
                           {{"offset", Attribute::array_i64({off[0], off[1]})}})
                      .result();
      int64_t slice_off = out_zl + off[2] - tzl;
      int64_t slice_len = nz_out;
      Value v = col;
      if (slice_off != 0 || slice_len != t->z_tensor)
        v = b.create(o::tensor_extract_slice, {col}, {Type::tensor({slice_len})},
                     {{"offset", Attribute::integer(slice_off)},
                      {"size", Attribute::integer(slice_len)}})
                .result();
      map[op->result()] = v;
    } else {
      // remap + retype arithmetic to tensors
      std::vector<Value> operands;
      for (Value v : op->operands()) {
        auto it = map.find(v);
        operands.push_back(it == map.end() ? v : it->second);
      }
      std::vector<Type> res;
      bool any_tensor = false;
      for (Value v : operands)
        if (v.type().is_tensor()) any_tensor = true;
      for (auto& t : op->result_types())
        res.push_back(t.is_f32() && any_tensor ? Type::tensor({nz_out}) : t);
      auto& nv = b.create(n, operands, res,
                          std::map<std::string, Attribute>(op->attrs().begin(), op->attrs().end()));
      for (int r = 0; r < op->num_results(); ++r) map[op->result(r)] = nv.result(r);
    }
  }
}

void tensorize_z(IrModule& m, const PassOptions&) {
  // record each access's operand z-origin before the types lose it
  walk(m, [&](Operation& op) {
    if (op.name() != o::stencil_access) return;
    auto* t = op.operand(0).type().as<TempTy>();
    if (t && t->z_tensor == 0 && t->bounds.rank() == 3)
      op.set_attr("z_lb", Attribute::integer(t->bounds.lb(2)));
  });
  // record embed z offsets similarly
  walk(m, [&](Operation& op) {
    if (op.name() != o::stencil_embed) return;
    auto* inner = op.operand(0).type().as<TempTy>();
    auto* outer = op.operand(1).type().as<TempTy>();
    if (inner && outer && inner->bounds.rank() == 3)
      op.set_attr("z_offset", Attribute::integer(inner->bounds.lb(2) - outer->bounds.lb(2)));
  });
  // convert swap z-ranges from global-z to column coordinates
  walk(m, [&](Operation& op) {
    if (op.name() != o::dmp_swap) return;
    auto swaps = op.attr_req("swaps").as_array();
    std::vector<Attribute> updated;
    for (auto& a : swaps) {
      SwapAttr s = *a.as<SwapAttr>();
      auto* t = op.operand(static_cast<int>(s.operand)).type().as<TempTy>();
      s.zb -= t->bounds.lb(2);
      s.ze -= t->bounds.lb(2);
      updated.push_back(Attribute::swap(s));
    }
    op.set_attr("swaps", Attribute::array(updated));
  });

  // retype all grid values
  std::function<void(Block&)> fix_block = [&](Block& b) {
    std::vector<Type> args;
    for (auto& t : b.arg_types()) args.push_back(tensorize_type(t));
    b.set_arg_types(args);
    for (auto& op : b.ops()) {
      std::vector<Type> res;
      for (auto& t : op->result_types()) res.push_back(tensorize_type(t));
      op->set_result_types(res);
      if (auto* a = op->attr("function_type"))
        op->set_attr("function_type", Attribute::type(tensorize_type(a->as<TypeAttr>()->type)));
      for (auto& r : op->regions())
        for (auto& blk : r->blocks()) fix_block(*blk);
    }
  };
  for (auto& blk : m.body().blocks()) fix_block(*blk);

  // rebuild apply bodies with tensor windows
  std::vector<Operation*> applies;
  walk(m, [&](Operation& op) {
    if (op.name() == o::stencil_apply) applies.push_back(&op);
  });
  for (Operation* a : applies) tensorize_apply_body(*a);
}

} // namespace

void register_distribute_passes() {
  register_pass("distribute-stencil", distribute_stencil);
  register_pass("tensorize-z", tensorize_z);
}

} // namespace wsc::passes
