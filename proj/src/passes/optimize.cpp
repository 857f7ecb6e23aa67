// SPDX-License-Identifier: Apache-2.0

// Stencil- and arithmetic-level optimizations: apply inlining, variadic
// arithmetic conversion, repeated-operand strength reduction, and
// multiply-add fusion on destination-passing-style bodies.

#include "dialects/ops.hpp"
#include "ir/pass.hpp"
#include "ir/registry.hpp"

#include <map>
#include <optional>
#include <set>

namespace wsc::passes {

using namespace ir;
namespace o = ir::ops;

namespace {

int uses_in_block(const Block& b, Value v) {
  int n = 0;
  for (auto& op : b.ops())
    for (int i = 0; i < op->num_operands(); ++i)
      if (op->operand(i) == v) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// stencil-inline
// ---------------------------------------------------------------------------

// Rewrites consumer accesses into the producer's result by splicing the
// producer body in with offset-composed accesses.
bool inline_pair(Block& parent, Operation& producer, Operation& consumer) {
  // operand slots of the consumer fed by the producer
  std::set<int> fed;
  for (int i = 0; i < consumer.num_operands(); ++i)
    if (consumer.operand(i) == producer.result()) fed.insert(i);
  if (fed.empty()) return false;

  // merged operand list: consumer operands (minus fed) then new producer
  // operands, deduplicated
  std::vector<Value> operands;
  std::vector<Type> arg_tys;
  std::map<Value, int> operand_slot;
  auto add_operand = [&](Value v) {
    auto it = operand_slot.find(v);
    if (it != operand_slot.end()) return it->second;
    int slot = static_cast<int>(operands.size());
    operand_slot[v] = slot;
    operands.push_back(v);
    arg_tys.push_back(v.type());
    return slot;
  };
  for (int i = 0; i < consumer.num_operands(); ++i)
    if (!fed.count(i)) add_operand(consumer.operand(i));
  for (int i = 0; i < producer.num_operands(); ++i) add_operand(producer.operand(i));

  size_t pos = static_cast<size_t>(parent.index_of(&consumer));
  auto& fused = parent.insert(
      pos, make_op(o::stencil_apply, operands, consumer.result_types(), {}, 1));
  Block& fb = fused.region(0).add_block(arg_tys);
  OpBuilder b(fb);

  Block& cons_body = consumer.region(0).front();
  Block& prod_body = producer.region(0).front();

  std::map<Value, Value> cmap; // consumer body values -> fused body values
  for (int i = 0; i < consumer.num_operands(); ++i)
    if (!fed.count(i)) cmap[cons_body.arg(i)] = fb.arg(operand_slot[consumer.operand(i)]);

  // CSE for accesses and constants created during splicing
  std::map<std::tuple<int, std::vector<int64_t>>, Value> access_cache;
  std::map<uint32_t, Value> const_cache;

  auto emit_access = [&](int slot, std::vector<int64_t> off, Type ty) {
    auto key = std::make_tuple(slot, off);
    auto it = access_cache.find(key);
    if (it != access_cache.end()) return it->second;
    Value v = b.create(o::stencil_access, {fb.arg(slot)}, {ty},
                       {{"offset", Attribute::array_i64(off)}})
                  .result();
    access_cache[key] = v;
    return v;
  };

  // Splices a clone of the producer body evaluated at `shift`; returns the
  // value of its stencil.return operand.
  auto splice_producer = [&](const std::vector<int64_t>& shift) -> Value {
    std::map<Value, Value> pmap;
    Value returned;
    for (auto& op : prod_body.ops()) {
      const std::string& n = op->name();
      if (n == o::stencil_access) {
        Value src = op->operand(0);
        int slot = operand_slot[producer.operand(static_cast<int>(src.index))];
        auto off = op->attr_req("offset").as_int_array();
        for (size_t d = 0; d < off.size(); ++d) off[d] += shift[d];
        pmap[const_cast<Operation&>(*op).result()] =
            emit_access(slot, off, op->result_type());
      } else if (n == o::stencil_return) {
        auto it = pmap.find(op->operand(0));
        returned = it == pmap.end() ? op->operand(0) : it->second;
      } else {
        auto clone = clone_op(*op, pmap);
        b.create(clone->name(), clone->operands(), clone->result_types(),
                 std::map<std::string, Attribute>(clone->attrs().begin(), clone->attrs().end()));
        // clone_op registered result mapping into pmap via clone; rebuild:
        Operation& placed = *fb.ops()[b.pos() - 1];
        for (int r = 0; r < op->num_results(); ++r)
          pmap[const_cast<Operation&>(*op).result(r)] = placed.result(r);
      }
    }
    return returned;
  };

  for (auto& op : cons_body.ops()) {
    const std::string& n = op->name();
    if (n == o::stencil_access && fed.count(static_cast<int>(op->operand(0).index))) {
      auto shift = op->attr_req("offset").as_int_array();
      cmap[const_cast<Operation&>(*op).result()] = splice_producer(shift);
      continue;
    }
    if (n == o::stencil_access) {
      Value src = op->operand(0);
      int slot = operand_slot[consumer.operand(static_cast<int>(src.index))];
      cmap[const_cast<Operation&>(*op).result()] =
          emit_access(slot, op->attr_req("offset").as_int_array(), op->result_type());
      continue;
    }
    auto clone = clone_op(*op, cmap);
    b.create(clone->name(), clone->operands(), clone->result_types(),
             std::map<std::string, Attribute>(clone->attrs().begin(), clone->attrs().end()));
    Operation& placed = *fb.ops()[b.pos() - 1];
    for (int r = 0; r < op->num_results(); ++r)
      cmap[const_cast<Operation&>(*op).result(r)] = placed.result(r);
  }

  replace_uses(*parent.parent(), consumer.result(), fused.result());
  parent.erase(&consumer);
  parent.erase(&producer);
  return true;
}

void stencil_inline(IrModule& m, const PassOptions&) {
  bool changed = true;
  while (changed) {
    changed = false;
    // Find one producer/consumer pair, then rewrite outside the traversal.
    Operation* prod = nullptr;
    Operation* cons = nullptr;
    Block* blk = nullptr;
    walk(m, [&](Operation& op) {
      if (prod || op.name() != o::stencil_apply) return;
      Block* parent = op.parent();
      Operation* consumer = nullptr;
      int total_uses = 0;
      bool single_consumer = true;
      for (auto& other : parent->ops()) {
        for (int i = 0; i < other->num_operands(); ++i)
          if (other->operand(i) == op.result()) {
            ++total_uses;
            if (other->name() != o::stencil_apply || (consumer && consumer != other.get()))
              single_consumer = false;
            else
              consumer = other.get();
          }
      }
      // inline only when one apply is the sole user of the result
      if (!consumer || !single_consumer || total_uses == 0) return;
      if (total_uses != uses_in_block(*parent, op.result())) return;
      prod = &op;
      cons = consumer;
      blk = parent;
    });
    if (prod) changed = inline_pair(*blk, *prod, *cons);
  }
}

// ---------------------------------------------------------------------------
// to-varith / from-varith
// ---------------------------------------------------------------------------

bool same_kind(const std::string& n, bool add) {
  return add ? (n == o::arith_addf || n == o::varith_add)
             : (n == o::arith_mulf || n == o::varith_mul);
}

void to_varith_block(Block& b) {
  // binary ops become 2-ary variadic ops
  for (size_t i = 0; i < b.ops().size(); ++i) {
    Operation& op = *b.ops()[i];
    if (op.name() != o::arith_addf && op.name() != o::arith_mulf) continue;
    const char* vn = op.name() == o::arith_addf ? o::varith_add : o::varith_mul;
    auto& nv = b.insert(i, make_op(vn, op.operands(), op.result_types()));
    replace_uses(*b.parent(), op.result(), nv.result());
    b.erase(&op);
  }
  // flatten single-use nested chains, preserving operand order
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < b.ops().size() && !changed; ++i) {
      Operation& op = *b.ops()[i];
      bool add = op.name() == o::varith_add;
      if (!add && op.name() != o::varith_mul) continue;
      for (int j = 0; j < op.num_operands(); ++j) {
        Value v = op.operand(j);
        if (!v.op || v.op->parent() != &b) continue;
        if (!same_kind(v.op->name(), add) || v.op->name() == o::arith_addf ||
            v.op->name() == o::arith_mulf)
          continue;
        if (uses_in_block(b, v) != 1) continue;
        std::vector<Value> merged;
        for (int k = 0; k < j; ++k) merged.push_back(op.operand(k));
        for (Value nested : v.op->operands()) merged.push_back(nested);
        for (int k = j + 1; k < op.num_operands(); ++k) merged.push_back(op.operand(k));
        Operation* dead = v.op;
        auto& nv = b.insert(static_cast<size_t>(b.index_of(&op)),
                            make_op(op.name(), merged, op.result_types()));
        replace_uses(*b.parent(), op.result(), nv.result());
        b.erase(&op);
        b.erase(dead);
        changed = true;
        break;
      }
    }
  }
}

void for_each_arith_block(IrModule& m, const std::function<void(Block&)>& fn) {
  walk(m, [&](Operation& op) {
    if (op.name() == o::stencil_apply || op.name() == o::csl_stencil_apply)
      for (auto& r : op.regions())
        for (auto& b : r->blocks()) fn(*b);
  });
}

void to_varith(IrModule& m, const PassOptions&) {
  for_each_arith_block(m, to_varith_block);
}

void from_varith(IrModule& m, const PassOptions&) {
  for_each_arith_block(m, [](Block& b) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < b.ops().size(); ++i) {
        Operation& op = *b.ops()[i];
        bool add = op.name() == o::varith_add;
        if (!add && op.name() != o::varith_mul) continue;
        const char* bn = add ? o::arith_addf : o::arith_mulf;
        size_t pos = static_cast<size_t>(b.index_of(&op));
        OpBuilder bld(b, pos);
        Value acc = op.operand(0);
        for (int j = 1; j < op.num_operands(); ++j)
          acc = bld.create(bn, {acc, op.operand(j)}, {op.result_type()}).result();
        replace_uses(*b.parent(), op.result(), acc);
        b.erase(&op);
        changed = true;
        break;
      }
    }
  });
}

// ---------------------------------------------------------------------------
// varith-fuse-repeated-operands
// ---------------------------------------------------------------------------

void fuse_repeated_operands(IrModule& m, const PassOptions&) {
  for_each_arith_block(m, [](Block& b) {
    bool changed = true;
    while (changed) {
    changed = false;
    for (size_t i = 0; i < b.ops().size(); ++i) {
      Operation& op = *b.ops()[i];
      if (op.name() != o::varith_add) continue;
      std::map<Value, int> counts;
      for (Value v : op.operands()) ++counts[v];
      bool any = false;
      for (auto& [v, k] : counts)
        if (k >= 2) any = true;
      if (!any) continue;

      size_t pos = static_cast<size_t>(b.index_of(&op));
      OpBuilder bld(b, pos);
      std::vector<Value> merged;
      std::set<Value> done;
      for (Value v : op.operands()) {
        int k = counts[v];
        if (k < 2) {
          merged.push_back(v);
          continue;
        }
        if (done.count(v)) continue;
        done.insert(v);
        Value c = bld.const_f32(static_cast<float>(k));
        merged.push_back(bld.create(o::arith_mulf, {c, v}, {v.type()}).result());
      }
      if (merged.size() == 1) {
        replace_uses(*b.parent(), op.result(), merged[0]);
        b.erase(&op);
      } else {
        auto& nv = b.insert(static_cast<size_t>(b.index_of(&op)),
                            make_op(o::varith_add, merged, op.result_types()));
        replace_uses(*b.parent(), op.result(), nv.result());
        b.erase(&op);
      }
      changed = true;
      break;
    }
    }
  });
}

// ---------------------------------------------------------------------------
// fuse-multiply-add (destination-passing-style bodies)
// ---------------------------------------------------------------------------

std::optional<float> const_f32_of(Value v) {
  if (v.op && v.op->name() == o::arith_constant && v.type().is_f32())
    return v.op->attr_req("value").as_float();
  return std::nullopt;
}

// True if `buf` is read or written by `op`.
bool touches(const Operation& op, Value buf) {
  for (int i = 0; i < op.num_operands(); ++i)
    if (op.operand(i) == buf) return true;
  return false;
}

void fuse_fma_block(Block& b) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < b.ops().size(); ++i) {
      Operation& add = *b.ops()[i];
      if (add.name() != o::dps_add) continue;
      // find the producing mul of one addend buffer
      for (int side = 0; side < 2 && !changed; ++side) {
        Value t = add.operand(side);
        Value other = add.operand(1 - side);
        if (!t.type().is_memref()) continue;
        // scan backwards for the op writing t
        int writer = -1;
        for (int j = static_cast<int>(i) - 1; j >= 0; --j) {
          Operation& prev = *b.ops()[static_cast<size_t>(j)];
          if (o::is_dps_compute(prev.name()) &&
              prev.operand(prev.num_operands() - 1) == t) {
            writer = j;
            break;
          }
          if (touches(prev, t)) break; // read in between: not a simple temp
        }
        if (writer < 0) continue;
        Operation& mul = *b.ops()[static_cast<size_t>(writer)];
        if (mul.name() != o::dps_mul) continue;
        // mul form: (src, const) or (const, src) into t
        Value src;
        std::optional<float> k;
        if ((k = const_f32_of(mul.operand(1)))) src = mul.operand(0);
        else if ((k = const_f32_of(mul.operand(0)))) src = mul.operand(1);
        if (!k || !src.type().is_memref()) continue;
        if (!other.type().is_memref()) continue;
        // t must be dead after the add
        bool dead = true;
        for (size_t j = i + 1; j < b.ops().size(); ++j)
          if (touches(*b.ops()[j], t)) dead = false;
        if (!dead) continue;
        // no other access to t between mul and add
        bool clean = true;
        for (size_t j = static_cast<size_t>(writer) + 1; j < i; ++j)
          if (touches(*b.ops()[j], t)) clean = false;
        if (!clean) continue;

        Value dst = add.operand(2);
        size_t pos = static_cast<size_t>(b.index_of(&add));
        b.insert(pos, make_op(o::dps_fmac, {other, src, dst}, {},
                              {{"scale", Attribute::flt(*k)}}));
        b.erase(&add);
        b.erase(&mul);
        changed = true;
      }
      if (changed) break;
    }
  }
}

void fuse_multiply_add(IrModule& m, const PassOptions&) {
  walk(m, [&](Operation& op) {
    bool has_dps = false;
    for (auto& r : op.regions())
      for (auto& blk : r->blocks())
        for (auto& inner : blk->ops())
          if (o::is_dps_compute(inner->name())) has_dps = true;
    if (!has_dps) return;
    for (auto& r : op.regions())
      for (auto& blk : r->blocks()) fuse_fma_block(*blk);
  });
}

} // namespace

void register_optimize_passes() {
  register_pass("stencil-inline", stencil_inline);
  register_pass("to-varith", to_varith);
  register_pass("from-varith", from_varith);
  register_pass("varith-fuse-repeated-operands", fuse_repeated_operands);
  register_pass("fuse-multiply-add", fuse_multiply_add);
}

} // namespace wsc::passes
