// SPDX-License-Identifier: Apache-2.0
#include "ir/ir.hpp"

#include <algorithm>

namespace wsc::ir {

Type Value::type() const {
  if (op) return op->result_type(static_cast<int>(index));
  if (block) return block->arg_type(static_cast<int>(index));
  return Type();
}

Block& Region::add_block(std::vector<Type> arg_types) {
  blocks_.push_back(std::make_unique<Block>(this, std::move(arg_types)));
  return *blocks_.back();
}

Operation& Block::append(std::unique_ptr<Operation> op) {
  op->set_parent(this);
  ops_.push_back(std::move(op));
  return *ops_.back();
}

Operation& Block::insert(size_t pos, std::unique_ptr<Operation> op) {
  op->set_parent(this);
  ops_.insert(ops_.begin() + static_cast<long>(pos), std::move(op));
  return **(ops_.begin() + static_cast<long>(pos));
}

int Block::index_of(const Operation* op) const {
  for (size_t i = 0; i < ops_.size(); ++i)
    if (ops_[i].get() == op) return static_cast<int>(i);
  return -1;
}

std::unique_ptr<Operation> Block::take(const Operation* op) {
  int i = index_of(op);
  if (i < 0) fail(ErrorKind::Pass, "operation not in block");
  auto owned = std::move(ops_[static_cast<size_t>(i)]);
  ops_.erase(ops_.begin() + i);
  owned->set_parent(nullptr);
  return owned;
}

void Block::erase(const Operation* op) { take(op); }

Attribute Operation::attr_req(const std::string& k) const {
  auto* a = attr(k);
  if (!a) fail(ErrorKind::Verify, "'" + name_ + "' missing attribute '" + k + "'", loc_);
  return *a;
}

Region& Operation::add_region() {
  regions_.push_back(std::make_unique<Region>(this));
  return *regions_.back();
}

Operation* IrModule::lookup_symbol(const std::string& name) const {
  for (auto& op : block().ops()) {
    auto* a = op->attr("sym_name");
    if (a && a->as<StringAttr>() && a->as_string() == name) return op.get();
  }
  return nullptr;
}

std::unique_ptr<Operation> make_op(const std::string& name, std::vector<Value> operands,
                                   std::vector<Type> results,
                                   std::map<std::string, Attribute> attrs, int num_regions,
                                   Location loc) {
  auto op = std::make_unique<Operation>(name, std::move(loc));
  op->set_operands(std::move(operands));
  op->set_result_types(std::move(results));
  for (auto& [k, v] : attrs) op->set_attr(k, v);
  for (int i = 0; i < num_regions; ++i) op->add_region();
  return op;
}

Operation& OpBuilder::create(const std::string& name, std::vector<Value> operands,
                             std::vector<Type> results, std::map<std::string, Attribute> attrs,
                             int num_regions) {
  auto& op = block_->insert(pos_, make_op(name, std::move(operands), std::move(results),
                                          std::move(attrs), num_regions));
  ++pos_;
  return op;
}

Value OpBuilder::const_index(int64_t v) {
  return create("arith.constant", {}, {Type::index()},
                {{"value", Attribute::integer(v, ScalarKind::Index)}})
      .result();
}

Value OpBuilder::const_i32(int64_t v) {
  return create("arith.constant", {}, {Type::i32()},
                {{"value", Attribute::integer(v, ScalarKind::I32)}})
      .result();
}

Value OpBuilder::const_f32(float v) {
  return create("arith.constant", {}, {Type::f32()}, {{"value", Attribute::flt(v)}}).result();
}

Value OpBuilder::const_splat(float v, std::vector<int64_t> shape) {
  TensorTy t{shape};
  return create("arith.constant", {}, {Type::tensor(shape)},
                {{"value", Attribute::splat(v, t)}})
      .result();
}

namespace {
void walk_block(Block& b, const std::function<void(Operation&)>& fn) {
  // Index-based: `fn` may append to the block it is visiting.
  for (size_t i = 0; i < b.ops().size(); ++i) {
    Operation& op = *b.ops()[i];
    fn(op);
    for (auto& r : op.regions())
      for (auto& nested : r->blocks()) walk_block(*nested, fn);
  }
}
} // namespace

void walk(Region& r, const std::function<void(Operation&)>& fn) {
  for (auto& b : r.blocks()) walk_block(*b, fn);
}

void walk(IrModule& m, const std::function<void(Operation&)>& fn) { walk(m.body(), fn); }

void walk(const IrModule& m, const std::function<void(const Operation&)>& fn) {
  walk(const_cast<IrModule&>(m), [&fn](Operation& op) { fn(op); });
}

void replace_uses(Region& r, Value from, Value to) {
  walk(r, [&](Operation& op) {
    for (int i = 0; i < op.num_operands(); ++i)
      if (op.operand(i) == from) op.set_operand(i, to);
  });
}

void replace_uses(IrModule& m, Value from, Value to) { replace_uses(m.body(), from, to); }

int count_uses(const Region& r, Value v) {
  int n = 0;
  walk(const_cast<Region&>(r), [&](Operation& op) {
    for (int i = 0; i < op.num_operands(); ++i)
      if (op.operand(i) == v) ++n;
  });
  return n;
}

namespace {
void clone_region_into(const Region& src, Region& dst, std::map<Value, Value>& map) {
  for (auto& b : src.blocks()) {
    Block& nb = dst.add_block(b->arg_types());
    for (int i = 0; i < b->num_args(); ++i)
      map[const_cast<Block*>(b.get())->arg(i)] = nb.arg(i);
    for (auto& op : b->ops()) nb.append(clone_op(*op, map));
  }
}
} // namespace

std::unique_ptr<Operation> clone_op(const Operation& op, std::map<Value, Value>& map) {
  auto copy = std::make_unique<Operation>(op.name(), op.loc());
  std::vector<Value> operands;
  operands.reserve(op.operands().size());
  for (Value v : op.operands()) {
    auto it = map.find(v);
    operands.push_back(it == map.end() ? v : it->second);
  }
  copy->set_operands(std::move(operands));
  copy->set_result_types(op.result_types());
  for (auto& [k, v] : op.attrs()) copy->set_attr(k, v);
  for (auto& r : op.regions()) {
    Region& nr = copy->add_region();
    clone_region_into(*r, nr, map);
  }
  for (int i = 0; i < op.num_results(); ++i)
    map[const_cast<Operation&>(op).result(i)] = copy->result(i);
  return copy;
}

IrModule clone_module(const IrModule& m) {
  IrModule out;
  std::map<Value, Value> map;
  for (auto& op : m.block().ops()) out.block().append(clone_op(*op, map));
  return out;
}

namespace {

struct EqCtx {
  std::map<Value, Value> map; // a-value -> b-value
};

bool eq_op(const Operation& a, const Operation& b, EqCtx& ctx);

bool eq_region(const Region& a, const Region& b, EqCtx& ctx) {
  if (a.blocks().size() != b.blocks().size()) return false;
  for (size_t i = 0; i < a.blocks().size(); ++i) {
    const Block& ba = *a.blocks()[i];
    const Block& bb = *b.blocks()[i];
    if (ba.arg_types() != bb.arg_types()) return false;
    if (ba.ops().size() != bb.ops().size()) return false;
    for (int j = 0; j < ba.num_args(); ++j)
      ctx.map[const_cast<Block&>(ba).arg(j)] = const_cast<Block&>(bb).arg(j);
    for (size_t j = 0; j < ba.ops().size(); ++j)
      if (!eq_op(*ba.ops()[j], *bb.ops()[j], ctx)) return false;
  }
  return true;
}

bool eq_op(const Operation& a, const Operation& b, EqCtx& ctx) {
  if (a.name() != b.name()) return false;
  if (a.num_operands() != b.num_operands() || a.num_results() != b.num_results()) return false;
  if (a.result_types() != b.result_types()) return false;
  if (a.attrs().size() != b.attrs().size()) return false;
  for (auto& [k, v] : a.attrs()) {
    auto* bv = b.attr(k);
    if (!bv || !(v == *bv)) return false;
  }
  for (int i = 0; i < a.num_operands(); ++i) {
    auto it = ctx.map.find(a.operand(i));
    if (it == ctx.map.end() || !(it->second == b.operand(i))) return false;
  }
  if (a.num_regions() != b.num_regions()) return false;
  for (int i = 0; i < a.num_regions(); ++i)
    if (!eq_region(a.region(i), b.region(i), ctx)) return false;
  for (int i = 0; i < a.num_results(); ++i)
    ctx.map[const_cast<Operation&>(a).result(i)] = const_cast<Operation&>(b).result(i);
  return true;
}

} // namespace

bool structurally_equal(const Operation& a, const Operation& b) {
  EqCtx ctx;
  return eq_op(a, b, ctx);
}

bool structurally_equal(const IrModule& a, const IrModule& b) {
  if (a.block().ops().size() != b.block().ops().size()) return false;
  EqCtx ctx;
  for (size_t i = 0; i < a.block().ops().size(); ++i)
    if (!eq_op(*a.block().ops()[i], *b.block().ops()[i], ctx)) return false;
  return true;
}

} // namespace wsc::ir
