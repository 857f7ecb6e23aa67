// SPDX-License-Identifier: Apache-2.0
#include "ir/registry.hpp"

#include <set>

namespace wsc::ir {

Registry& Registry::instance() {
  static Registry r;
  return r;
}

void Registry::add(OpInfo info) { ops_[info.name] = std::move(info); }

const OpInfo* Registry::lookup(const std::string& name) const {
  auto it = ops_.find(name);
  return it == ops_.end() ? nullptr : &it->second;
}

const OpInfo& Registry::require(const Operation& op) const {
  auto* info = lookup(op.name());
  if (!info)
    fail(ErrorKind::Verify, "unregistered operation '" + op.name() + "'", op.loc());
  return *info;
}

void verify_fail(const Operation& op, const std::string& msg) {
  fail(ErrorKind::Verify, "'" + op.name() + "': " + msg, op.loc());
}

void expect(const Operation& op, bool cond, const std::string& msg) {
  if (!cond) verify_fail(op, msg);
}

namespace {

struct VerifyCtx {
  std::set<Value> visible;
};

void verify_block(const Block& b, VerifyCtx ctx, bool needs_terminator);

void verify_op(const Operation& op, VerifyCtx& ctx) {
  const OpInfo& info = Registry::instance().require(op);
  for (int i = 0; i < op.num_operands(); ++i) {
    Value v = op.operand(i);
    if (!v.valid()) verify_fail(op, "operand " + std::to_string(i) + " is null");
    if (!ctx.visible.count(v))
      verify_fail(op, "operand " + std::to_string(i) +
                          " is not visible at its use (defined later or out of scope)");
  }
  if (info.verify) info.verify(op);
  for (auto& r : op.regions())
    for (auto& blk : r->blocks()) verify_block(*blk, ctx, info.regions_terminated);
}

void verify_block(const Block& b, VerifyCtx ctx, bool needs_terminator) {
  for (int i = 0; i < b.num_args(); ++i) ctx.visible.insert(const_cast<Block&>(b).arg(i));
  for (auto& op : b.ops()) {
    verify_op(*op, ctx);
    for (int i = 0; i < op->num_results(); ++i) ctx.visible.insert(op->result(i));
    const OpInfo& info = *Registry::instance().lookup(op->name());
    if (info.is_terminator && op.get() != b.ops().back().get())
      verify_fail(*op, "terminator must be the last operation of its block");
  }
  if (needs_terminator) {
    if (b.empty()) fail(ErrorKind::Verify, "block requires a terminator but is empty");
    const OpInfo& last = *Registry::instance().lookup(b.back().name());
    if (!last.is_terminator)
      verify_fail(b.back(), "block must end with a terminator");
  }
}

} // namespace

void verify(const IrModule& m) {
  register_dialects();
  // Symbol uniqueness at module scope.
  std::set<std::string> syms;
  for (auto& op : m.block().ops()) {
    auto* a = op->attr("sym_name");
    if (a && a->as<StringAttr>()) {
      if (!syms.insert(a->as_string()).second)
        verify_fail(*op, "duplicate symbol '" + a->as_string() + "'");
    }
  }
  VerifyCtx ctx;
  verify_block(m.block(), ctx, /*needs_terminator=*/false);
}

} // namespace wsc::ir
