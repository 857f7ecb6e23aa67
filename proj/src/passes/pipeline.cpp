// SPDX-License-Identifier: Apache-2.0
#include "passes/passes.hpp"

#include "dialects/ops.hpp"
#include "ir/registry.hpp"

#include <map>

namespace wsc::passes {

using namespace ir;
namespace o = ir::ops;

void register_optimize_passes();
void register_distribute_passes();
void register_cslstencil_passes();
void register_bufferize_passes();
void register_actorize_passes();
void register_cslir_passes();

void register_all() {
  static bool done = [] {
    register_optimize_passes();
    register_distribute_passes();
    register_cslstencil_passes();
    register_bufferize_passes();
    register_actorize_passes();
    register_cslir_passes();
    return true;
  }();
  (void)done;
}

PassPipeline group_pipeline(int group, const PipelineConfig& cfg) {
  register_all();
  PassPipeline p;
  auto add = [&](const std::string& name, std::map<std::string, std::string> opts = {}) {
    p.passes.push_back({name, PassOptions{std::move(opts)}});
  };
  std::map<std::string, std::string> topo = {{"px", std::to_string(cfg.topo_x)},
                                             {"py", std::to_string(cfg.topo_y)}};
  switch (group) {
  case 0:
    if (cfg.inline_applies) add("stencil-inline");
    if (cfg.use_varith) {
      add("to-varith");
      add("varith-fuse-repeated-operands");
    }
    break;
  case 1:
    add("distribute-stencil", topo);
    add("tensorize-z");
    break;
  case 2:
    add("stencil-to-csl-stencil", {{"num_chunks", std::to_string(cfg.num_chunks)}});
    add("promote-coefficients");
    add("detect-uniform-reduction");
    add("wrap-in-csl-wrapper", topo);
    break;
  case 3:
    add("from-varith");
    add("bufferize");
    add("arith-to-dps");
    if (cfg.use_fma) add("fuse-multiply-add");
    add("assign-allocations");
    break;
  case 4:
    add("lower-apply-to-actors");
    add("control-flow-to-task-graph");
    break;
  case 5:
    add("dps-to-builtins");
    add("memref-to-dsd");
    break;
  default:
    fail(ErrorKind::Config, "pipeline group out of range: " + std::to_string(group));
  }
  return p;
}

void wrap_timesteps(IrModule& m, int64_t timesteps) {
  Operation* fn = m.lookup_symbol("main");
  if (!fn) fail(ErrorKind::Config, "module has no @main");
  Block& body = fn->region(0).front();

  // classify the straight-line body
  std::map<uint32_t, Value> loads; // field arg index -> loaded temp
  struct StoreRec {
    Operation* op;
    uint32_t field;
  };
  std::vector<StoreRec> stores;
  std::vector<Operation*> middle;
  for (auto& op : body.ops()) {
    if (op->name() == o::stencil_load) {
      loads[op->operand(0).index] = op->result();
    } else if (op->name() == o::stencil_store) {
      stores.push_back({op.get(), op->operand(1).index});
    } else if (op->name() != o::func_return) {
      middle.push_back(op.get());
    }
  }
  for (auto& s : stores)
    if (!loads.count(s.field))
      fail(ErrorKind::Config,
           "timestep wrapping requires the in-place form: every stored field must be loaded");

  // loop-carried values: one per store, initialized with that field's load
  std::vector<Value> inits;
  std::vector<Type> carried_tys;
  for (auto& s : stores) {
    inits.push_back(loads[s.field]);
    carried_tys.push_back(loads[s.field].type());
  }

  size_t pos = 0; // insert after the last load
  for (size_t i = 0; i < body.ops().size(); ++i)
    if (body.ops()[i]->name() == o::stencil_load) pos = i + 1;
  OpBuilder b(body, pos);
  Value lb = b.const_index(0), ub = b.const_index(timesteps), step = b.const_index(1);
  std::vector<Value> for_operands = {lb, ub, step};
  for (Value v : inits) for_operands.push_back(v);
  std::vector<Type> arg_tys = {Type::index()};
  for (Type t : carried_tys) arg_tys.push_back(t);
  auto& loop = b.create(o::scf_for, for_operands, carried_tys, {}, 1);
  Block& lb_blk = loop.region(0).add_block(arg_tys);

  for (Operation* op : middle) lb_blk.append(body.take(op));
  std::vector<Value> yields;
  for (auto& s : stores) yields.push_back(s.op->operand(0));
  auto& yield = lb_blk.append(make_op(o::scf_yield, yields, {}));
  (void)yield;

  // inside the loop, carried loads become block arguments
  for (size_t k = 0; k < stores.size(); ++k)
    replace_uses(loop.region(0), inits[k], lb_blk.arg(static_cast<int>(k) + 1));
  // stores now consume loop results
  for (size_t k = 0; k < stores.size(); ++k)
    stores[k].op->set_operand(0, loop.result(static_cast<int>(k)));

  verify(m);
}

} // namespace wsc::passes
