// SPDX-License-Identifier: Apache-2.0
#include "stencil/oracle.hpp"

#include "dialects/ops.hpp"
#include "ir/registry.hpp"

#include <functional>

namespace wsc::stencil {

using namespace ir;

namespace {

Operation* main_func(const IrModule& m) {
  Operation* fn = m.lookup_symbol("main");
  if (!fn || fn->name() != ops::func_func)
    fail(ErrorKind::Verify, "module has no @main function");
  return fn;
}

} // namespace

std::vector<std::string> field_names(const IrModule& m) {
  Operation* fn = main_func(m);
  std::vector<std::string> names;
  for (auto& a : fn->attr_req("field_names").as_array()) names.push_back(a.as_string());
  return names;
}

std::map<std::string, Bounds> field_bounds(const IrModule& m) {
  Operation* fn = main_func(m);
  auto names = field_names(m);
  const Block& body = fn->region(0).front();
  if (static_cast<size_t>(body.num_args()) != names.size())
    fail(ErrorKind::Verify, "field_names does not match @main arity");
  std::map<std::string, Bounds> out;
  for (size_t i = 0; i < names.size(); ++i) {
    auto* f = body.arg_type(static_cast<int>(i)).as<FieldTy>();
    if (!f) fail(ErrorKind::Verify, "@main arguments must be fields");
    out[names[i]] = f->bounds;
  }
  return out;
}

void verify_stencil(const IrModule& m) {
  verify(m);
  walk(const_cast<IrModule&>(m), [](Operation& op) {
    if (op.name() != ops::stencil_apply) return;
    auto* res = op.result_type().as<TempTy>();
    const Bounds& out_b = res->bounds;
    for (auto& inner : op.region(0).front().ops()) {
      const std::string& n = inner->name();
      if (n == ops::stencil_access) {
        Value src = inner->operand(0);
        if (!src.is_block_arg() || src.block != &op.region(0).front())
          verify_fail(*inner, "access must read an apply block argument");
        auto* t = src.type().as<TempTy>();
        auto off = inner->attr_req("offset").as_int_array();
        for (int d = 0; d < out_b.rank(); ++d) {
          int64_t lo = out_b.lb(d) + off[static_cast<size_t>(d)];
          int64_t hi = out_b.ub(d) - 1 + off[static_cast<size_t>(d)];
          if (lo < t->bounds.lb(d) || hi >= t->bounds.ub(d)) {
            std::string off_s = "(";
            for (size_t k = 0; k < off.size(); ++k)
              off_s += (k ? "," : "") + std::to_string(off[k]);
            off_s += ")";
            verify_fail(*inner, "access offset " + off_s +
                                    " reads outside operand bounds along dimension " +
                                    std::to_string(d));
          }
        }
      } else if (n != ops::stencil_return && !ops::is_stencil_arith(n)) {
        verify_fail(*inner, "unsupported operation inside stencil.apply body");
      }
    }
  });
}

namespace {

// One executed step of @main's body: value environment maps SSA values either
// to whole grids (temps) or per-cell scalars during apply evaluation.
struct Interp {
  const IrModule& m;
  GridMap fields; // by arg index name
  std::vector<std::string> names;
  std::map<Value, GridFunction> temps;
  std::vector<std::pair<int, GridFunction>> staged_stores;

  explicit Interp(const IrModule& mod, const GridMap& inputs) : m(mod) {
    names = field_names(mod);
    auto bounds = field_bounds(mod);
    for (size_t i = 0; i < names.size(); ++i) {
      auto it = inputs.find(names[i]);
      if (it == inputs.end())
        fail(ErrorKind::Config, "missing input grid for field '" + names[i] + "'");
      if (!(it->second.bounds == bounds[names[i]]))
        fail(ErrorKind::Config, "input grid bounds mismatch for field '" + names[i] + "'");
      fields[names[i]] = it->second;
    }
  }

  int arg_index(Value v) const {
    // @main block arguments are the fields
    return static_cast<int>(v.index);
  }

  void run_step() {
    Operation* fn = main_func(m);
    Block& body = fn->region(0).front();
    exec_block(body);
    for (auto& [idx, grid] : staged_stores) {
      GridFunction& f = fields[names[static_cast<size_t>(idx)]];
      f = grid;
    }
    staged_stores.clear();
    temps.clear();
  }

  void exec_block(Block& body) {
    for (auto& op : body.ops()) exec_op(*op);
  }

  void exec_op(Operation& op) {
    const std::string& n = op.name();
    if (n == ops::stencil_load) {
      Value src = op.operand(0);
      if (!src.is_block_arg()) fail(ErrorKind::Verify, "load must read a field argument");
      temps[op.result()] = fields[names[static_cast<size_t>(arg_index(src))]];
    } else if (n == ops::stencil_store) {
      Value dst = op.operand(1);
      if (!dst.is_block_arg()) fail(ErrorKind::Verify, "store must write a field argument");
      staged_stores.emplace_back(arg_index(dst), temp_of(op.operand(0)));
    } else if (n == ops::stencil_apply) {
      run_apply(op);
    } else if (n == ops::stencil_embed) {
      GridFunction inner = temp_of(op.operand(0));
      GridFunction outer = temp_of(op.operand(1));
      std::vector<int64_t> idx;
      for (int d = 0; d < inner.bounds.rank(); ++d) idx.push_back(inner.bounds.lb(d));
      while (true) {
        outer.at(idx) = inner.at(idx);
        int d = inner.bounds.rank() - 1;
        while (d >= 0) {
          if (++idx[static_cast<size_t>(d)] < inner.bounds.ub(d)) break;
          idx[static_cast<size_t>(d)] = inner.bounds.lb(d);
          --d;
        }
        if (d < 0) break;
      }
      temps[op.result()] = std::move(outer);
    } else if (n == ops::scf_for) {
      run_loop(op);
    } else if (n == ops::arith_constant) {
      // loop bounds; nothing to evaluate eagerly
    } else if (n == ops::func_return || n == ops::scf_yield) {
      // structural
    } else {
      fail(ErrorKind::Verify, "unrecognized top-level control flow: '" + n + "'", op.loc());
    }
  }

  GridFunction temp_of(Value v) {
    auto it = temps.find(v);
    if (it == temps.end()) fail(ErrorKind::Verify, "value is not a materialized temp");
    return it->second;
  }

  int64_t const_int(Value v) {
    if (!v.op || v.op->name() != ops::arith_constant)
      fail(ErrorKind::Verify, "loop bounds must be constants");
    return v.op->int_attr("value");
  }

  void run_loop(Operation& op) {
    int64_t lb = const_int(op.operand(0));
    int64_t ub = const_int(op.operand(1));
    int64_t step = const_int(op.operand(2));
    if (step <= 0) fail(ErrorKind::Verify, "loop step must be positive");
    int n_iter = op.num_operands() - 3;
    std::vector<GridFunction> carried;
    for (int i = 0; i < n_iter; ++i) carried.push_back(temp_of(op.operand(3 + i)));
    Block& body = op.region(0).front();
    for (int64_t iv = lb; iv < ub; iv += step) {
      for (int i = 0; i < n_iter; ++i) temps[body.arg(i + 1)] = carried[static_cast<size_t>(i)];
      for (auto& inner : body.ops()) exec_op(*inner);
      Operation& yield = body.back();
      for (int i = 0; i < n_iter; ++i)
        carried[static_cast<size_t>(i)] = temp_of(yield.operand(i));
    }
    for (int i = 0; i < n_iter; ++i)
      temps[op.result(i)] = std::move(carried[static_cast<size_t>(i)]);
  }

  void run_apply(Operation& op) {
    Block& body = op.region(0).front();
    std::vector<GridFunction> args;
    for (int i = 0; i < op.num_operands(); ++i) args.push_back(temp_of(op.operand(i)));
    auto* res_ty = op.result_type().as<TempTy>();
    GridFunction out(res_ty->bounds);

    // Flatten the body once; evaluate per cell with a slot environment.
    std::vector<Operation*> prog;
    std::map<Value, int> slot;
    for (auto& inner : body.ops()) {
      prog.push_back(inner.get());
      for (int r = 0; r < inner->num_results(); ++r)
        slot[inner->result(r)] = static_cast<int>(slot.size());
    }
    std::vector<float> env(slot.size(), 0.0f);

    auto value_of = [&](Value v) -> float {
      auto it = slot.find(v);
      if (it == slot.end()) fail(ErrorKind::Verify, "apply body uses a non-local value");
      return env[static_cast<size_t>(it->second)];
    };

    const Bounds& ob = out.bounds;
    std::vector<int64_t> idx;
    for (int d = 0; d < ob.rank(); ++d) idx.push_back(ob.lb(d));
    std::vector<int64_t> src_idx(idx.size());
    while (true) {
      for (Operation* inner : prog) {
        const std::string& n = inner->name();
        if (n == ops::stencil_access) {
          auto off = inner->attr_req("offset").as_int_array();
          for (size_t d = 0; d < idx.size(); ++d) src_idx[d] = idx[d] + off[d];
          const GridFunction& g = args[inner->operand(0).index];
          if (!g.bounds.contains(src_idx))
            fail(ErrorKind::Verify, "oracle bounds violation in stencil.access",
                 inner->loc());
          env[static_cast<size_t>(slot[inner->result()])] = g.at(src_idx);
        } else if (n == ops::arith_constant) {
          env[static_cast<size_t>(slot[inner->result()])] =
              inner->attr_req("value").as_float();
        } else if (n == ops::arith_addf || n == ops::arith_subf || n == ops::arith_mulf) {
          float a = value_of(inner->operand(0));
          float b = value_of(inner->operand(1));
          float r = n == ops::arith_addf ? a + b : (n == ops::arith_subf ? a - b : a * b);
          env[static_cast<size_t>(slot[inner->result()])] = r;
        } else if (n == ops::varith_add || n == ops::varith_mul) {
          float acc = value_of(inner->operand(0));
          for (int i = 1; i < inner->num_operands(); ++i) {
            float b = value_of(inner->operand(i));
            acc = n == ops::varith_add ? acc + b : acc * b;
          }
          env[static_cast<size_t>(slot[inner->result()])] = acc;
        } else if (n == ops::stencil_return) {
          out.at(idx) = value_of(inner->operand(0));
        } else {
          fail(ErrorKind::Verify, "unsupported op in oracle apply body: '" + n + "'",
               inner->loc());
        }
      }
      int d = ob.rank() - 1;
      while (d >= 0) {
        if (++idx[static_cast<size_t>(d)] < ob.ub(d)) break;
        idx[static_cast<size_t>(d)] = ob.lb(d);
        --d;
      }
      if (d < 0) break;
    }
    temps[op.result()] = std::move(out);
  }
};

bool has_timestep_loop(const IrModule& m) {
  bool found = false;
  walk(const_cast<IrModule&>(m), [&](Operation& op) {
    if (op.name() == ops::scf_for) found = true;
  });
  return found;
}

int64_t loop_trip_count(const IrModule& m) {
  int64_t trips = -1;
  walk(const_cast<IrModule&>(m), [&](Operation& op) {
    if (op.name() != ops::scf_for) return;
    auto cint = [](Value v) { return v.op->int_attr("value"); };
    trips = (cint(op.operand(1)) - cint(op.operand(0)) + cint(op.operand(2)) - 1) /
            cint(op.operand(2));
  });
  return trips;
}

} // namespace

GridMap interpret_stencil(const IrModule& m, const GridMap& inputs, int64_t timesteps) {
  verify_stencil(m);
  Interp interp(m, inputs);
  if (has_timestep_loop(m)) {
    int64_t trips = loop_trip_count(m);
    if (trips != timesteps)
      fail(ErrorKind::Config, "module's timestep loop runs " + std::to_string(trips) +
                                  " iterations but " + std::to_string(timesteps) +
                                  " were requested");
    interp.run_step();
  } else {
    for (int64_t t = 0; t < timesteps; ++t) interp.run_step();
  }
  return interp.fields;
}

std::map<std::string, Bounds> output_interiors(const IrModule& m) {
  Operation* fn = main_func(m);
  auto names = field_names(m);
  std::map<std::string, Bounds> out;

  std::function<Bounds(Value)> interior_of = [&](Value v) -> Bounds {
    if (v.op) {
      if (v.op->name() == ops::stencil_embed) return interior_of(v.op->operand(0));
      if (v.op->name() == ops::scf_for) {
        Block& body = v.op->region(0).front();
        return interior_of(body.back().operand(static_cast<int>(v.index)));
      }
      if (auto* t = v.op->result_type(static_cast<int>(v.index)).as<TempTy>())
        return t->bounds;
    }
    if (auto* t = v.type().as<TempTy>()) return t->bounds;
    fail(ErrorKind::Verify, "cannot trace output interior");
  };

  walk(const_cast<IrModule&>(m), [&](Operation& op) {
    if (op.name() != ops::stencil_store) return;
    Value field = op.operand(1);
    // stores target @main arguments
    if (field.is_block_arg() && field.block == &fn->region(0).front())
      out[names[field.index]] = interior_of(op.operand(0));
  });
  return out;
}

GridMap make_inputs(const IrModule& m) {
  auto names = field_names(m);
  auto bounds = field_bounds(m);
  GridMap inputs;
  for (size_t i = 0; i < names.size(); ++i)
    inputs[names[i]] = make_input(bounds[names[i]], static_cast<int64_t>(i));
  return inputs;
}

} // namespace wsc::stencil
