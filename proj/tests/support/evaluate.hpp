// SPDX-License-Identifier: Apache-2.0
#pragma once

// Functional (value-semantics) evaluator for distributed + tensorized stencil
// modules. Independent of the simulator: local per-PE types are mapped back to
// global grids and apply bodies are evaluated column by column. Used as the
// differential oracle for the distribution and csl-stencil conversion passes.

#include "dialects/ops.hpp"
#include "ir/ir.hpp"
#include "stencil/grid.hpp"
#include "stencil/oracle.hpp"

#include <map>

namespace wsc::test {

using namespace wsc::ir;
using stencil::GridFunction;
using stencil::GridMap;

// A localized type [l, u) maps back to global [l, n - 1 + u).
inline Bounds globalize(const Bounds& local, int64_t zt, int64_t nx, int64_t ny) {
  Bounds g;
  g.dims.push_back({local.lb(0), nx - 1 + local.ub(0)});
  g.dims.push_back({local.lb(1), ny - 1 + local.ub(1)});
  g.dims.push_back({0, zt});
  return g;
}

class DistributedEval {
public:
  DistributedEval(const IrModule& m, int64_t nx, int64_t ny) : m_(m), nx_(nx), ny_(ny) {}

  // `inputs` are global rank-3 grids from the pre-distribution module, except
  // z bounds rebased at 0 (column coordinates).
  GridMap run(const GridMap& inputs, int64_t timesteps) {
    auto names = stencil::field_names(m_);
    Operation* fn = m_.lookup_symbol("main");
    Block& body = fn->region(0).front();
    fields_.clear();
    for (size_t i = 0; i < names.size(); ++i) {
      auto* f = body.arg_type(static_cast<int>(i)).as<FieldTy>();
      Bounds gb = globalize(f->bounds, f->z_tensor, nx_, ny_);
      auto it = inputs.find(names[i]);
      if (it == inputs.end() || !(it->second.bounds == gb))
        fail(ErrorKind::Config, "evaluator input mismatch for field " + names[i]);
      fields_[names[i]] = it->second;
    }
    for (int64_t t = 0; t < timesteps; ++t) {
      temps_.clear();
      staged_.clear();
      for (auto& op : body.ops()) exec(*op, body, names);
      for (auto& [idx, g] : staged_) fields_[names[static_cast<size_t>(idx)]] = g;
    }
    return fields_;
  }

private:
  const IrModule& m_;
  int64_t nx_, ny_;
  GridMap fields_;
  std::map<Value, GridFunction> temps_;
  std::vector<std::pair<int, GridFunction>> staged_;

  GridFunction& temp_of(Value v) {
    auto it = temps_.find(v);
    if (it == temps_.end()) fail(ErrorKind::Verify, "evaluator: unmaterialized temp");
    return it->second;
  }

  void exec(Operation& op, Block& body, const std::vector<std::string>& names) {
    namespace o = ir::ops;
    const std::string& n = op.name();
    if (n == o::stencil_load) {
      temps_[op.result()] = fields_[names[op.operand(0).index]];
    } else if (n == o::stencil_store) {
      staged_.emplace_back(static_cast<int>(op.operand(1).index), temp_of(op.operand(0)));
    } else if (n == o::dmp_swap) {
      for (int i = 0; i < op.num_results(); ++i)
        temps_[op.result(i)] = temp_of(op.operand(i));
    } else if (n == o::stencil_embed) {
      GridFunction inner = temp_of(op.operand(0));
      GridFunction outer = temp_of(op.operand(1));
      int64_t zoff = op.has_attr("z_offset") ? op.int_attr("z_offset") : 0;
      for (int64_t x = inner.bounds.lb(0); x < inner.bounds.ub(0); ++x)
        for (int64_t y = inner.bounds.lb(1); y < inner.bounds.ub(1); ++y)
          for (int64_t z = inner.bounds.lb(2); z < inner.bounds.ub(2); ++z)
            outer.at({x, y, z + zoff}) = inner.at({x, y, z});
      temps_[op.result()] = std::move(outer);
    } else if (n == o::stencil_apply) {
      run_apply(op);
    } else if (n == o::csl_stencil_apply) {
      run_csl_apply(op);
    } else if (n == o::scf_for) {
      int64_t lb = op.operand(0).op->int_attr("value");
      int64_t ub = op.operand(1).op->int_attr("value");
      int n_iter = op.num_operands() - 3;
      std::vector<GridFunction> carried;
      for (int i = 0; i < n_iter; ++i) carried.push_back(temp_of(op.operand(3 + i)));
      Block& lb_blk = op.region(0).front();
      for (int64_t iv = lb; iv < ub; ++iv) {
        for (int i = 0; i < n_iter; ++i) temps_[lb_blk.arg(i + 1)] = carried[static_cast<size_t>(i)];
        for (auto& inner : lb_blk.ops()) exec(*inner, body, names);
        for (int i = 0; i < n_iter; ++i)
          carried[static_cast<size_t>(i)] = temp_of(lb_blk.back().operand(i));
      }
      for (int i = 0; i < n_iter; ++i) temps_[op.result(i)] = carried[static_cast<size_t>(i)];
    } else if (n == o::arith_constant || n == o::func_return || n == o::scf_yield) {
      // structural
    } else {
      fail(ErrorKind::Verify, "evaluator: unsupported top-level op '" + n + "'");
    }
  }

  // Chunked two-region evaluation with receive-coefficient application.
  void run_csl_apply(Operation& apply) {
    namespace o = ir::ops;
    auto slots = o::slot_table(apply.attr_req("swaps").as_array());
    int64_t chunks = apply.int_attr("num_chunks");
    int64_t zb = apply.int_attr("z_begin"), ze = apply.int_attr("z_end");
    int64_t zex = ze - zb;
    int64_t clen = chunks > 0 ? zex / chunks : 0;
    std::vector<float> coeffs(slots.size(), 1.0f);
    if (auto* rc = apply.attr("recv_coeffs")) {
      auto arr = rc->as_array();
      for (size_t i = 0; i < arr.size(); ++i) coeffs[i] = arr[i].as_float();
    }
    auto* rt = apply.result_type().as<TempTy>();
    int64_t nz_out = rt->z_tensor;
    GridFunction out(globalize(rt->bounds, nz_out, nx_, ny_));

    int n_operands = apply.num_operands() - 1; // last is the accumulator init
    std::vector<GridFunction*> args;
    for (int i = 0; i < n_operands; ++i) args.push_back(&temp_of(apply.operand(i)));
    float acc_init = 0.0f;
    if (Value ai = apply.operand(n_operands); ai.op)
      acc_init = ai.op->attr_req("value").as_float();

    using Col = std::vector<float>;
    for (int64_t x = 0; x < nx_; ++x) {
      for (int64_t y = 0; y < ny_; ++y) {
        Col acc(static_cast<size_t>(zex), acc_init);
        if (!slots.empty()) {
          Block& b0 = apply.region(0).front();
          for (int64_t c = 0; c < chunks; ++c) {
            // receive slab: one row per slot, with promoted coefficients
            Col recv(static_cast<size_t>(static_cast<int64_t>(slots.size()) * clen));
            for (size_t s = 0; s < slots.size(); ++s) {
              const o::Slot& sl = slots[s];
              GridFunction* g = args[static_cast<size_t>(sl.operand)];
              for (int64_t k = 0; k < clen; ++k) {
                float v = g->at({x + sl.dx * sl.hops, y + sl.dy * sl.hops,
                                 zb + c * clen + k});
                recv[s * static_cast<size_t>(clen) + static_cast<size_t>(k)] =
                    v * coeffs[s];
              }
            }
            acc = eval_region(b0, {recv, {}, acc}, c * clen, slots, clen);
          }
        }
        // done region: operand columns + accumulator
        Block& b1 = apply.region(1).front();
        std::vector<Col> cols;
        for (int i = 0; i < n_operands; ++i) {
          GridFunction* g = args[static_cast<size_t>(i)];
          Col col(static_cast<size_t>(g->bounds.extent(2)));
          for (int64_t k = 0; k < g->bounds.extent(2); ++k)
            col[static_cast<size_t>(k)] = g->at({x, y, k});
          cols.push_back(std::move(col));
        }
        cols.push_back(acc);
        Col res = eval_region(b1, cols, 0, slots, clen);
        for (int64_t z = 0; z < nz_out; ++z) out.at({x, y, z}) = res[static_cast<size_t>(z)];
      }
    }
    temps_[apply.result()] = std::move(out);
  }

  // Evaluates a single-yield tensor region with the given block-arg columns.
  // `off` feeds any index-typed argument (the chunk offset).
  std::vector<float> eval_region(Block& body, std::vector<std::vector<float>> arg_cols,
                                 int64_t off, const std::vector<ir::ops::Slot>& slots,
                                 int64_t clen) {
    namespace o = ir::ops;
    using Col = std::vector<float>;
    std::map<Value, Col> env;
    std::map<Value, float> scalars;
    for (int i = 0; i < body.num_args(); ++i)
      if (!body.arg_type(i).is_index())
        env[body.arg(i)] = arg_cols[static_cast<size_t>(i)];
    Col yielded;
    for (auto& op : body.ops()) {
      const std::string& n = op->name();
      if (n == o::csl_stencil_access) {
        auto offs = op->attr_req("offset").as_int_array();
        int slot = o::slot_index(slots, op->int_attr("field"), offs[0], offs[1]);
        const Col& recv = env[op->operand(0)];
        env[op->result()] = Col(recv.begin() + slot * clen, recv.begin() + (slot + 1) * clen);
      } else if (n == o::tensor_extract_slice) {
        const Col& src = env[op->operand(0)];
        int64_t so = op->int_attr("offset"), sl2 = op->int_attr("size");
        env[op->result()] = Col(src.begin() + so, src.begin() + so + sl2);
      } else if (n == o::tensor_insert_slice) {
        Col big = env[op->operand(1)];
        const Col& small = env[op->operand(0)];
        int64_t ofs = op->num_operands() == 3 ? off : op->int_attr("offset");
        for (size_t k = 0; k < small.size(); ++k) big[static_cast<size_t>(ofs) + k] = small[k];
        env[op->result()] = std::move(big);
      } else if (n == o::arith_constant) {
        auto v = op->attr_req("value");
        if (v.as<SplatAttr>()) {
          auto* tt = op->result_type().as<TensorTy>();
          env[op->result()] = Col(static_cast<size_t>(tt->shape[0]), v.as_float());
        } else {
          scalars[op->result()] = v.as_float();
        }
      } else if (n == o::arith_addf || n == o::arith_subf || n == o::arith_mulf ||
                 n == o::varith_add || n == o::varith_mul) {
        bool add_kind = n == o::arith_addf || n == o::varith_add;
        bool sub_kind = n == o::arith_subf;
        auto get = [&](Value v) -> Col {
          auto it = env.find(v);
          if (it != env.end()) return it->second;
          return Col{scalars.at(v)};
        };
        Col acc2 = get(op->operand(0));
        bool acc_scalar = !op->operand(0).type().is_tensor();
        for (int i = 1; i < op->num_operands(); ++i) {
          Col rhs = get(op->operand(i));
          bool rhs_scalar = !op->operand(i).type().is_tensor();
          size_t len = std::max(acc2.size(), rhs.size());
          Col res(len);
          for (size_t k = 0; k < len; ++k) {
            float a = acc_scalar ? acc2[0] : acc2[k];
            float b2 = rhs_scalar ? rhs[0] : rhs[k];
            res[k] = add_kind ? a + b2 : (sub_kind ? a - b2 : a * b2);
          }
          acc2 = std::move(res);
          acc_scalar = acc_scalar && rhs_scalar;
        }
        if (acc_scalar)
          scalars[op->result()] = acc2[0];
        else
          env[op->result()] = std::move(acc2);
      } else if (n == o::csl_stencil_yield) {
        if (op->num_operands() > 0) yielded = env[op->operand(0)];
      } else {
        fail(ErrorKind::Verify, "evaluator: unsupported csl region op '" + n + "'");
      }
    }
    return yielded;
  }

  void run_apply(Operation& apply) {
    namespace o = ir::ops;
    auto* rt = apply.result_type().as<TempTy>();
    int64_t nz_out = rt->z_tensor;
    GridFunction out(globalize(rt->bounds, nz_out, nx_, ny_));
    std::vector<GridFunction*> args;
    for (int i = 0; i < apply.num_operands(); ++i) args.push_back(&temp_of(apply.operand(i)));
    Block& body = apply.region(0).front();

    using Col = std::vector<float>;
    for (int64_t x = 0; x < nx_; ++x) {
      for (int64_t y = 0; y < ny_; ++y) {
        std::map<Value, Col> env;
        std::map<Value, float> scalars;
        for (auto& op : body.ops()) {
          const std::string& n = op->name();
          if (n == o::stencil_access) {
            GridFunction* g = args[op->operand(0).index];
            auto off = op->attr_req("offset").as_int_array();
            Col col(static_cast<size_t>(g->bounds.extent(2)));
            for (int64_t z = 0; z < g->bounds.extent(2); ++z)
              col[static_cast<size_t>(z)] = g->at({x + off[0], y + off[1], z});
            env[op->result()] = std::move(col);
          } else if (n == o::tensor_extract_slice) {
            const Col& src = env[op->operand(0)];
            int64_t so = op->int_attr("offset"), sl = op->int_attr("size");
            env[op->result()] = Col(src.begin() + so, src.begin() + so + sl);
          } else if (n == o::arith_constant) {
            auto v = op->attr_req("value");
            if (v.as<SplatAttr>()) {
              auto* tt = op->result_type().as<TensorTy>();
              env[op->result()] = Col(static_cast<size_t>(tt->shape[0]), v.as_float());
            } else {
              scalars[op->result()] = v.as_float();
            }
          } else if (n == o::arith_addf || n == o::arith_subf || n == o::arith_mulf ||
                     n == o::varith_add || n == o::varith_mul) {
            bool add_kind = n == o::arith_addf || n == o::varith_add;
            bool mul_kind = n == o::arith_mulf || n == o::varith_mul;
            bool sub_kind = n == o::arith_subf;
            auto get = [&](Value v) -> Col {
              auto it = env.find(v);
              if (it != env.end()) return it->second;
              return Col{scalars.at(v)}; // scalar broadcast marker: size 1
            };
            Col acc = get(op->operand(0));
            bool acc_scalar = !op->operand(0).type().is_tensor();
            for (int i = 1; i < op->num_operands(); ++i) {
              Col rhs = get(op->operand(i));
              bool rhs_scalar = !op->operand(i).type().is_tensor();
              size_t len = std::max(acc.size(), rhs.size());
              Col res(len);
              for (size_t k = 0; k < len; ++k) {
                float a = acc_scalar ? acc[0] : acc[k];
                float b2 = rhs_scalar ? rhs[0] : rhs[k];
                res[k] = add_kind ? a + b2 : (sub_kind ? a - b2 : a * b2);
              }
              acc = std::move(res);
              acc_scalar = acc_scalar && rhs_scalar;
              (void)mul_kind;
            }
            if (acc_scalar)
              scalars[op->result()] = acc[0];
            else
              env[op->result()] = std::move(acc);
          } else if (n == o::stencil_return) {
            const Col& r = env[op->operand(0)];
            for (int64_t z = 0; z < nz_out; ++z)
              out.at({x, y, z}) = r[static_cast<size_t>(z)];
          } else {
            fail(ErrorKind::Verify, "evaluator: unsupported apply op '" + n + "'");
          }
        }
      }
    }
    temps_[apply.result()] = std::move(out);
  }
};

// Rebases a rank-3 grid's z bounds at zero (column coordinates used by the
// distributed form).
inline GridFunction rebase_z(const GridFunction& g) {
  GridFunction h = g;
  h.bounds.dims[2] = {0, g.bounds.extent(2)};
  return h;
}

inline GridMap rebase_all(const GridMap& gs) {
  GridMap out;
  for (auto& [k, v] : gs) out[k] = rebase_z(v);
  return out;
}

} // namespace wsc::test
