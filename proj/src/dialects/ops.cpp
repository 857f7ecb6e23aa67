// SPDX-License-Identifier: Apache-2.0
#include "dialects/ops.hpp"

#include "ir/registry.hpp"

#include <set>

namespace wsc::ir {

namespace {

using namespace ops;

void check_counts(const Operation& op, int nops, int nres) {
  expect(op, op.num_operands() == nops,
         "expects " + std::to_string(nops) + " operands, got " + std::to_string(op.num_operands()));
  expect(op, op.num_results() == nres,
         "expects " + std::to_string(nres) + " results, got " + std::to_string(op.num_results()));
}

bool same_shape(const Type& a, const Type& b) { return a == b; }

// Result/operand typing for rank-polymorphic f32 arithmetic: all f32, or at
// least one tensor with every tensor operand of identical shape and scalars
// broadcast.
void verify_elementwise(const Operation& op) {
  expect(op, op.num_results() == 1, "expects one result");
  Type res = op.result_type();
  Type tensor_ty;
  for (int i = 0; i < op.num_operands(); ++i) {
    Type t = op.operand(i).type();
    if (t.is_tensor()) {
      if (tensor_ty.valid())
        expect(op, same_shape(t, tensor_ty), "mismatched tensor operand shapes");
      else
        tensor_ty = t;
    } else {
      expect(op, t.is_f32(), "operands must be f32 or tensors of f32");
    }
  }
  if (tensor_ty.valid())
    expect(op, res == tensor_ty, "result type must match tensor operand shape");
  else
    expect(op, res.is_f32(), "scalar arithmetic must produce f32");
}

void register_func_arith() {
  auto& reg = Registry::instance();
  reg.add({func_func, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             expect(op, op.num_regions() == 1, "expects one region");
             auto* fty = op.attr_req("function_type").as<TypeAttr>();
             expect(op, fty && fty->type.as<FuncTy>(), "function_type must be a function type");
             const auto& sig = *fty->type.as<FuncTy>();
             expect(op, !op.region(0).empty(), "body required");
             expect(op, op.region(0).front().arg_types() == sig.inputs,
                    "entry block arguments must match the function signature");
           }});
  reg.add({func_return, true, true, nullptr});
  reg.add({arith_constant, false, true, [](const Operation& op) {
             check_counts(op, 0, 1);
             const Attribute v = op.attr_req("value");
             Type t = op.result_type();
             if (v.as<FloatAttr>()) expect(op, t.is_f32(), "float constant must be f32");
             else if (auto* s = v.as<SplatAttr>())
               expect(op, t.is_tensor() && *t.as<TensorTy>() == s->type,
                      "splat constant type mismatch");
             else if (auto* i = v.as<IntAttr>())
               expect(op, t.is_scalar(i->kind), "integer constant kind mismatch");
             else
               verify_fail(op, "unsupported constant kind");
           }});
  for (const char* n : {arith_addf, arith_subf, arith_mulf})
    reg.add({n, false, true, [](const Operation& op) {
               check_counts(op, 2, 1);
               verify_elementwise(op);
             }});
  reg.add({arith_addi, false, true, [](const Operation& op) {
             check_counts(op, 2, 1);
             expect(op, op.operand(0).type() == op.operand(1).type() &&
                        op.result_type() == op.operand(0).type(),
                    "integer op requires uniform types");
           }});
  reg.add({arith_cmpi, false, true, [](const Operation& op) {
             check_counts(op, 2, 1);
             static const std::set<std::string> preds = {"eq", "ne", "slt", "sle", "sgt", "sge"};
             expect(op, preds.count(op.str_attr("predicate")) != 0, "unknown predicate");
             expect(op, op.operand(0).type() == op.operand(1).type(), "operand types differ");
             expect(op, op.result_type().is_scalar(ScalarKind::I1), "result must be i1");
           }});
  for (const char* n : {varith_add, varith_mul})
    reg.add({n, false, true, [](const Operation& op) {
               expect(op, op.num_operands() >= 2, "variadic arithmetic needs >= 2 operands");
               verify_elementwise(op);
             }});
  reg.add({scf_for, false, true, [](const Operation& op) {
             expect(op, op.num_operands() >= 3, "needs lb, ub, step");
             for (int i = 0; i < 3; ++i)
               expect(op, op.operand(i).type().is_index(), "loop bounds must be index");
             int n_iter = op.num_operands() - 3;
             expect(op, op.num_results() == n_iter, "one result per iter arg");
             expect(op, op.num_regions() == 1 && !op.region(0).empty(), "body required");
             const Block& b = op.region(0).front();
             expect(op, b.num_args() == n_iter + 1, "body takes induction var + iter args");
             expect(op, b.arg_type(0).is_index(), "induction variable must be index");
             for (int i = 0; i < n_iter; ++i) {
               expect(op, b.arg_type(i + 1) == op.operand(3 + i).type(),
                      "iter arg type mismatch");
               expect(op, op.result_type(i) == op.operand(3 + i).type(),
                      "result type mismatch");
             }
           }});
  reg.add({scf_yield, true, true, nullptr});
}

void register_stencil() {
  auto& reg = Registry::instance();
  reg.add({stencil_load, false, true, [](const Operation& op) {
             check_counts(op, 1, 1);
             auto* f = op.operand(0).type().as<FieldTy>();
             auto* t = op.result_type().as<TempTy>();
             expect(op, f && t, "load converts a field to a temp");
             expect(op, f->bounds == t->bounds && f->z_tensor == t->z_tensor,
                    "load must preserve bounds");
           }});
  reg.add({stencil_store, false, true, [](const Operation& op) {
             check_counts(op, 2, 0);
             auto* t = op.operand(0).type().as<TempTy>();
             auto* f = op.operand(1).type().as<FieldTy>();
             expect(op, t && f, "store writes a temp into a field");
             expect(op, t->bounds == f->bounds && t->z_tensor == f->z_tensor,
                    "store bounds mismatch");
           }});
  reg.add({stencil_apply, false, true, [](const Operation& op) {
             expect(op, op.num_regions() == 1 && !op.region(0).empty(), "body required");
             expect(op, op.num_results() >= 1, "apply produces at least one temp");
             for (int i = 0; i < op.num_results(); ++i)
               expect(op, op.result_type(i).is_temp(), "apply results are temps");
             const Block& b = op.region(0).front();
             expect(op, b.num_args() == op.num_operands(),
                    "one block argument per apply operand");
             for (int i = 0; i < op.num_operands(); ++i) {
               expect(op, op.operand(i).type().is_temp(), "apply operands are temps");
               expect(op, b.arg_type(i) == op.operand(i).type(),
                      "block argument type must match operand");
             }
           }});
  reg.add({stencil_access, false, true, [](const Operation& op) {
             check_counts(op, 1, 1);
             auto* t = op.operand(0).type().as<TempTy>();
             expect(op, t != nullptr, "access reads a temp");
             auto off = op.attr_req("offset").as_int_array();
             expect(op, static_cast<int>(off.size()) == t->bounds.rank(),
                    "offset rank must match temp rank");
             if (t->z_tensor > 0)
               expect(op, op.result_type().is_tensor() &&
                          op.result_type().as<TensorTy>()->shape ==
                              std::vector<int64_t>{t->z_tensor},
                      "tensorized access yields the full column tensor");
             else
               expect(op, op.result_type().is_f32(), "access yields f32");
           }});
  reg.add({stencil_return, true, true, nullptr});
  reg.add({stencil_embed, false, true, [](const Operation& op) {
             check_counts(op, 2, 1);
             auto* inner = op.operand(0).type().as<TempTy>();
             auto* outer = op.operand(1).type().as<TempTy>();
             expect(op, inner && outer, "embed splices temp into temp");
             expect(op, op.result_type() == op.operand(1).type(),
                    "embed result has the outer type");
             expect(op, inner->bounds.rank() == outer->bounds.rank(), "rank mismatch");
             for (int d = 0; d < inner->bounds.rank(); ++d)
               expect(op, inner->bounds.lb(d) >= outer->bounds.lb(d) &&
                          inner->bounds.ub(d) <= outer->bounds.ub(d),
                      "interior bounds must lie inside the outer bounds");
           }});
  reg.add({dmp_swap, false, true, [](const Operation& op) {
             expect(op, op.num_operands() == op.num_results(), "one result per operand");
             for (int i = 0; i < op.num_operands(); ++i)
               expect(op, op.operand(i).type() == op.result_type(i),
                      "swap preserves types");
             op.attr_req("topo");
             for (auto& s : op.attr_req("swaps").as_array()) {
               auto* sw = s.as<SwapAttr>();
               expect(op, sw != nullptr, "swaps entries must be #dmp.swap attributes");
               expect(op, sw->operand >= 0 && sw->operand < op.num_operands(),
                      "swap operand index out of range");
               expect(op, ops::dir_index(sw->dx, sw->dy) >= 0,
                      "swap direction must be a cardinal unit vector");
             }
           }});
  reg.add({tensor_extract_slice, false, true, [](const Operation& op) {
             check_counts(op, 1, 1);
             auto* src = op.operand(0).type().as<TensorTy>();
             auto* dst = op.result_type().as<TensorTy>();
             expect(op, src && dst && src->shape.size() == 1 && dst->shape.size() == 1,
                    "extract_slice works on rank-1 tensors");
             int64_t off = op.int_attr("offset");
             int64_t size = op.int_attr("size");
             expect(op, dst->shape[0] == size, "result extent must equal size");
             expect(op, off >= 0 && off + size <= src->shape[0], "slice out of bounds");
           }});
  reg.add({tensor_insert_slice, false, true, [](const Operation& op) {
             expect(op, op.num_operands() == 2 || op.num_operands() == 3,
                    "expects (small, big[, offset])");
             expect(op, op.num_results() == 1, "expects one result");
             auto* small = op.operand(0).type().as<TensorTy>();
             auto* big = op.operand(1).type().as<TensorTy>();
             expect(op, small && big && small->shape.size() == 1 && big->shape.size() == 1,
                    "insert_slice works on rank-1 tensors");
             expect(op, op.result_type() == op.operand(1).type(),
                    "result has the destination type");
             if (op.num_operands() == 3)
               expect(op, op.operand(2).type().is_index(), "dynamic offset must be index");
             else
               expect(op, op.has_attr("offset"), "static insert needs an offset attribute");
           }});
}

void register_csl_stencil() {
  auto& reg = Registry::instance();
  reg.add({csl_stencil_apply, false, true, [](const Operation& op) {
             expect(op, op.num_regions() == 2, "expects chunk and done regions");
             expect(op, op.num_results() == 1, "produces one temp");
             expect(op, op.num_operands() >= 2, "expects operands + accumulator init");
             Type acc_ty = op.operand(op.num_operands() - 1).type();
             expect(op, acc_ty.is_tensor(), "last operand is the accumulator initializer");
             int64_t chunks = op.int_attr("num_chunks");
             expect(op, chunks >= 1, "num_chunks must be positive");
             int64_t zb = op.int_attr("z_begin"), ze = op.int_attr("z_end");
             expect(op, ze >= zb, "empty or negative z-range");
             int64_t zex = ze - zb;
             expect(op, zex % chunks == 0,
                    "exchanged z-range (" + std::to_string(zex) +
                        ") must be divisible by num_chunks (" + std::to_string(chunks) + ")");
             auto slots = ops::slot_table(op.attr_req("swaps").as_array());
             const Block& chunk = op.region(0).front();
             const Block& done = op.region(1).front();
             if (!slots.empty()) {
               expect(op, chunk.num_args() == 3,
                      "chunk region takes (recv, offset, accumulator)");
               auto* recv = chunk.arg_type(0).as<TensorTy>();
               expect(op, recv && recv->shape.size() == 2 &&
                          recv->shape[0] == static_cast<int64_t>(slots.size()) &&
                          recv->shape[1] == zex / chunks,
                      "recv tensor must be slots x chunk_len");
               expect(op, chunk.arg_type(1).is_index(), "chunk offset must be index");
               expect(op, chunk.arg_type(2) == acc_ty, "accumulator type mismatch");
             }
             expect(op, done.num_args() == op.num_operands(),
                    "done region takes operand columns + accumulator");
             expect(op, done.arg_type(done.num_args() - 1) == acc_ty,
                    "done region accumulator type mismatch");
           }});
  reg.add({csl_stencil_access, false, true, [](const Operation& op) {
             check_counts(op, 1, 1);
             auto* src = op.operand(0).type().as<TensorTy>();
             expect(op, src && src->shape.size() == 2, "access reads the recv buffer");
             auto off = op.attr_req("offset").as_int_array();
             expect(op, off.size() == 2, "offset must be [dx, dy]");
             auto* res = op.result_type().as<TensorTy>();
             expect(op, res && res->shape == std::vector<int64_t>{src->shape[1]},
                    "access yields one chunk row");
           }});
  reg.add({csl_stencil_yield, true, true, nullptr});
  reg.add({csl_wrapper_module, false, false, [](const Operation& op) {
             check_counts(op, 0, 0);
             expect(op, op.num_regions() == 2, "expects layout and program regions");
             op.attr_req("params");
             op.attr_req("topo");
             const Block& layout = op.region(0).front();
             expect(op, layout.num_args() == 2 && layout.arg_type(0).is_index() &&
                        layout.arg_type(1).is_index(),
                    "layout region takes (x, y) indices");
             expect(op, !layout.empty() && layout.back().name() == csl_wrapper_yield,
                    "layout region must end with csl_wrapper.yield");
           }});
  reg.add({csl_wrapper_bind, false, true, [](const Operation& op) {
             check_counts(op, 1, 0);
             op.attr_req("param");
           }});
  reg.add({csl_wrapper_import, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("module");
           }});
  reg.add({csl_wrapper_yield, true, true, nullptr});
}

void register_memref_dps() {
  auto& reg = Registry::instance();
  reg.add({memref_global, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("sym_name");
             expect(op, op.int_attr("size") >= 1, "size must be positive");
           }});
  reg.add({memref_get, false, true, [](const Operation& op) {
             check_counts(op, 0, 1);
             op.attr_req("name");
             expect(op, op.result_type().is_memref(), "result must be a memref");
           }});
  reg.add({memref_subview, false, true, [](const Operation& op) {
             check_counts(op, 1, 1);
             auto* src = op.operand(0).type().as<MemRefTy>();
             auto* dst = op.result_type().as<MemRefTy>();
             expect(op, src && dst, "subview works on memrefs");
             int64_t off = op.int_attr("offset");
             expect(op, dst->extent == op.int_attr("size"), "size mismatch");
             expect(op, off >= 0 && off + dst->extent <= src->extent, "subview out of bounds");
           }});
  reg.add({memref_chunk_window, false, true, [](const Operation& op) {
             check_counts(op, 2, 1);
             expect(op, op.operand(0).type().is_memref() && op.operand(1).type().is_index(),
                    "expects (memref, index)");
             auto* dst = op.result_type().as<MemRefTy>();
             expect(op, dst && dst->extent == op.int_attr("size"), "size mismatch");
           }});
  auto binary_dps = [](const Operation& op) {
    check_counts(op, 3, 0);
    auto* dst = op.operand(2).type().as<MemRefTy>();
    expect(op, dst != nullptr, "destination must be a memref");
    for (int i = 0; i < 2; ++i) {
      Type t = op.operand(i).type();
      if (auto* m = t.as<MemRefTy>())
        expect(op, m->extent == dst->extent, "operand extent mismatch");
      else
        expect(op, t.is_f32(), "operands are memrefs or f32 scalars");
    }
  };
  for (const char* n : {dps_add, dps_sub, dps_mul}) reg.add({n, false, true, binary_dps});
  reg.add({dps_fmac, false, true, [](const Operation& op) {
             check_counts(op, 3, 0);
             op.attr_req("scale");
             auto* a = op.operand(0).type().as<MemRefTy>();
             auto* b = op.operand(1).type().as<MemRefTy>();
             auto* d = op.operand(2).type().as<MemRefTy>();
             expect(op, a && b && d && a->extent == d->extent && b->extent == d->extent,
                    "fmac operands must be memrefs of equal extent");
           }});
  reg.add({dps_mov, false, true, [](const Operation& op) {
             check_counts(op, 2, 0);
             auto* d = op.operand(1).type().as<MemRefTy>();
             expect(op, d != nullptr, "destination must be a memref");
             Type src = op.operand(0).type();
             if (auto* m = src.as<MemRefTy>())
               expect(op, m->extent == d->extent, "mov extent mismatch");
             else
               expect(op, src.is_f32(), "mov source is a memref or f32");
           }});
  reg.add({dps_reduce_add, false, true, [](const Operation& op) {
             check_counts(op, 2, 0);
             auto* s = op.operand(0).type().as<MemRefTy>();
             auto* d = op.operand(1).type().as<MemRefTy>();
             int64_t reps = op.int_attr("reps");
             expect(op, s && d && reps >= 1 && s->extent == reps * d->extent,
                    "source extent must be reps x destination extent");
           }});
}

void register_csl() {
  auto& reg = Registry::instance();
  auto no_verify = [](const char* n, bool term = false) {
    return OpInfo{n, term, true, nullptr};
  };
  reg.add(no_verify(csl_end, true));
  reg.add({csl_param, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("sym_name");
             op.attr_req("type");
           }});
  reg.add({csl_var, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("sym_name");
             op.attr_req("init");
           }});
  reg.add({csl_load_var, false, true, [](const Operation& op) {
             check_counts(op, 0, 1);
             op.attr_req("var");
             expect(op, op.result_type().is_scalar(ScalarKind::I32), "vars are i32");
           }});
  reg.add({csl_store_var, false, true, [](const Operation& op) {
             check_counts(op, 1, 0);
             op.attr_req("var");
           }});
  reg.add({csl_dsd, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("sym_name");
             op.attr_req("base");
             expect(op, op.int_attr("length") >= 1, "length must be >= 1");
             expect(op, op.int_attr("stride") >= 1, "negative or zero strides unsupported");
             expect(op, op.int_attr("offset") >= 0, "offset must be non-negative");
           }});
  reg.add({csl_task, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("sym_name");
             const std::string& k = op.str_attr("kind");
             expect(op, k == "data" || k == "local" || k == "control", "unknown task kind");
             if (k == "data" || k == "control") {
               int64_t c = op.int_attr("color");
               expect(op, c >= 0 && c < 24, "color out of range 0..23");
             }
             expect(op, op.num_regions() == 1, "task has one body region");
           }});
  reg.add({csl_func, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("sym_name");
             expect(op, op.num_regions() == 1, "function has one body region");
           }});
  reg.add({csl_call, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("callee");
           }});
  reg.add({csl_activate, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("task");
           }});
  reg.add({csl_cond, false, true, [](const Operation& op) {
             check_counts(op, 1, 0);
             expect(op, op.operand(0).type().is_scalar(ScalarKind::I1), "condition must be i1");
             expect(op, op.num_regions() == 2, "expects then and else regions");
           }});
  auto builtin2 = [](const Operation& op) {
    check_counts(op, 0, 0);
    op.attr_req("dest");
    op.attr_req("a");
    op.attr_req("b");
  };
  for (const char* n : {csl_fadds, csl_fsubs, csl_fmuls}) reg.add({n, false, true, builtin2});
  reg.add({csl_fmovs, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("dest");
             op.attr_req("src");
           }});
  reg.add({csl_fmacs, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("dest");
             op.attr_req("a");
             op.attr_req("b");
             op.attr_req("scale");
           }});
  reg.add({csl_reduce_fadds, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("dest");
             op.attr_req("src");
             expect(op, op.int_attr("reps") >= 1, "reps must be >= 1");
           }});
  reg.add({csl_swap_dsds, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("a");
             op.attr_req("b");
           }});
  reg.add({csl_swap_buffers, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("a");
             op.attr_req("b");
           }});
  reg.add({csl_advance_dsd, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("dsd");
             op.attr_req("by");
           }});
  reg.add({csl_reset_dsd, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("dsd");
           }});
  reg.add({csl_comms_exchange, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("chunk_task");
             op.attr_req("done_task");
             op.attr_req("fields");
             expect(op, op.int_attr("num_chunks") >= 1, "num_chunks must be positive");
           }});
  reg.add({csl_layout, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("topo");
             expect(op, op.num_regions() == 1 && !op.region(0).empty(), "body required");
             const Block& b = op.region(0).front();
             expect(op, b.num_args() == 2, "layout body takes (x, y)");
           }});
  reg.add({csl_bind, false, true, [](const Operation& op) {
             check_counts(op, 1, 0);
             op.attr_req("name");
           }});
  reg.add({csl_route, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             int64_t c = op.int_attr("color");
             expect(op, c >= 0 && c < 24, "color out of range 0..23");
             op.attr_req("in");
             op.attr_req("out");
           }});
  reg.add(no_verify(csl_place));
  reg.add({csl_result, false, true, [](const Operation& op) {
             check_counts(op, 0, 0);
             op.attr_req("field");
             op.attr_req("dsd");
           }});
}

} // namespace

void register_dialects() {
  static bool done = [] {
    register_func_arith();
    register_stencil();
    register_csl_stencil();
    register_memref_dps();
    register_csl();
    return true;
  }();
  (void)done;
}

namespace ops {

bool is_stencil_arith(const std::string& name) {
  return name == arith_constant || name == arith_addf || name == arith_subf ||
         name == arith_mulf || name == varith_add || name == varith_mul ||
         name == tensor_extract_slice;
}

bool is_dps_compute(const std::string& name) {
  return name == dps_add || name == dps_sub || name == dps_mul || name == dps_fmac ||
         name == dps_mov || name == dps_reduce_add;
}

int dir_index(int64_t dx, int64_t dy) {
  const auto& dirs = dir_order();
  for (size_t i = 0; i < dirs.size(); ++i)
    if (dirs[i].first == dx && dirs[i].second == dy) return static_cast<int>(i);
  return -1;
}

std::vector<Slot> slot_table(const std::vector<Attribute>& swaps) {
  std::vector<Slot> slots;
  // operand order first, then W,E,N,S, then hop distance
  std::set<int64_t> operands;
  for (auto& a : swaps)
    if (auto* s = a.as<SwapAttr>()) operands.insert(s->operand);
  for (int64_t operand : operands) {
    for (auto& [dx, dy] : dir_order()) {
      for (auto& a : swaps) {
        auto* s = a.as<SwapAttr>();
        if (!s || s->operand != operand || s->dx != dx || s->dy != dy) continue;
        for (int64_t h = 1; h <= s->width; ++h) slots.push_back(Slot{operand, dx, dy, h});
      }
    }
  }
  return slots;
}

int slot_index(const std::vector<Slot>& slots, int64_t operand, int64_t off_x, int64_t off_y) {
  for (size_t i = 0; i < slots.size(); ++i) {
    const Slot& s = slots[i];
    if (s.operand == operand && s.dx * s.hops == off_x && s.dy * s.hops == off_y)
      return static_cast<int>(i);
  }
  return -1;
}

} // namespace ops

} // namespace wsc::ir
