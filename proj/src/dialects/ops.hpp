// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ir/ir.hpp"

#include <string>
#include <vector>

namespace wsc::ir::ops {

// func / arith / varith / scf
inline constexpr const char* func_func = "func.func";
inline constexpr const char* func_return = "func.return";
inline constexpr const char* arith_constant = "arith.constant";
inline constexpr const char* arith_addf = "arith.addf";
inline constexpr const char* arith_subf = "arith.subf";
inline constexpr const char* arith_mulf = "arith.mulf";
inline constexpr const char* arith_addi = "arith.addi";
inline constexpr const char* arith_cmpi = "arith.cmpi";
inline constexpr const char* varith_add = "varith.add";
inline constexpr const char* varith_mul = "varith.mul";
inline constexpr const char* scf_for = "scf.for";
inline constexpr const char* scf_yield = "scf.yield";

// stencil / dmp / tensor
inline constexpr const char* stencil_load = "stencil.load";
inline constexpr const char* stencil_store = "stencil.store";
inline constexpr const char* stencil_apply = "stencil.apply";
inline constexpr const char* stencil_access = "stencil.access";
inline constexpr const char* stencil_return = "stencil.return";
inline constexpr const char* stencil_embed = "stencil.embed";
inline constexpr const char* dmp_swap = "dmp.swap";
inline constexpr const char* tensor_extract_slice = "tensor.extract_slice";
inline constexpr const char* tensor_insert_slice = "tensor.insert_slice";

// csl_stencil / csl_wrapper
inline constexpr const char* csl_stencil_apply = "csl_stencil.apply";
inline constexpr const char* csl_stencil_access = "csl_stencil.access";
inline constexpr const char* csl_stencil_yield = "csl_stencil.yield";
inline constexpr const char* csl_wrapper_module = "csl_wrapper.module";
inline constexpr const char* csl_wrapper_bind = "csl_wrapper.bind";
inline constexpr const char* csl_wrapper_import = "csl_wrapper.import";
inline constexpr const char* csl_wrapper_yield = "csl_wrapper.yield";

// memref / dps
inline constexpr const char* memref_global = "memref.global";
inline constexpr const char* memref_get = "memref.get";
inline constexpr const char* memref_subview = "memref.subview";
inline constexpr const char* memref_chunk_window = "memref.chunk_window";
inline constexpr const char* dps_add = "dps.add";
inline constexpr const char* dps_sub = "dps.sub";
inline constexpr const char* dps_mul = "dps.mul";
inline constexpr const char* dps_fmac = "dps.fmac";
inline constexpr const char* dps_mov = "dps.mov";
inline constexpr const char* dps_reduce_add = "dps.reduce_add";

// csl (program + layout)
inline constexpr const char* csl_param = "csl.param";
inline constexpr const char* csl_var = "csl.var";
inline constexpr const char* csl_load_var = "csl.load_var";
inline constexpr const char* csl_store_var = "csl.store_var";
inline constexpr const char* csl_dsd = "csl.dsd";
inline constexpr const char* csl_task = "csl.task";
inline constexpr const char* csl_func = "csl.func";
inline constexpr const char* csl_call = "csl.call";
inline constexpr const char* csl_activate = "csl.activate";
inline constexpr const char* csl_cond = "csl.cond";
inline constexpr const char* csl_end = "csl.end";
inline constexpr const char* csl_fadds = "csl.fadds";
inline constexpr const char* csl_fsubs = "csl.fsubs";
inline constexpr const char* csl_fmuls = "csl.fmuls";
inline constexpr const char* csl_fmovs = "csl.fmovs";
inline constexpr const char* csl_fmacs = "csl.fmacs";
inline constexpr const char* csl_reduce_fadds = "csl.reduce_fadds";
inline constexpr const char* csl_swap_dsds = "csl.swap_dsds";
inline constexpr const char* csl_swap_buffers = "csl.swap_buffers";
inline constexpr const char* csl_advance_dsd = "csl.advance_dsd";
inline constexpr const char* csl_reset_dsd = "csl.reset_dsd";
inline constexpr const char* csl_comms_exchange = "csl.comms_exchange";
inline constexpr const char* csl_layout = "csl.layout";
inline constexpr const char* csl_bind = "csl.bind";
inline constexpr const char* csl_route = "csl.route";
inline constexpr const char* csl_place = "csl.place";
inline constexpr const char* csl_result = "csl.result";

bool is_stencil_arith(const std::string& name); // body ops allowed in stencil.apply
bool is_dps_compute(const std::string& name);

// One receive-buffer row of a csl_stencil.apply / comms session: data arriving
// from the neighbor `hops` steps along unit direction (dx, dy) for communicated
// operand `operand`. Slot order is the documented accumulation order: operands
// in apply order, directions W, E, N, S, hops ascending.
struct Slot {
  int64_t operand; // index into the apply's operands
  int64_t dx, dy;  // unit direction of the data source relative to the receiver
  int64_t hops;    // 1..width
};

// Directions in fixed W, E, N, S order.
inline const std::vector<std::pair<int64_t, int64_t>>& dir_order() {
  static const std::vector<std::pair<int64_t, int64_t>> dirs = {
      {-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  return dirs;
}
int dir_index(int64_t dx, int64_t dy); // -1 if not a unit cardinal direction

// Derives the slot table from a swaps attribute (array of SwapAttr).
std::vector<Slot> slot_table(const std::vector<Attribute>& swaps);
// Row index of (operand, dx*hops, dy*hops) in the slot table, -1 if absent.
int slot_index(const std::vector<Slot>& slots, int64_t operand, int64_t off_x, int64_t off_y);

} // namespace wsc::ir::ops
