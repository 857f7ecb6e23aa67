// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ir/ir.hpp"
#include "stencil/grid.hpp"

#include <map>
#include <string>

namespace wsc::stencil {

// Checks that every access stays inside its operand's bounds for every output
// index and that apply bodies are side-effect-free arithmetic over accesses
// and constants. Throws on violation.
void verify_stencil(const ir::IrModule& m);

// Sequential reference semantics: executes @main cell by cell in lexicographic
// index order, arithmetic in IR operand order, strict binary32. Loads snapshot
// fields at step start; stores commit at step end; `timesteps` repetitions.
// Modules carrying their own scf.for timestep loop run it as written (then
// `timesteps` must equal the loop's trip count).
GridMap interpret_stencil(const ir::IrModule& m, const GridMap& inputs, int64_t timesteps);

// Field names of @main's arguments (the "field_names" attribute).
std::vector<std::string> field_names(const ir::IrModule& m);

// Bounds of each @main argument field, by name.
std::map<std::string, Bounds> field_bounds(const ir::IrModule& m);

// For every stored field: the interior region actually computed by the final
// apply (excluding halo cells preserved from the input).
std::map<std::string, Bounds> output_interiors(const ir::IrModule& m);

// Deterministic inputs for every field (salt = argument index).
GridMap make_inputs(const ir::IrModule& m);

} // namespace wsc::stencil
