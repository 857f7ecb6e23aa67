// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ir/pass.hpp"

#include <string>

namespace wsc::passes {

// Registers every pass in the pass table. Idempotent.
void register_all();

// Canonical pipeline construction. Group 0 runs the front-end optimizations
// (inlining, varith); groups 1-5 mirror the staged lowering flow.
struct PipelineConfig {
  int64_t topo_x = 1, topo_y = 1;
  int64_t num_chunks = 2;
  int64_t timesteps = 1;
  bool inline_applies = true;  // --no-inline
  bool use_varith = true;      // --no-varith
  bool use_fma = true;         // --no-fma
};

ir::PassPipeline group_pipeline(int group, const PipelineConfig& cfg);

// Wraps an in-place chain module in a timestep loop (iter_args + embed) when
// timesteps != 1. Every stored field must also be loaded.
void wrap_timesteps(ir::IrModule& m, int64_t timesteps);

} // namespace wsc::passes
