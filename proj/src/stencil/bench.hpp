// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ir/ir.hpp"

#include <string>
#include <vector>

namespace wsc::stencil {

// Benchmark kernel generators. Each returns a verified stencil-dialect module
// whose @main loads fields, runs the kernel applies, and stores results back
// into its source fields (in-place step form). Coefficients are fixed rational
// constants; remote-access terms come first in the documented accumulation
// order (W, E, N, S per hop, ascending), then local terms.
//
//   jacobian6    six-point star, radius 1, uniform 1/6 weights, no center
//   diffusion13  13-point star, radius 2 (12 neighbors + center)
//   acoustic13   13-point star, radius 2, two time levels (u, u_prev)
//   seismic25    25-point star, radius 4 (24 neighbors + center)
//   uvkbe        four fields (u, v communicated; h, zs local), two chained applies
std::vector<std::string> benchmark_names();
bool is_benchmark(const std::string& name);

ir::IrModule build_benchmark(const std::string& name, int64_t nx, int64_t ny, int64_t nz);

} // namespace wsc::stencil
