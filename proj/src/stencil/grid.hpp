// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ir/type.hpp"
#include "support/diag.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace wsc::stencil {

using ir::Bounds;

// Dense f32 grid over closed-open bounds, row-major with the last dimension
// fastest (lexicographic index order).
struct GridFunction {
  Bounds bounds;
  std::vector<float> data;

  GridFunction() = default;
  explicit GridFunction(Bounds b) : bounds(std::move(b)), data(static_cast<size_t>(bounds.cells()), 0.0f) {}

  size_t flat(const std::vector<int64_t>& idx) const {
    size_t f = 0;
    for (int d = 0; d < bounds.rank(); ++d)
      f = f * static_cast<size_t>(bounds.extent(d)) + static_cast<size_t>(idx[d] - bounds.lb(d));
    return f;
  }
  float at(const std::vector<int64_t>& idx) const { return data[flat(idx)]; }
  float& at(const std::vector<int64_t>& idx) { return data[flat(idx)]; }

  bool same_shape(const GridFunction& o) const { return bounds == o.bounds; }
};

using GridMap = std::map<std::string, GridFunction>;

// Deterministic, seed-free input data: exactly representable f32 values from a
// small integer formula, so every platform and run agrees bit-for-bit.
float input_value(int64_t x, int64_t y, int64_t z, int64_t salt);
GridFunction make_input(const Bounds& b, int64_t salt);

// Flat binary format: magic "WSG1", u32 rank, {i64 lb, i64 ub} per dim,
// then f32 little-endian cell data.
void write_grid(const std::string& path, const GridFunction& g);
GridFunction read_grid(const std::string& path);

// CSV (for small grids): one "i,j,...,value" row per cell.
void write_grid_csv(const std::string& path, const GridFunction& g);

struct ErrorStats {
  double max_abs = 0.0;
  double max_rel = 0.0;
  bool bit_exact = true;
};
// Compares over `region` (must lie inside both grids' bounds).
ErrorStats compare_grids(const GridFunction& a, const GridFunction& b, const Bounds& region);

} // namespace wsc::stencil
