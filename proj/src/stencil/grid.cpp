// SPDX-License-Identifier: Apache-2.0
#include "stencil/grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace wsc::stencil {

float input_value(int64_t x, int64_t y, int64_t z, int64_t salt) {
  int64_t h = x * 13 + y * 7 + z * 3 + salt * 11;
  int64_t m = ((h % 17) + 17) % 17; // 0..16
  return static_cast<float>(m - 8) * 0.0625f;
}

GridFunction make_input(const Bounds& b, int64_t salt) {
  GridFunction g(b);
  std::vector<int64_t> idx(static_cast<size_t>(b.rank()));
  size_t f = 0;
  for (int d = 0; d < b.rank(); ++d) idx[static_cast<size_t>(d)] = b.lb(d);
  while (true) {
    int64_t x = idx[0];
    int64_t y = b.rank() > 1 ? idx[1] : 0;
    int64_t z = b.rank() > 2 ? idx[2] : 0;
    g.data[f++] = input_value(x, y, z, salt);
    int d = b.rank() - 1;
    while (d >= 0) {
      if (++idx[static_cast<size_t>(d)] < b.ub(d)) break;
      idx[static_cast<size_t>(d)] = b.lb(d);
      --d;
    }
    if (d < 0) break;
  }
  return g;
}

namespace {
template <typename T> void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <typename T> T get(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) fail(ErrorKind::Io, "truncated grid file");
  return v;
}
} // namespace

void write_grid(const std::string& path, const GridFunction& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write grid file: " + path);
  out.write("WSG1", 4);
  put<uint32_t>(out, static_cast<uint32_t>(g.bounds.rank()));
  for (auto& [lb, ub] : g.bounds.dims) {
    put<int64_t>(out, lb);
    put<int64_t>(out, ub);
  }
  out.write(reinterpret_cast<const char*>(g.data.data()),
            static_cast<std::streamsize>(g.data.size() * sizeof(float)));
}

GridFunction read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open grid file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "WSG1", 4) != 0)
    fail(ErrorKind::Io, "not a grid file: " + path);
  uint32_t rank = get<uint32_t>(in);
  if (rank < 1 || rank > 3) fail(ErrorKind::Io, "grid rank out of range");
  Bounds b;
  for (uint32_t d = 0; d < rank; ++d) {
    int64_t lb = get<int64_t>(in);
    int64_t ub = get<int64_t>(in);
    if (lb >= ub) fail(ErrorKind::Io, "invalid grid bounds");
    b.dims.emplace_back(lb, ub);
  }
  GridFunction g(b);
  in.read(reinterpret_cast<char*>(g.data.data()),
          static_cast<std::streamsize>(g.data.size() * sizeof(float)));
  if (!in) fail(ErrorKind::Io, "truncated grid file: " + path);
  return g;
}

void write_grid_csv(const std::string& path, const GridFunction& g) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write csv file: " + path);
  const Bounds& b = g.bounds;
  for (int d = 0; d < b.rank(); ++d) out << "i" << d << ",";
  out << "value\n";
  std::vector<int64_t> idx;
  for (int d = 0; d < b.rank(); ++d) idx.push_back(b.lb(d));
  size_t f = 0;
  while (true) {
    for (auto v : idx) out << v << ",";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(g.data[f++]));
    out << buf << "\n";
    int d = b.rank() - 1;
    while (d >= 0) {
      if (++idx[static_cast<size_t>(d)] < b.ub(d)) break;
      idx[static_cast<size_t>(d)] = b.lb(d);
      --d;
    }
    if (d < 0) break;
  }
}

ErrorStats compare_grids(const GridFunction& a, const GridFunction& b, const Bounds& region) {
  ErrorStats st;
  std::vector<int64_t> idx;
  for (int d = 0; d < region.rank(); ++d) idx.push_back(region.lb(d));
  while (true) {
    float va = a.at(idx), vb = b.at(idx);
    if (std::memcmp(&va, &vb, 4) != 0) st.bit_exact = false;
    double abs = std::fabs(static_cast<double>(va) - static_cast<double>(vb));
    double den = std::max(1e-20, static_cast<double>(std::fabs(vb)));
    st.max_abs = std::max(st.max_abs, abs);
    st.max_rel = std::max(st.max_rel, abs / den);
    int d = region.rank() - 1;
    while (d >= 0) {
      if (++idx[static_cast<size_t>(d)] < region.ub(d)) break;
      idx[static_cast<size_t>(d)] = region.lb(d);
      --d;
    }
    if (d < 0) break;
  }
  return st;
}

} // namespace wsc::stencil
