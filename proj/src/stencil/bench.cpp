// SPDX-License-Identifier: Apache-2.0
#include "stencil/bench.hpp"

#include "dialects/ops.hpp"
#include "ir/registry.hpp"
#include "stencil/oracle.hpp"

#include <algorithm>
#include <map>

namespace wsc::stencil {

using namespace ir;

namespace {

struct Term {
  int field;               // index into the apply's operand list
  int64_t dx, dy, dz;
  float coef = 1.0f;
  bool scaled = true;      // false: the raw access is a term (no multiply)
};

struct ApplySpec {
  std::vector<int> operands;    // field indices (or kTempRef for the previous apply's result)
  std::vector<Term> terms;      // term.field indexes into `operands`
};

constexpr int kTempRef = -1;

struct BenchSpec {
  std::vector<std::string> fields;
  std::vector<ApplySpec> applies;
  // in-place stores: pairs of (stored value source, field index).
  // Source -2 means the final apply result (embedded); source >= 0 means the
  // loaded temp of that field (two-level time schemes copy u into u_prev).
  std::vector<std::pair<int, int>> stores;
};

// Per-field halo from every access touching it, across all applies.
struct Halo {
  int64_t xm = 0, xp = 0, ym = 0, yp = 0, zm = 0, zp = 0;
};

IrModule build_from_spec(const BenchSpec& spec, int64_t nx, int64_t ny, int64_t nz) {
  std::map<int, Halo> halos;
  for (auto& ap : spec.applies) {
    for (auto& t : ap.terms) {
      int f = ap.operands[static_cast<size_t>(t.field)];
      if (f == kTempRef) continue;
      Halo& h = halos[f];
      h.xm = std::max(h.xm, -t.dx);
      h.xp = std::max(h.xp, t.dx);
      h.ym = std::max(h.ym, -t.dy);
      h.yp = std::max(h.yp, t.dy);
      h.zm = std::max(h.zm, -t.dz);
      h.zp = std::max(h.zp, t.dz);
    }
  }
  // Fields written by a copy-store share bounds with their source field.
  Bounds out_b{{{0, nx}, {0, ny}, {0, nz}}};
  std::vector<Bounds> fb(spec.fields.size(), out_b);
  for (size_t f = 0; f < spec.fields.size(); ++f) {
    Halo h = halos.count(static_cast<int>(f)) ? halos[static_cast<int>(f)] : Halo{};
    fb[f] = Bounds{{{-h.xm, nx + h.xp}, {-h.ym, ny + h.yp}, {-h.zm, nz + h.zp}}};
  }
  for (auto& [src, dst] : spec.stores)
    if (src >= 0) fb[static_cast<size_t>(dst)] = fb[static_cast<size_t>(src)];

  IrModule m;
  std::vector<Type> field_tys, temp_tys;
  std::vector<Attribute> names;
  for (size_t f = 0; f < spec.fields.size(); ++f) {
    field_tys.push_back(Type::field(fb[f]));
    temp_tys.push_back(Type::temp(fb[f]));
    names.push_back(Attribute::str(spec.fields[f]));
  }
  auto& fn = m.block().append(
      make_op(ops::func_func, {}, {},
              {{"sym_name", Attribute::str("main")},
               {"field_names", Attribute::array(names)},
               {"function_type", Attribute::type(Type::func(field_tys, {}))}},
              1));
  Block& body = fn.region(0).add_block(field_tys);
  OpBuilder b(body);

  std::vector<Value> loaded;
  for (size_t f = 0; f < spec.fields.size(); ++f)
    loaded.push_back(b.create(ops::stencil_load, {body.arg(static_cast<int>(f))},
                              {temp_tys[f]})
                         .result());

  Value prev_result; // previous apply's result temp
  for (auto& ap : spec.applies) {
    std::vector<Value> operands;
    std::vector<Type> arg_tys;
    for (int f : ap.operands) {
      Value v = f == kTempRef ? prev_result : loaded[static_cast<size_t>(f)];
      operands.push_back(v);
      arg_tys.push_back(v.type());
    }
    auto& apply = b.create(ops::stencil_apply, operands, {Type::temp(out_b)}, {}, 1);
    Block& ab = apply.region(0).add_block(arg_tys);
    OpBuilder ib(ab);
    // Accesses are CSE'd so a repeated plain term repeats the same value.
    std::map<std::tuple<int, int64_t, int64_t, int64_t>, Value> access_cache;
    auto access_of = [&](const Term& t) {
      auto key = std::make_tuple(t.field, t.dx, t.dy, t.dz);
      auto it = access_cache.find(key);
      if (it != access_cache.end()) return it->second;
      Value v = ib.create(ops::stencil_access, {ab.arg(t.field)}, {Type::f32()},
                          {{"offset", Attribute::array_i64({t.dx, t.dy, t.dz})}})
                    .result();
      access_cache[key] = v;
      return v;
    };
    Value sum;
    for (auto& t : ap.terms) {
      Value acc = access_of(t);
      Value term = acc;
      if (t.scaled) {
        Value c = ib.const_f32(t.coef);
        term = ib.create(ops::arith_mulf, {acc, c}, {Type::f32()}).result();
      }
      sum = sum.valid() ? ib.create(ops::arith_addf, {sum, term}, {Type::f32()}).result()
                        : term;
    }
    ib.create(ops::stencil_return, {sum}, {});
    prev_result = apply.result();
  }

  for (auto& [src, dst] : spec.stores) {
    Value stored;
    if (src == -2) {
      stored = b.create(ops::stencil_embed,
                        {prev_result, loaded[static_cast<size_t>(dst)]},
                        {temp_tys[static_cast<size_t>(dst)]})
                   .result();
    } else {
      stored = loaded[static_cast<size_t>(src)];
    }
    b.create(ops::stencil_store, {stored, body.arg(dst)}, {});
  }
  b.create(ops::func_return, {}, {});
  verify(m);
  return m;
}

// Star terms for one field: per direction W,E,N,S then z- and z+, hops
// ascending, with per-hop coefficients.
void push_star(std::vector<Term>& terms, int field, const std::vector<float>& hop_coef) {
  int64_t r = static_cast<int64_t>(hop_coef.size());
  for (auto& [dx, dy] : ir::ops::dir_order())
    for (int64_t h = 1; h <= r; ++h)
      terms.push_back({field, dx * h, dy * h, 0, hop_coef[static_cast<size_t>(h - 1)], true});
  for (int64_t h = 1; h <= r; ++h)
    terms.push_back({field, 0, 0, -h, hop_coef[static_cast<size_t>(h - 1)], true});
  for (int64_t h = 1; h <= r; ++h)
    terms.push_back({field, 0, 0, h, hop_coef[static_cast<size_t>(h - 1)], true});
}

} // namespace

std::vector<std::string> benchmark_names() {
  return {"jacobian6", "diffusion13", "acoustic13", "seismic25", "uvkbe"};
}

bool is_benchmark(const std::string& name) {
  auto v = benchmark_names();
  return std::find(v.begin(), v.end(), name) != v.end();
}

IrModule build_benchmark(const std::string& name, int64_t nx, int64_t ny, int64_t nz) {
  int64_t radius = name == "seismic25" ? 4 : (name == "jacobian6" || name == "uvkbe" ? 1 : 2);
  if (nx < radius || ny < radius || nz < 1)
    fail(ErrorKind::Config, "extents too small for benchmark '" + name + "'");

  BenchSpec spec;
  if (name == "jacobian6") {
    const float c = 1.0f / 6.0f;
    spec.fields = {"u"};
    ApplySpec ap;
    ap.operands = {0};
    push_star(ap.terms, 0, {c});
    spec.applies = {ap};
    spec.stores = {{-2, 0}};
  } else if (name == "diffusion13") {
    spec.fields = {"u"};
    ApplySpec ap;
    ap.operands = {0};
    push_star(ap.terms, 0, {0.1f, 0.05f});
    ap.terms.push_back({0, 0, 0, 0, 0.1f, true}); // center
    spec.applies = {ap};
    spec.stores = {{-2, 0}};
  } else if (name == "acoustic13") {
    spec.fields = {"u", "u_prev"};
    ApplySpec ap;
    ap.operands = {0, 1};
    push_star(ap.terms, 0, {0.015625f, 0.0078125f});
    // 2u as a repeated plain operand; the optimizer folds it to a multiply
    ap.terms.push_back({0, 0, 0, 0, 1.0f, false});
    ap.terms.push_back({0, 0, 0, 0, 1.0f, false});
    ap.terms.push_back({1, 0, 0, 0, -0.95f, true});
    spec.applies = {ap};
    spec.stores = {{-2, 0}, {0, 1}};
  } else if (name == "seismic25") {
    spec.fields = {"u"};
    ApplySpec ap;
    ap.operands = {0};
    push_star(ap.terms, 0, {0.03125f, 0.015625f, 0.0078125f, 0.00390625f});
    ap.terms.push_back({0, 0, 0, 0, 0.6484375f, true}); // center
    spec.applies = {ap};
    spec.stores = {{-2, 0}};
  } else if (name == "uvkbe") {
    spec.fields = {"u", "v", "h", "zs"};
    ApplySpec a1;
    a1.operands = {0, 1, 2}; // u, v, h
    a1.terms = {
        {0, -1, 0, 0, 0.25f, true}, // u west
        {0, 1, 0, 0, 0.25f, true},  // u east
        {1, 0, -1, 0, 0.25f, true}, // v north
        {1, 0, 1, 0, 0.25f, true},  // v south
        {2, 0, 0, 0, 0.5f, true},   // h center
    };
    ApplySpec a2;
    a2.operands = {kTempRef, 3, 0}; // tmp, zs, u
    a2.terms = {
        {0, 0, 0, 0, 1.0f, false},  // tmp center, unscaled
        {1, 0, 0, 0, 0.125f, true}, // zs center
        {2, 0, 0, 0, 0.25f, true},  // u center
    };
    spec.applies = {a1, a2};
    spec.stores = {{-2, 0}};
  } else {
    fail(ErrorKind::Config, "unknown benchmark '" + name + "'");
  }
  return build_from_spec(spec, nx, ny, nz);
}

} // namespace wsc::stencil
