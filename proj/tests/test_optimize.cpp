// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dialects/ops.hpp"
#include "ir/io.hpp"
#include "ir/registry.hpp"
#include "passes/passes.hpp"
#include "stencil/bench.hpp"
#include "stencil/grid.hpp"
#include "stencil/oracle.hpp"

#include <cstring>

using namespace wsc;
using namespace wsc::ir;
using namespace wsc::stencil;

namespace {

int count_ops(const IrModule& m, const std::string& name) {
  int n = 0;
  walk(m, [&](const Operation& op) {
    if (op.name() == name) ++n;
  });
  return n;
}

void run(IrModule& m, const std::string& pass,
         std::map<std::string, std::string> opts = {}) {
  passes::register_all();
  PassPipeline p;
  p.passes.push_back({pass, PassOptions{std::move(opts)}});
  run_pipeline(m, p);
}

bool grids_bit_equal(const GridMap& a, const GridMap& b) {
  for (auto& [k, g] : a) {
    auto it = b.find(k);
    if (it == b.end() || g.data.size() != it->second.data.size()) return false;
    if (std::memcmp(g.data.data(), it->second.data.data(), g.data.size() * 4) != 0)
      return false;
  }
  return true;
}

} // namespace

TEST_CASE("stencil-inline merges uvkbe's two applies into one") {
  IrModule m = build_benchmark("uvkbe", 8, 8, 8);
  REQUIRE(count_ops(m, ops::stencil_apply) == 2);
  IrModule orig = clone_module(m);
  run(m, "stencil-inline");
  CHECK(count_ops(m, ops::stencil_apply) == 1);

  // fused module is oracle-equivalent (bit-exact: composition preserves the
  // left-to-right chain)
  GridMap in = make_inputs(orig);
  GridMap a = interpret_stencil(orig, in, 1);
  GridMap b = interpret_stencil(m, in, 1);
  CHECK(grids_bit_equal(a, b));
}

TEST_CASE("stencil-inline leaves single applies unchanged") {
  IrModule m = build_benchmark("jacobian6", 4, 4, 8);
  IrModule orig = clone_module(m);
  run(m, "stencil-inline");
  CHECK(structurally_equal(m, orig));
}

TEST_CASE("stencil-inline is idempotent") {
  IrModule m = build_benchmark("uvkbe", 8, 8, 8);
  run(m, "stencil-inline");
  IrModule once = clone_module(m);
  run(m, "stencil-inline");
  CHECK(structurally_equal(m, once));
}

TEST_CASE("to-varith flattens nested chains in operand order") {
  // a + (b + (c + d)) with distinct constants
  std::string text =
      "\"func.func\"() {field_names = [\"x\", \"o\"], function_type = "
      "(!stencil.field<[0,4]xf32>, !stencil.field<[0,4]xf32>) -> (), sym_name = \"main\"} ({\n"
      "^e(%xf : !stencil.field<[0,4]xf32>, %of : !stencil.field<[0,4]xf32>):\n"
      "  %t = \"stencil.load\"(%xf) : (!stencil.field<[0,4]xf32>) -> (!stencil.temp<[0,4]xf32>)\n"
      "  %r = \"stencil.apply\"(%t) ({\n"
      "  ^b(%arg : !stencil.temp<[0,4]xf32>):\n"
      "    %a = \"arith.constant\"() {value = 1.0 : f32} : () -> (f32)\n"
      "    %bb = \"arith.constant\"() {value = 2.0 : f32} : () -> (f32)\n"
      "    %c = \"arith.constant\"() {value = 3.0 : f32} : () -> (f32)\n"
      "    %d = \"arith.constant\"() {value = 4.0 : f32} : () -> (f32)\n"
      "    %cd = \"arith.addf\"(%c, %d) : (f32, f32) -> (f32)\n"
      "    %bcd = \"arith.addf\"(%bb, %cd) : (f32, f32) -> (f32)\n"
      "    %abcd = \"arith.addf\"(%a, %bcd) : (f32, f32) -> (f32)\n"
      "    \"stencil.return\"(%abcd) : (f32) -> ()\n"
      "  }) : (!stencil.temp<[0,4]xf32>) -> (!stencil.temp<[0,4]xf32>)\n"
      "  \"stencil.store\"(%r, %of) : (!stencil.temp<[0,4]xf32>, !stencil.field<[0,4]xf32>) -> ()\n"
      "  \"func.return\"() : () -> ()\n"
      "}) : () -> ()\n";
  IrModule m = parse_ir(text);
  run(m, "to-varith");
  CHECK(count_ops(m, ops::arith_addf) == 0);
  CHECK(count_ops(m, ops::varith_add) == 1);
  walk(m, [&](const Operation& op) {
    if (op.name() != ops::varith_add) return;
    REQUIRE(op.num_operands() == 4);
    // operand order a, b, c, d preserved
    for (int i = 0; i < 4; ++i)
      CHECK(op.operand(i).op->attr_req("value").as_float() == float(i + 1));
  });
}

TEST_CASE("from-varith lowers a binary varith op to plain arithmetic") {
  IrModule m = build_benchmark("jacobian6", 4, 4, 8);
  run(m, "to-varith");
  REQUIRE(count_ops(m, ops::varith_add) > 0);
  run(m, "from-varith");
  CHECK(count_ops(m, ops::varith_add) == 0);
  CHECK(count_ops(m, ops::varith_mul) == 0);
}

TEST_CASE("to(from(v)) is the identity on varith-form benchmark modules") {
  for (auto& name : benchmark_names()) {
    IrModule m = build_benchmark(name, 4, 4, 8);
    run(m, "to-varith");
    IrModule v = clone_module(m);
    run(m, "from-varith");
    run(m, "to-varith");
    CHECK(structurally_equal(m, v));
  }
}

TEST_CASE("varith passes preserve oracle semantics bit-for-bit on left-leaning chains") {
  for (auto& name : benchmark_names()) {
    IrModule m = build_benchmark(name, 4, 4, 8);
    IrModule orig = clone_module(m);
    run(m, "to-varith");
    run(m, "from-varith");
    GridMap in = make_inputs(orig);
    CHECK(grids_bit_equal(interpret_stencil(orig, in, 2), interpret_stencil(m, in, 2)));
  }
}

TEST_CASE("fuse-repeated-operands: add(x,x,x,y) becomes add(mul(3,x), y)") {
  std::string text =
      "\"func.func\"() {field_names = [\"x\", \"o\"], function_type = "
      "(!stencil.field<[0,4]xf32>, !stencil.field<[0,4]xf32>) -> (), sym_name = \"main\"} ({\n"
      "^e(%xf : !stencil.field<[0,4]xf32>, %of : !stencil.field<[0,4]xf32>):\n"
      "  %t = \"stencil.load\"(%xf) : (!stencil.field<[0,4]xf32>) -> (!stencil.temp<[0,4]xf32>)\n"
      "  %r = \"stencil.apply\"(%t) ({\n"
      "  ^b(%arg : !stencil.temp<[0,4]xf32>):\n"
      "    %x = \"stencil.access\"(%arg) {offset = [0]} : (!stencil.temp<[0,4]xf32>) -> (f32)\n"
      "    %y = \"arith.constant\"() {value = 5.0 : f32} : () -> (f32)\n"
      "    %s = \"varith.add\"(%x, %x, %x, %y) : (f32, f32, f32, f32) -> (f32)\n"
      "    \"stencil.return\"(%s) : (f32) -> ()\n"
      "  }) : (!stencil.temp<[0,4]xf32>) -> (!stencil.temp<[0,4]xf32>)\n"
      "  \"stencil.store\"(%r, %of) : (!stencil.temp<[0,4]xf32>, !stencil.field<[0,4]xf32>) -> ()\n"
      "  \"func.return\"() : () -> ()\n"
      "}) : () -> ()\n";
  IrModule m = parse_ir(text);
  run(m, "varith-fuse-repeated-operands");
  CHECK(count_ops(m, ops::arith_mulf) == 1);
  walk(m, [&](const Operation& op) {
    if (op.name() == ops::varith_add) CHECK(op.num_operands() == 2);
    if (op.name() == ops::arith_mulf)
      CHECK(op.operand(0).op->attr_req("value").as_float() == 3.0f);
  });
  // distinct operands stay untouched
  IrModule m2 = parse_ir(text);
  IrModule before = clone_module(m2);
  walk(m2, [&](Operation& op) {
    if (op.name() == ops::varith_add) {
      // make all operands distinct by dropping the repeats
      op.set_operands({op.operand(0), op.operand(3)});
    }
  });
  IrModule distinct = clone_module(m2);
  run(m2, "varith-fuse-repeated-operands");
  CHECK(structurally_equal(m2, distinct));
  (void)before;
}

TEST_CASE("fuse-repeated-operands shrinks acoustic13's add operand count") {
  IrModule m = build_benchmark("acoustic13", 4, 4, 8);
  run(m, "to-varith");
  auto slots = [&](const IrModule& mm) {
    int n = 0;
    walk(mm, [&](const Operation& op) {
      if (op.name() == ops::varith_add) n += op.num_operands();
    });
    return n;
  };
  int before = slots(m);
  IrModule orig = clone_module(m);
  run(m, "varith-fuse-repeated-operands");
  CHECK(slots(m) < before);

  // strength reduction reassociates the chain: compare within tolerance
  GridMap in = make_inputs(orig);
  GridMap a = interpret_stencil(orig, in, 2);
  GridMap b = interpret_stencil(m, in, 2);
  for (auto& [k, g] : a) {
    auto st = compare_grids(b.at(k), g, g.bounds);
    CHECK(st.max_rel <= 1e-5);
  }
}

TEST_CASE("fuse-multiply-add rewrites mul+add pairs over buffers") {
  std::string text =
      "\"memref.global\"() {sym_name = \"A\", size = 8} : () -> ()\n"
      "\"memref.global\"() {sym_name = \"B\", size = 8} : () -> ()\n"
      "\"memref.global\"() {sym_name = \"T\", size = 8} : () -> ()\n"
      "\"memref.global\"() {sym_name = \"D\", size = 8} : () -> ()\n"
      "\"csl.func\"() {sym_name = \"f\"} ({\n"
      "^b():\n"
      "  %a = \"memref.get\"() {name = @A} : () -> (memref<8xf32>)\n"
      "  %bb = \"memref.get\"() {name = @B} : () -> (memref<8xf32>)\n"
      "  %t = \"memref.get\"() {name = @T} : () -> (memref<8xf32>)\n"
      "  %d = \"memref.get\"() {name = @D} : () -> (memref<8xf32>)\n"
      "  %k = \"arith.constant\"() {value = 0.25 : f32} : () -> (f32)\n"
      "  \"dps.mul\"(%bb, %k, %t) : (memref<8xf32>, f32, memref<8xf32>) -> ()\n"
      "  \"dps.add\"(%a, %t, %d) : (memref<8xf32>, memref<8xf32>, memref<8xf32>) -> ()\n"
      "  \"csl.end\"() : () -> ()\n"
      "}) : () -> ()\n";
  IrModule m = parse_ir(text);
  run(m, "fuse-multiply-add");
  CHECK(count_ops(m, ops::dps_fmac) == 1);
  CHECK(count_ops(m, ops::dps_mul) == 0);
  CHECK(count_ops(m, ops::dps_add) == 0);
  walk(m, [&](const Operation& op) {
    if (op.name() == ops::dps_fmac) CHECK(op.attr_req("scale").as_float() == 0.25f);
  });

  // add of two non-mul values stays
  std::string plain =
      "\"memref.global\"() {sym_name = \"A\", size = 8} : () -> ()\n"
      "\"memref.global\"() {sym_name = \"D\", size = 8} : () -> ()\n"
      "\"csl.func\"() {sym_name = \"f\"} ({\n"
      "^b():\n"
      "  %a = \"memref.get\"() {name = @A} : () -> (memref<8xf32>)\n"
      "  %d = \"memref.get\"() {name = @D} : () -> (memref<8xf32>)\n"
      "  \"dps.add\"(%a, %a, %d) : (memref<8xf32>, memref<8xf32>, memref<8xf32>) -> ()\n"
      "  \"csl.end\"() : () -> ()\n"
      "}) : () -> ()\n";
  IrModule m2 = parse_ir(plain);
  IrModule orig = clone_module(m2);
  run(m2, "fuse-multiply-add");
  CHECK(structurally_equal(m2, orig));
}

TEST_CASE("timestep wrapping produces a loop the oracle agrees with") {
  for (auto& name : benchmark_names()) {
    IrModule chain = build_benchmark(name, 4, 4, 8);
    IrModule looped = clone_module(chain);
    passes::wrap_timesteps(looped, 3);
    CHECK(count_ops(looped, ops::scf_for) == 1);
    GridMap in = make_inputs(chain);
    GridMap a = interpret_stencil(chain, in, 3);
    GridMap b = interpret_stencil(looped, in, 3);
    CHECK(grids_bit_equal(a, b));
  }
}

TEST_CASE("timestep wrapping supports zero iterations") {
  IrModule m = build_benchmark("jacobian6", 4, 4, 8);
  passes::wrap_timesteps(m, 0);
  GridMap in = make_inputs(m);
  GridMap out = interpret_stencil(m, in, 0);
  CHECK(out.at("u").data == in.at("u").data);
}
