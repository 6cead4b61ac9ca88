#include <doctest.h>

#include <cstring>

#include "tilesim/ir.hpp"

using namespace tilesim;

namespace {

const char* kVecAddish = R"(
# minimal loop kernel
kernel va(a: ptr, b: ptr, out: ptr, n: int)
block 0():
  z = const 0
  c = cmp lt z n
  cond_branch c 1(z) 2()
block 1(i):
  eight = const 8
  off = imul i eight
  pa = iadd a off
  pb = iadd b off
  x = load pa
  y = load pb
  s = fadd x y
  po = iadd out off
  store po s
  one = const 1
  i2 = iadd i one
  c2 = cmp lt i2 n
  cond_branch c2 1(i2) 2()
block 2():
  return
)";

}  // namespace

TEST_CASE("parse assigns dense ids in block/position order") {
  KernelProgram p = parse_kernel(kVecAddish);
  CHECK(p.name == "va");
  CHECK(p.params.size() == 4);
  CHECK(p.blocks.size() == 3);
  int expect = 0;
  for (const auto& blk : p.blocks)
    for (const auto& n : blk.nodes) CHECK(n.id == expect++);
  CHECK(p.num_nodes() == expect);
  CHECK(p.node_by_id(0)->op == Opclass::CONST);
  CHECK(p.node_by_id(expect - 1)->op == Opclass::RETURN);
  CHECK(p.node_by_id(expect) == nullptr);
}

TEST_CASE("print/parse round trip is stable") {
  KernelProgram p1 = parse_kernel(kVecAddish);
  std::string text = print_kernel(p1);
  KernelProgram p2 = parse_kernel(text);
  CHECK(print_kernel(p2) == text);
  CHECK(p2.num_nodes() == p1.num_nodes());
  CHECK(p2.blocks[1].inputs == p1.blocks[1].inputs);
}

TEST_CASE("terminator payloads survive the round trip") {
  KernelProgram p = parse_kernel(kVecAddish);
  const Node& cb = p.blocks[1].nodes.back();
  CHECK(cb.op == Opclass::COND_BRANCH);
  REQUIRE(cb.targets.size() == 2);
  CHECK(cb.targets[0].block == 1);
  CHECK(cb.targets[0].args == std::vector<std::string>{"i2"});
  CHECK(cb.targets[1].block == 2);
  CHECK(cb.targets[1].args.empty());
}

TEST_CASE("const literals keep their kind") {
  KernelProgram p = parse_kernel(
      "kernel k(x: int)\nblock 0():\n  a = const 7\n  b = const 2.5\n  return\n");
  CHECK(p.blocks[0].nodes[0].const_bits == 7);
  CHECK_FALSE(p.blocks[0].nodes[0].const_is_float);
  CHECK(p.blocks[0].nodes[1].const_is_float);
  double d;
  static_assert(sizeof d == 8);
  std::memcpy(&d, &p.blocks[0].nodes[1].const_bits, 8);
  CHECK(d == 2.5);
}

TEST_CASE("parse errors carry a location") {
  CHECK_THROWS_AS(parse_kernel("kernel k()\nblock 0():\n  x = bogus a b\n  return\n"),
                  ParseError);
  // use of an undefined value
  CHECK_THROWS_AS(parse_kernel("kernel k()\nblock 0():\n  x = iadd y y\n  return\n"),
                  ParseError);
  // missing terminator
  CHECK_THROWS_AS(parse_kernel("kernel k(a: int)\nblock 0():\n  x = move a\n"),
                  ParseError);
  // values are block-local: using another block's result must fail
  CHECK_THROWS_AS(parse_kernel("kernel k(a: int)\nblock 0():\n  x = move a\n"
                               "  branch 1()\nblock 1():\n  y = move x\n  return\n"),
                  ParseError);
  try {
    parse_kernel("kernel k()\nblock 0():\n  x = bogus\n  return\n");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("opclass names map both ways") {
  CHECK(opclass_from_name("fmul") == Opclass::FMUL);
  CHECK(opclass_from_name("nope") == std::nullopt);
  CHECK(std::string(opclass_name(Opclass::COND_BRANCH)) == "cond_branch");
  CHECK(is_terminator(Opclass::RETURN));
  CHECK_FALSE(is_terminator(Opclass::LOAD));
  CHECK(is_memory(Opclass::STORE));
}

TEST_CASE("accel_invoke parses processes and operands") {
  KernelProgram p = parse_kernel(
      "kernel k(n: int, bytes: int)\nblock 0():\n  one = const 1\n"
      "  accel_invoke mac one bytes n ; n one\n  return\n");
  const Node& inv = p.blocks[0].nodes[1];
  CHECK(inv.op == Opclass::ACCEL_INVOKE);
  CHECK(inv.accel_model == "mac");
  CHECK(inv.accel_groups == std::vector<int>{1, 2});
  CHECK(inv.operands.size() == 5);  // instances, bytes, then 3 iteration values
}
