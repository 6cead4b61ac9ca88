#include <doctest.h>

#include <cstring>

#include "tilesim/interp.hpp"

using namespace tilesim;

namespace {

const char* kVecAdd = R"(
kernel vecadd(a: ptr, b: ptr, out: ptr, n: int)
block 0():
  t = tile_id
  nt = num_tiles
  chunk = idiv n nt
  s = imul t chunk
  e = iadd s chunk
  c = cmp lt s e
  cond_branch c 1(s e) 2()
block 1(i e):
  eight = const 8
  off = imul i eight
  pa = iadd a off
  pb = iadd b off
  x = load pa
  y = load pb
  sum = fadd x y
  po = iadd out off
  store po sum
  one = const 1
  i2 = iadd i one
  c2 = cmp lt i2 e
  cond_branch c2 1(i2 e) 2()
block 2():
  return
)";

uint64_t dbits(double d) {
  uint64_t b;
  std::memcpy(&b, &d, 8);
  return b;
}

double bitsd(uint64_t b) {
  double d;
  std::memcpy(&d, &b, 8);
  return d;
}

MemImage vecadd_image(uint64_t n) {
  MemImage img;
  img.bytes.assign(4096, 0);
  for (uint64_t i = 0; i < n; ++i) {
    img.store64(i * 8, dbits(static_cast<double>(i)));
    img.store64(1024 + i * 8, dbits(2.0 * static_cast<double>(i)));
  }
  return img;
}

}  // namespace

TEST_CASE("interpreter computes vecadd and records all trace streams") {
  KernelProgram p = parse_kernel(kVecAdd);
  MemImage img = vecadd_image(16);
  Bindings in = {{"a", 0}, {"b", 1024}, {"out", 2048}, {"n", 16}};
  DynamicTrace t = interpret(p, in, img);
  for (uint64_t i = 0; i < 16; ++i)
    CHECK(bitsd(img.load64(2048 + i * 8)) == doctest::Approx(3.0 * static_cast<double>(i)));
  CHECK(t.ctrl.front() == 0);
  CHECK(t.ctrl.back() == 2);
  CHECK(t.ctrl.size() == 18);          // entry + 16 iterations + exit
  CHECK(t.mem.size() == 16 * 3);       // 2 loads + 1 store per iteration
  CHECK(t.mem[0].is_write == 0);
  CHECK(t.mem[2].is_write == 1);
  CHECK(t.mem[2].address == 2048);
}

TEST_CASE("SPMD tiles partition the index space") {
  KernelProgram p = parse_kernel(kVecAdd);
  MemImage img = vecadd_image(16);
  Bindings in = {{"a", 0}, {"b", 1024}, {"out", 2048}, {"n", 16}};
  auto traces = generate_spmd_traces(p, 4, in, img);
  REQUIRE(traces.size() == 4);
  for (int t = 0; t < 4; ++t) {
    CHECK(traces[static_cast<size_t>(t)].tile_id == t);
    CHECK(traces[static_cast<size_t>(t)].num_tiles == 4);
    CHECK(traces[static_cast<size_t>(t)].mem.size() == 4 * 3);
    // first load of tile t touches a[4t]
    CHECK(traces[static_cast<size_t>(t)].mem[0].address == static_cast<uint64_t>(4 * t) * 8);
  }
  for (uint64_t i = 0; i < 16; ++i)
    CHECK(bitsd(img.load64(2048 + i * 8)) == doctest::Approx(3.0 * static_cast<double>(i)));
}

TEST_CASE("send/recv rendezvous between two programs") {
  KernelProgram producer = parse_kernel(
      "kernel prod(v: int)\nblock 0():\n  one = const 1\n  send one v\n  return\n");
  KernelProgram consumer = parse_kernel(
      "kernel cons(out: ptr)\nblock 0():\n  zero = const 0\n  x = recv zero\n"
      "  store out x\n  return\n");
  MemImage img;
  img.bytes.assign(64, 0);
  Bindings in = {{"v", 77}, {"out", 8}};
  auto traces = interpret_system({{&producer, 0}, {&consumer, 1}}, 2, in, img);
  CHECK(img.load64(8) == 77);
  REQUIRE(traces.size() == 2);
  CHECK(traces[0].comm.size() == 1);
  CHECK(traces[0].comm[0].peer == 1);
  CHECK(traces[1].comm.size() == 1);
  CHECK(traces[1].comm[0].peer == 0);
}

TEST_CASE("recv with no sender reports a rendezvous deadlock") {
  KernelProgram lonely = parse_kernel(
      "kernel lone()\nblock 0():\n  zero = const 0\n  x = recv zero\n  return\n");
  MemImage img;
  img.bytes.assign(64, 0);
  CHECK_THROWS_AS(interpret_system({{&lonely, 1}}, 2, {}, img), InterpError);
}

TEST_CASE("out-of-bounds access and runaway loops are errors") {
  KernelProgram p = parse_kernel(
      "kernel oob(a: ptr)\nblock 0():\n  x = load a\n  return\n");
  MemImage img;
  img.bytes.assign(64, 0);
  Bindings in = {{"a", 4096}};
  CHECK_THROWS_AS(interpret(p, in, img), InterpError);

  KernelProgram spin = parse_kernel(
      "kernel spin(n: int)\nblock 0():\n  branch 1()\nblock 1():\n  branch 1()\n");
  InterpOptions opts;
  opts.max_dynamic_nodes = 1000;
  Bindings sin = {{"n", 0}};
  CHECK_THROWS_AS(interpret(spin, sin, img, 0, 1, opts), InterpError);
}
