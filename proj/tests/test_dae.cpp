#include <doctest.h>

#include <cstring>

#include "oracles.hpp"
#include "tilesim/dae.hpp"

using namespace tilesim;

namespace {

int count_op(const KernelProgram& p, Opclass op) {
  int n = 0;
  for (const auto& b : p.blocks)
    for (const auto& node : b.nodes) n += node.op == op;
  return n;
}

const char* kOneLoadOneStore = R"(
kernel los(p: ptr, q: ptr, c: float)
block 0():
  v = load p
  w = fmul v c
  store q w
  return
)";

}  // namespace

TEST_CASE("one-load-one-store schema splits as expected") {
  KernelProgram p = parse_kernel(kOneLoadOneStore);
  SlicePair pair = slice(p);

  // access: load + send the value, recv the result + store it; no float math
  CHECK(count_op(pair.access, Opclass::LOAD) == 1);
  CHECK(count_op(pair.access, Opclass::SEND) == 1);
  CHECK(count_op(pair.access, Opclass::RECV) == 1);
  CHECK(count_op(pair.access, Opclass::STORE) == 1);
  CHECK(count_op(pair.access, Opclass::FMUL) == 0);

  // execute: recv the operand, compute, send the result; no memory
  CHECK(count_op(pair.execute, Opclass::LOAD) == 0);
  CHECK(count_op(pair.execute, Opclass::STORE) == 0);
  CHECK(count_op(pair.execute, Opclass::RECV) == 1);
  CHECK(count_op(pair.execute, Opclass::SEND) == 1);
  CHECK(count_op(pair.execute, Opclass::FMUL) == 1);

  validate(pair.access);
  validate(pair.execute);
}

TEST_CASE("sliced pair computes the same memory image") {
  KernelProgram p = parse_kernel(kOneLoadOneStore);
  MemImage img;
  img.bytes.assign(64, 0);
  uint64_t three;
  double d = 3.0;
  std::memcpy(&three, &d, 8);
  img.store64(0, three);
  Bindings in = {{"p", 0}, {"q", 8}, {"c", three}};
  SliceCheck check = verify_slice_equivalence(p, in, img);
  CHECK(check.pass);
}

TEST_CASE("loads-on-dependence-path reject the kernel") {
  // the second load's address is computed from float data
  KernelProgram p = parse_kernel(
      "kernel lod(a: ptr, out: ptr)\nblock 0():\n  v = load a\n"
      "  w = fmul v v\n  j = cast ftoi w\n  eight = const 8\n  off = imul j eight\n"
      "  pa = iadd a off\n  u = load pa\n  store out u\n  return\n");
  CHECK_THROWS_AS(slice(p), SliceError);

  // float-predicate control flow cannot run on the access side either
  KernelProgram p2 = parse_kernel(
      "kernel fcc(a: ptr, out: ptr)\nblock 0():\n  v = load a\n"
      "  c = cmp flt v v\n  cond_branch c 1(v) 2()\nblock 1(w):\n"
      "  store out w\n  branch 2()\nblock 2():\n  return\n");
  CHECK_THROWS_AS(slice(p2), SliceError);

  // kernels that already message cannot be sliced again
  KernelProgram p3 = parse_kernel(
      "kernel msg(n: int)\nblock 0():\n  zero = const 0\n  x = recv zero\n"
      "  return\n");
  CHECK_THROWS_AS(slice(p3), SliceError);
}

TEST_CASE("tile coordinates are re-derived so SPMD kernels slice unchanged") {
  KernelProgram p = parse_kernel(
      "kernel spmd(a: ptr, out: ptr, n: int)\nblock 0():\n"
      "  t = tile_id\n  nt = num_tiles\n  chunk = idiv n nt\n  s = imul t chunk\n"
      "  e = iadd s chunk\n  c = cmp lt s e\n  cond_branch c 1(s e) 2()\n"
      "block 1(i e):\n  eight = const 8\n  off = imul i eight\n"
      "  pa = iadd a off\n  v = load pa\n  two = const 2.0\n  w = fmul v two\n"
      "  po = iadd out off\n  store po w\n  one = const 1\n  i2 = iadd i one\n"
      "  c2 = cmp lt i2 e\n  cond_branch c2 1(i2 e) 2()\nblock 2():\n  return\n");
  SlicePair pair = slice(p);

  MemImage img;
  img.bytes.assign(1024, 0);
  for (uint64_t i = 0; i < 16; ++i) {
    double d = static_cast<double>(i) + 0.5;
    uint64_t bits;
    std::memcpy(&bits, &d, 8);
    img.store64(i * 8, bits);
  }
  Bindings in = {{"a", 0}, {"out", 512}, {"n", 16}};

  // two DAE pairs = raw tiles 0..3; compare against a plain 2-tile run
  MemImage ref = img;
  generate_spmd_traces(p, 2, in, ref);
  MemImage got = img;
  interpret_system({{&pair.access, 0}, {&pair.execute, 1}, {&pair.access, 2},
                    {&pair.execute, 3}},
                   4, in, got);
  CHECK(got.bytes == ref.bytes);
}

TEST_CASE("randomized sliceable kernels stay equivalent") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 25; ++i) {
    KernelProgram p = oracles::random_sliceable_kernel(rng);
    oracles::SliceInputs si = oracles::make_slice_inputs(rng);
    MemImage img;
    img.bytes = si.image_bytes;
    SliceCheck check = verify_slice_equivalence(p, si.bindings, img);
    CHECK(check.pass);
  }
}
