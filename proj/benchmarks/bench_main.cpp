#include <benchmark/benchmark.h>

#include <random>
#include <sstream>
#include <string>

#include "tilesim/ddg.hpp"
#include "tilesim/interleaver.hpp"
#include "tilesim/interp.hpp"
#include "tilesim/memhier.hpp"

using namespace tilesim;

namespace {

// Vector-scale kernel used by the parse/interpret/simulate benchmarks.
std::string vecscale_text() {
  return R"(kernel vs(a: ptr, out: ptr, n: int)
block 0():
  z = const 0
  c = cmp lt z n
  cond_branch c 1(z) 2()
block 1(i):
  eight = const 8
  off = imul i eight
  pa = iadd a off
  v = load pa
  two = const 2.0
  w = fmul v two
  po = iadd out off
  store po w
  one = const 1
  i2 = iadd i one
  c2 = cmp lt i2 n
  cond_branch c2 1(i2) 2()
block 2():
  return
)";
}

MemImage make_image(uint64_t n) {
  MemImage img;
  img.bytes.assign(16384 + n * 16, 0);
  return img;
}

void bm_parse_and_ddg(benchmark::State& state) {
  std::string text = vecscale_text();
  for (auto _ : state) {
    KernelProgram p = parse_kernel(text);
    StaticDDG ddg = build_ddg(p);
    benchmark::DoNotOptimize(ddg.data_edges.size());
  }
}
BENCHMARK(bm_parse_and_ddg);

void bm_interpret(benchmark::State& state) {
  KernelProgram p = parse_kernel(vecscale_text());
  uint64_t n = static_cast<uint64_t>(state.range(0));
  Bindings in = {{"a", 0}, {"out", 8192}, {"n", n}};
  uint64_t nodes = 0;
  for (auto _ : state) {
    MemImage img = make_image(n);
    DynamicTrace t = interpret(p, in, img);
    nodes += t.ctrl.size();
    benchmark::DoNotOptimize(t.mem.size());
  }
  state.SetItemsProcessed(static_cast<int64_t>(n) * state.iterations());
}
BENCHMARK(bm_interpret)->Arg(256)->Arg(4096);

void bm_core_simulation(benchmark::State& state) {
  KernelProgram p = parse_kernel(vecscale_text());
  StaticDDG ddg = build_ddg(p);
  uint64_t n = static_cast<uint64_t>(state.range(0));
  Bindings in = {{"a", 0}, {"out", 8192}, {"n", n}};
  MemImage img = make_image(n);
  DynamicTrace t = interpret(p, in, img);
  SystemConfig cfg;
  uint64_t instr = 0;
  for (auto _ : state) {
    Interleaver sim(cfg);
    sim.add_core(ddg, t);
    SimStats stats = sim.run();
    instr += stats.tiles[0].instructions;
  }
  state.SetItemsProcessed(static_cast<int64_t>(instr));
}
BENCHMARK(bm_core_simulation)->Arg(256)->Arg(1024);

void bm_memory_hierarchy(benchmark::State& state) {
  CacheConfig l1, l2;
  l2.size = 1 << 20;
  l2.latency = 6;
  DRAMConfig dram;
  std::mt19937_64 rng(9);
  for (auto _ : state) {
    MemorySystem ms(4, l1, l2, dram, true);
    std::vector<MemCompletion> out;
    uint64_t cycle = 0, token = 0;
    int submitted = 0;
    while (submitted < 4096 || !ms.idle()) {
      int tile = static_cast<int>(rng() % 4);
      uint64_t addr = (rng() % (1 << 22)) & ~7ull;
      if (submitted < 4096 && ms.submit(tile, addr, rng() % 4 == 0, {tile, token++}, cycle))
        ++submitted;
      ms.advance(++cycle, out);
    }
    benchmark::DoNotOptimize(out.size());
  }
  state.SetItemsProcessed(4096 * state.iterations());
}
BENCHMARK(bm_memory_hierarchy);

}  // namespace

BENCHMARK_MAIN();
