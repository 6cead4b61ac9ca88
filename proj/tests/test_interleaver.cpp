#include <doctest.h>

#include <sstream>

#include "tilesim/ddg.hpp"
#include "tilesim/interleaver.hpp"

using namespace tilesim;

namespace {

struct System {
  KernelProgram prog;
  StaticDDG ddg;
  DynamicTrace trace;
};

System compute_only() {
  System s;
  s.prog = parse_kernel(
      "kernel c(a: int)\nblock 0():\n  x = imul a a\n  y = imul x x\n  return y\n");
  s.ddg = build_ddg(s.prog);
  s.trace.ctrl = {0};
  return s;
}

}  // namespace

TEST_CASE("single compute tile runs to completion and reports stats") {
  System s = compute_only();
  SystemConfig cfg;
  Interleaver sim(cfg);
  sim.add_core(s.ddg, s.trace);
  SimStats stats = sim.run();
  REQUIRE(stats.tiles.size() == 1);
  CHECK(stats.tiles[0].instructions == 3);
  CHECK(stats.global_cycles == stats.tiles[0].cycles);
  CHECK(stats.time_s ==
        doctest::Approx(static_cast<double>(stats.global_cycles) / 2e9));
  CHECK(stats.edp == doctest::Approx(stats.total_energy * stats.time_s));
}

TEST_CASE("memory requests round-trip through the shared hierarchy") {
  System s;
  s.prog = parse_kernel("kernel m(a: ptr)\nblock 0():\n  x = load a\n  return x\n");
  s.ddg = build_ddg(s.prog);
  s.trace.ctrl = {0};
  s.trace.mem = {{0, 0x100, 8, 0}};
  SystemConfig cfg;
  cfg.core.freq_hz = cfg.mem_freq_hz;  // 1:1 clocks: cold miss = 214 + return
  Interleaver sim(cfg);
  sim.add_core(s.ddg, s.trace);
  SimStats stats = sim.run();
  CHECK(stats.tiles[0].l1.misses == 1);
  CHECK(stats.dram.requests == 1);
  CHECK(stats.tiles[0].cycles == 215);
}

TEST_CASE("messages arrive after the channel latency in the receiver's clock") {
  KernelProgram sender = parse_kernel(
      "kernel s(v: int)\nblock 0():\n  one = const 1\n  send one v\n  return\n");
  KernelProgram receiver = parse_kernel(
      "kernel r()\nblock 0():\n  zero = const 0\n  x = recv zero\n  return x\n");
  StaticDDG sddg = build_ddg(sender), rddg = build_ddg(receiver);
  DynamicTrace st, rt;
  st.ctrl = {0};
  st.comm = {{1, 1, 8}};
  rt.ctrl = {0};
  rt.comm = {{1, 0, 8}};

  SystemConfig cfg;
  cfg.msg.latency = 5;
  Interleaver sim(cfg);
  sim.add_core(sddg, st);
  sim.add_core(rddg, rt);
  SimStats stats = sim.run();
  // sender: const at 1, send issues at 1, payload ready at 2; receiver's recv
  // can only complete after the 5-cycle channel latency on top of that
  CHECK(stats.tiles[1].cycles >= 7);
  CHECK(stats.tiles[1].instructions == 3);
}

TEST_CASE("a receive with no matching send deadlocks with a report") {
  KernelProgram receiver = parse_kernel(
      "kernel r()\nblock 0():\n  zero = const 0\n  x = recv zero\n  return x\n");
  StaticDDG rddg = build_ddg(receiver);
  DynamicTrace rt;
  rt.ctrl = {0};
  rt.comm = {{1, 1, 8}};
  KernelProgram idle = parse_kernel("kernel i()\nblock 0():\n  return\n");
  StaticDDG iddg = build_ddg(idle);
  DynamicTrace it;
  it.ctrl = {0};

  SystemConfig cfg;
  Interleaver sim(cfg);
  sim.add_core(rddg, rt);
  sim.add_core(iddg, it);
  try {
    sim.run();
    CHECK(false);
  } catch (const SimDeadlock& e) {
    CHECK(std::string(e.what()).find("recv") != std::string::npos);
  }
}

TEST_CASE("event log records sends, receives and memory completions") {
  KernelProgram sender = parse_kernel(
      "kernel s(v: int)\nblock 0():\n  one = const 1\n  send one v\n  return\n");
  KernelProgram receiver = parse_kernel(
      "kernel r(a: ptr)\nblock 0():\n  zero = const 0\n  x = recv zero\n"
      "  y = load a\n  return y\n");
  StaticDDG sddg = build_ddg(sender), rddg = build_ddg(receiver);
  DynamicTrace st, rt;
  st.ctrl = {0};
  st.comm = {{1, 1, 8}};
  rt.ctrl = {0};
  rt.comm = {{1, 0, 8}};
  rt.mem = {{2, 0x40, 8, 0}};

  SystemConfig cfg;
  Interleaver sim(cfg);
  sim.add_core(sddg, st);
  sim.add_core(rddg, rt);
  std::ostringstream log;
  sim.set_event_log(&log);
  sim.run();
  std::string text = log.str();
  CHECK(text.find("ev=send") != std::string::npos);
  CHECK(text.find("ev=recv") != std::string::npos);
  CHECK(text.find("ev=mem") != std::string::npos);
  CHECK(text.find("t=") != std::string::npos);
  CHECK(text.find("tile=1") != std::string::npos);
}

TEST_CASE("per-tile core configs override the system default") {
  System s = compute_only();
  SystemConfig cfg;
  Interleaver sim(cfg);
  CoreConfig slow = cfg.core;
  slow.freq_hz = cfg.core.freq_hz / 2;
  int a = sim.add_core(s.ddg, s.trace);
  int b = sim.add_core(s.ddg, s.trace, slow);
  CHECK(a == 0);
  CHECK(b == 1);
  SimStats stats = sim.run();
  // same cycle counts, but the slow tile's cycles dominate wall-clock time
  CHECK(stats.tiles[0].cycles == stats.tiles[1].cycles);
  CHECK(stats.time_s == doctest::Approx(static_cast<double>(stats.tiles[1].cycles) /
                                        static_cast<double>(slow.freq_hz)));
}
