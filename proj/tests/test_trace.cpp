#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tilesim/trace.hpp"

using namespace tilesim;

TEST_CASE("ctrl trace round trips in both encodings") {
  std::vector<uint32_t> ctrl = {0, 1, 1, 1, 2, 0, 3};
  std::stringstream text, bin;
  write_ctrl_text(text, ctrl);
  write_ctrl_binary(bin, ctrl);
  CHECK(read_ctrl_text(text) == ctrl);
  CHECK(read_ctrl_binary(bin) == ctrl);
}

TEST_CASE("memory trace binary round trip preserves every field") {
  std::vector<MemRecord> mem = {
      {7, 0xdeadbeef00, 8, 0},
      {9, 0x40, 8, 1},
      {7, 0xffffffffffffffc0ull, 4, 0},
  };
  std::stringstream ss;
  write_mem_binary(ss, mem);
  auto back = read_mem_binary(ss);
  REQUIRE(back.size() == mem.size());
  for (size_t i = 0; i < mem.size(); ++i) {
    CHECK(back[i].node == mem[i].node);
    CHECK(back[i].address == mem[i].address);
    CHECK(back[i].size == mem[i].size);
    CHECK(back[i].is_write == mem[i].is_write);
  }
}

TEST_CASE("comm and accel traces round trip as text") {
  std::vector<CommRecord> comm = {{3, 1, 8}, {5, 0, 8}};
  std::stringstream cs;
  write_comm_text(cs, comm);
  auto cback = read_comm_text(cs);
  REQUIRE(cback.size() == 2);
  CHECK(cback[1].node == 5);
  CHECK(cback[0].peer == 1);

  std::vector<AccelInvocation> accel(1);
  accel[0].model_id = "mac";
  accel[0].iteration_counts = {{128}, {128, 16}};
  accel[0].bytes_transferred = 4096;
  accel[0].num_instances = 2;
  std::stringstream as;
  write_accel_text(as, accel);
  auto aback = read_accel_text(as);
  REQUIRE(aback.size() == 1);
  CHECK(aback[0].model_id == "mac");
  CHECK(aback[0].iteration_counts == accel[0].iteration_counts);
  CHECK(aback[0].bytes_transferred == 4096);
  CHECK(aback[0].num_instances == 2);
}

TEST_CASE("write_trace_files emits one file per stream") {
  DynamicTrace t;
  t.ctrl = {0, 1};
  t.mem = {{1, 64, 8, 0}};
  t.tile_id = 3;
  write_trace_files(".", "tt", t, false);
  CHECK(std::ifstream("tt.t3.ctrl").good());
  CHECK(std::ifstream("tt.t3.mem.bin").good());
  for (const char* ext : {"ctrl", "mem.bin", "comm", "accel"})
    std::remove(("tt.t3." + std::string(ext)).c_str());
}
