#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "tilesim/stats.hpp"

using namespace tilesim;

namespace {

SimStats sample() {
  SimStats s;
  s.tiles.resize(2);
  s.tiles[0].tile = 0;
  s.tiles[0].cycles = 100;
  s.tiles[0].instructions = 250;
  s.tiles[0].ipc = 2.5;
  s.tiles[0].energy = 1e-9;
  s.tiles[0].l1.hits = 40;
  s.tiles[1].tile = 1;
  s.tiles[1].cycles = 90;
  s.llc.misses = 7;
  s.dram.requests = 7;
  s.global_cycles = 100;
  s.time_s = 5e-8;
  s.total_energy = 2e-9;
  s.memory_energy = 1e-9;
  s.edp = s.total_energy * s.time_s;
  return s;
}

}  // namespace

TEST_CASE("csv has the fixed header and one row per counter") {
  std::ostringstream os;
  emit_stats_csv(os, sample());
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "scope,id,counter,value");
  size_t tile_rows = 0, global_rows = 0, rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
    if (line.rfind("tile,", 0) == 0) ++tile_rows;
    if (line.rfind("global,", 0) == 0) ++global_rows;
  }
  CHECK(tile_rows % 2 == 0);   // two identical tile row groups
  CHECK(tile_rows == 2 * 13);  // 4 scalar + 9 L1 counters per tile
  CHECK(global_rows == 5);
  CHECK(os.str().find("tile,1,cycles,90") != std::string::npos);
  CHECK(os.str().find("dram,0,requests,7") != std::string::npos);
}

TEST_CASE("text stats list every scope") {
  std::ostringstream os;
  emit_stats_text(os, sample());
  std::string t = os.str();
  CHECK(t.find("tile 0:") != std::string::npos);
  CHECK(t.find("tile 1:") != std::string::npos);
  CHECK(t.find("llc:") != std::string::npos);
  CHECK(t.find("dram:") != std::string::npos);
  CHECK(t.find("global:") != std::string::npos);
  CHECK(t.find("ipc") != std::string::npos);
  CHECK(t.find("edp") != std::string::npos);
}

TEST_CASE("emission is deterministic") {
  std::ostringstream a, b;
  emit_stats_csv(a, sample());
  emit_stats_csv(b, sample());
  CHECK(a.str() == b.str());
}
