#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tilesim/memhier.hpp"

namespace tilesim {

struct TileStats {
  int tile = 0;
  uint64_t cycles = 0;        // last cycle with activity
  uint64_t instructions = 0;  // completed node instances
  double ipc = 0.0;
  double energy = 0.0;  // joules, instruction costs only
  CacheStats l1;
};

struct SimStats {
  std::vector<TileStats> tiles;
  CacheStats llc;
  SimpleDRAM::Stats dram;
  uint64_t global_cycles = 0;  // slowest tile
  double time_s = 0.0;         // global finish time
  double total_energy = 0.0;   // cores + hierarchy
  double memory_energy = 0.0;
  double edp = 0.0;            // total_energy * time_s
};

// Human-readable counter listing, one counter per line.
void emit_stats_text(std::ostream& out, const SimStats& s);

// CSV rows `scope,id,counter,value`: one row per (tile, counter) plus
// `global` scope rows. Deterministic ordering.
void emit_stats_csv(std::ostream& out, const SimStats& s);

}  // namespace tilesim
