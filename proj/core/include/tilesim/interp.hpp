#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tilesim/ir.hpp"
#include "tilesim/trace.hpp"

namespace tilesim {

// Flat byte-addressed memory image shared by all tiles of a run.
struct MemImage {
  std::vector<uint8_t> bytes;

  uint64_t load64(uint64_t addr) const;
  void store64(uint64_t addr, uint64_t value);
  size_t size() const { return bytes.size(); }
};

// Kernel parameter bindings; values are raw 64-bit (doubles are bit patterns).
using Bindings = std::map<std::string, uint64_t>;

struct InterpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InterpOptions {
  uint64_t max_dynamic_nodes = 100000000;  // per tile
};

// One program instance pinned to a tile id.
struct TileProgram {
  const KernelProgram* program = nullptr;
  int tile_id = 0;
};

// Interprets a set of tile programs over a shared memory image with SEND/RECV
// resolved by rendezvous (unbounded logical buffering). Tiles are stepped
// round-robin by ascending tile id; each tile runs until it blocks on a RECV
// or finishes. Reports rendezvous deadlock with the blocked tile and node.
std::vector<DynamicTrace> interpret_system(const std::vector<TileProgram>& tiles,
                                           int num_tiles, const Bindings& inputs,
                                           MemImage& image,
                                           const InterpOptions& opts = {});

// Single-tile convenience wrapper.
DynamicTrace interpret(const KernelProgram& program, const Bindings& inputs,
                       MemImage& image, int tile_id = 0, int num_tiles = 1,
                       const InterpOptions& opts = {});

// SPMD expansion: runs `program` on tiles 0..T-1 over a shared image.
std::vector<DynamicTrace> generate_spmd_traces(const KernelProgram& program, int T,
                                               const Bindings& inputs, MemImage& image,
                                               const InterpOptions& opts = {});

}  // namespace tilesim
