#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "tilesim/interp.hpp"

namespace tilesim {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A kernel's initial memory image plus parameter bindings, built from a
// small declarative text format:
//
//   memory <bytes>
//   buffer <name> count=<elems> elem=<u64|f64> init=<spec>
//   param <name> = <int literal> | <float literal> | &<buffer>
//
// init specs: zeros | iota | random | randint:<lo>:<hi> | values:<v1,v2,...>
// Buffers hold 8-byte elements and are packed from address 0, 64-byte
// aligned. `random` draws are deterministic in (seed, declaration order).
struct LoadedInputs {
  MemImage image;
  Bindings bindings;
};

LoadedInputs build_inputs(const std::string& text, uint64_t seed,
                          const std::string& origin = "<string>");
LoadedInputs load_inputs(const std::string& path, uint64_t seed);

}  // namespace tilesim
