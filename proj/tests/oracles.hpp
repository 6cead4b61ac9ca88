// Independent reference models used by the unit and acceptance tests. These
// deliberately share no code with the library: the scheduler oracle resolves
// operand names itself instead of using the DDG's dependency tables, the LRU
// model is a plain per-set recency list, and the pipeline oracle is a
// discrete simulation of the double-buffered schedule.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tilesim/config.hpp"
#include "tilesim/core_tile.hpp"
#include "tilesim/ir.hpp"
#include "tilesim/trace.hpp"

namespace oracles {

// --- Scheduler oracle ---------------------------------------------------------

// Brute-force cycle-by-cycle list scheduler implementing the launch/issue/
// completion rules literally (launch-gated-by-terminator mode, no memory or
// communication nodes). Returns the cycle of the last completion.
uint64_t schedule_oracle(const tilesim::KernelProgram& prog,
                         const std::vector<uint32_t>& ctrl,
                         const tilesim::CoreConfig& cfg,
                         const tilesim::LatencyTable& lat);

// Random straight-line-of-blocks program: <= 4 blocks chained by BRANCH,
// <= 30 nodes total, cross-block values threaded through block inputs
// (including chained pass-through inputs). Pure compute, no memory.
tilesim::KernelProgram random_chain_program(std::mt19937_64& rng);

// Uniform random latencies in [1, 8] for every opclass.
tilesim::LatencyTable random_latency_table(std::mt19937_64& rng);

// Steps a lone CoreTile to completion with a stub environment; returns the
// last activity cycle. mem_latency is the stub's flat response delay.
uint64_t run_core(const tilesim::StaticDDG& ddg, const tilesim::DynamicTrace& trace,
                  const tilesim::CoreConfig& cfg, const tilesim::LatencyTable& lat,
                  uint64_t mem_latency = 4);

// --- LRU cache reference ------------------------------------------------------

// Set-associative LRU as per-set recency-ordered tag lists.
class LruRef {
 public:
  LruRef(uint64_t size, uint32_t line_size, uint32_t assoc);
  // Demand access; fills on miss. Returns hit.
  bool access(uint64_t addr);

 private:
  uint64_t line_size_, num_sets_;
  uint32_t assoc_;
  std::vector<std::vector<uint64_t>> sets_;  // MRU first
};

// --- Accelerator pipeline oracle ----------------------------------------------

// Double-buffered pipeline over `chunks` equal work chunks: chunk i at
// process p starts at max(finish of chunk i-1 at p, finish of chunk i at
// p-1). per_chunk_cost[p] is the cycles process p spends on one chunk.
uint64_t pipeline_oracle(const std::vector<uint64_t>& per_chunk_cost, uint64_t chunks);

// --- Random sliceable kernels -------------------------------------------------

// Random single-loop gather/compute/store kernel that the access/execute
// slicer must accept. Buffers are bound by make_slice_inputs.
tilesim::KernelProgram random_sliceable_kernel(std::mt19937_64& rng);

struct SliceInputs {
  std::map<std::string, uint64_t> bindings;
  std::vector<uint8_t> image_bytes;
};
SliceInputs make_slice_inputs(std::mt19937_64& rng);

}  // namespace oracles
