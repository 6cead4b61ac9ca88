#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tilesim/ir.hpp"

namespace tilesim {

// Static data-dependency graph over one kernel. Node ids are the program's
// global static node ids.
struct StaticDDG {
  const KernelProgram* program = nullptr;

  // (producer node, consumer node), including cross-block edges routed
  // through block inputs at branch sites.
  std::vector<std::pair<int, int>> data_edges;
  // (terminator node, successor block), one entry per distinct target.
  std::vector<std::pair<int, int>> control_edges;
  // Global static node ids of every LOAD/STORE, in static program order.
  std::vector<int> memory_nodes;

  // Per block: for each node position, the in-block node positions it
  // consumes (resolved operand producers). Used by the core model.
  struct BlockDeps {
    // parents[i] = positions (within the block) of i's in-block producers.
    std::vector<std::vector<int>> parents;
    // input_consumers[j] = node positions consuming block input j.
    std::vector<std::vector<int>> input_consumers;
    // For each node position, operand indices resolved to block inputs:
    // (operand position, input index). Branch-arg provenance is separate.
    std::vector<std::vector<std::pair<int, int>>> input_operands;
    // arg_producer[t][j]: for target t of the terminator, the in-block node
    // position producing branch arg j, or -1 when the arg is a parameter, or
    // -2 - k when the arg is this block's own input k (chained provenance).
    std::vector<std::vector<int>> arg_producers;
  };
  std::vector<BlockDeps> block_deps;

  bool has_control_edge(int terminator_node, int successor_block) const;
};

// Builds the DDG. Throws ParseError if a block's data dependencies are not a
// DAG (cannot happen for parser output, which enforces defined-before-use).
StaticDDG build_ddg(const KernelProgram& program);

// One record per node and per edge; the --dump-ddg CLI format.
std::string dump_ddg(const StaticDDG& ddg);

}  // namespace tilesim
