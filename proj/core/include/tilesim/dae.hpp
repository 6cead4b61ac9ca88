#pragma once

#include <stdexcept>
#include <string>

#include "tilesim/interp.hpp"
#include "tilesim/ir.hpp"

namespace tilesim {

// Thrown when a kernel cannot be decoupled: control flow or an address
// depends on execute-side (floating-point) computation, or the kernel
// already uses messaging.
struct SliceError : std::runtime_error {
  int node_id;
  SliceError(const std::string& msg, int node_id_ = -1)
      : std::runtime_error(msg), node_id(node_id_) {}
};

// Decoupled access/execute pair. The access program keeps all address
// computation, control flow, LOADs (each forwarding its value with a SEND)
// and STOREs (each consuming its value with a RECV); the execute program
// keeps the value computation with RECVs in place of LOADs and SENDs in
// place of STOREs. Both duplicate the control skeleton.
//
// Tile id convention: the pair occupies two consecutive raw tile ids, access
// on the even one. Both programs recover the logical SPMD coordinates as
// tile_id/2 and num_tiles/2, so an SPMD kernel slices without changes.
struct SlicePair {
  KernelProgram access;
  KernelProgram execute;
};

SlicePair slice(const KernelProgram& program);

struct SliceCheck {
  bool pass = true;
  std::string detail;  // first divergence or the deadlock report
};

// Runs the original single-tile and the pair under rendezvous semantics on
// copies of the same initial memory; passes iff the final images match.
SliceCheck verify_slice_equivalence(const KernelProgram& program, const Bindings& inputs,
                                    const MemImage& initial);

}  // namespace tilesim
