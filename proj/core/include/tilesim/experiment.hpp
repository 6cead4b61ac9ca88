#pragma once

#include <ostream>
#include <string>

#include "tilesim/accel.hpp"
#include "tilesim/config.hpp"
#include "tilesim/interleaver.hpp"
#include "tilesim/interp.hpp"
#include "tilesim/ir.hpp"
#include "tilesim/stats.hpp"

namespace tilesim {

struct RunOptions {
  int tiles = 1;        // logical tiles (a DAE pair counts as one)
  bool dae = false;     // slice the kernel and run access/execute pairs
  std::ostream* event_log = nullptr;
};

// End-to-end composition: build the DDG, interpret for traces (SPMD over
// `tiles`, or 2x tiles of sliced programs under --dae), then simulate.
// `image` is mutated by trace generation. Access-side cores run with
// terminal loads enabled.
SimStats run_experiment(const KernelProgram& kernel, const Bindings& params,
                        MemImage& image, const SystemConfig& config,
                        const AccelLibrary& accel, const RunOptions& opts);

}  // namespace tilesim
