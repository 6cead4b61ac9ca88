#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tilesim/config.hpp"
#include "tilesim/trace.hpp"

namespace tilesim {

struct AccelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Back-annotated model of a loosely-coupled, pipelined, fixed-function
// accelerator: concurrent processes, each a nest of loops with a measured
// per-iteration latency.
struct AccelModelParams {
  std::string model_id;
  std::vector<std::vector<uint32_t>> loop_latency;  // [process][loop], cycles
  double avg_power = 0.0;                           // watts per instance
  double freq_hz = 1e9;
  double max_bandwidth = 0.0;  // bytes/sec shared across instances; 0 = unlimited
  uint64_t invocation_overhead = 0;  // fixed cycles per invocation

  void check() const;
};

struct AccelResult {
  uint64_t cycles = 0;
  double time = 0.0;  // seconds
  uint64_t bytes = 0;
  double energy = 0.0;  // joules, all instances
  bool bandwidth_limited = false;
};

// Closed-form estimate: bottleneck-process total plus a one-iteration fill
// term per non-bottleneck process, stretched to the bandwidth-imposed time
// when bytes dominate.
AccelResult accel_estimate(const AccelModelParams& params, const AccelInvocation& inv);

// Relaxed-resource core configuration used as a pre-RTL accelerator estimate.
struct PreRtlKnobs {
  uint32_t live_dbb_limit = 0;  // 0 = unlimited
  uint32_t window_size = 0;     // 0 = keep base
  std::map<Opclass, uint32_t> fu_counts;
};
CoreConfig prertl_config(const CoreConfig& base, const PreRtlKnobs& knobs);

// Model library file: `model <id>` sections with `process <i>: loop <j>
// latency=<cycles>` lines plus power/freq/max_bandwidth/overhead keys.
using AccelLibrary = std::map<std::string, AccelModelParams>;
AccelLibrary parse_accel_models(const std::string& text,
                                const std::string& origin = "<string>");
AccelLibrary load_accel_models(const std::string& path);

}  // namespace tilesim
