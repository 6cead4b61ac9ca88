#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tilesim/ir.hpp"

namespace tilesim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BranchMode {
  None,     // launch gated by predecessor terminator completion
  Perfect,  // speculative launch, never mispredicts
  Static,   // BTFNT speculation with a misprediction penalty
};

constexpr uint32_t kUnlimitedFUs = 0xffffffffu;

struct CoreConfig {
  uint32_t issue_width = 4;
  uint32_t window_size = 128;   // instruction window / ROB
  uint32_t lsq_size = 128;      // MAO capacity
  uint32_t live_dbb_limit = 0;  // per static block; 0 = unlimited
  std::map<Opclass, uint32_t> fu_counts;  // absent = unlimited
  uint64_t freq_hz = 2000000000;
  BranchMode branch_mode = BranchMode::None;
  uint32_t misprediction_latency = 5;
  bool alias_speculation = false;
  // DAE access cores: loads feeding only a SEND complete for dataflow
  // purposes at issue; the value is forwarded when memory responds.
  bool terminal_loads = false;

  void check() const;
};

struct CostEntry {
  uint32_t latency = 1;
  double energy = 0.0;
};

// Fixed per-opclass costs; LOAD/STORE/ACCEL_INVOKE are dynamic (costed by the
// memory hierarchy / accelerator model).
struct LatencyTable {
  std::map<Opclass, CostEntry> entries;

  static LatencyTable defaults();
  bool is_dynamic(Opclass op) const;
  // Returns the fixed cost; throws ConfigError on a missing entry.
  CostEntry cost(Opclass op) const;
};

struct PrefetchConfig {
  bool enable = true;
  uint32_t stride_words = 2;   // k, in 4-byte words
  uint32_t detect_length = 3;  // accesses in a chain before triggering
  uint32_t degree = 4;         // lines per trigger
  uint32_t distance = 4;       // lines ahead of the triggering access
};

struct CacheConfig {
  uint64_t size = 32768;
  uint32_t line_size = 64;
  uint32_t assoc = 8;
  uint32_t latency = 1;
  uint32_t mshr_entries = 16;
  double access_energy = 0.0;
  PrefetchConfig prefetch;

  void check(const std::string& which) const;
  uint64_t num_sets() const { return size / (static_cast<uint64_t>(line_size) * assoc); }
};

struct DRAMConfig {
  uint32_t min_latency = 200;
  uint32_t epoch_length = 100;
  uint32_t max_per_epoch = 32;
  double access_energy = 0.0;

  void check() const;
};

struct MsgConfig {
  uint32_t capacity = 512;
  uint32_t latency = 1;  // cycles, in the receiving tile's clock
};

struct SystemConfig {
  CoreConfig core;
  CacheConfig l1;
  CacheConfig l2{2 * 1024 * 1024, 64, 8, 6, 32, 0.0, {.enable = false}};
  DRAMConfig dram;
  MsgConfig msg;
  LatencyTable latency = LatencyTable::defaults();
  uint64_t mem_freq_hz = 2000000000;
  uint64_t seed = 42;

  void check() const;
};

// Loads the sectioned key=value config format. Unknown keys, missing
// sections referenced by values, and invariant violations raise ConfigError
// with file/line information.
SystemConfig load_config(const std::string& path);
SystemConfig parse_config(const std::string& text, const std::string& origin = "<string>");

// Applies a single "section.key=value" override (the CLI --set flag).
void apply_override(SystemConfig& cfg, const std::string& spec);

}  // namespace tilesim
