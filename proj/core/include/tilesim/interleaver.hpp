#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "tilesim/accel.hpp"
#include "tilesim/config.hpp"
#include "tilesim/core_tile.hpp"
#include "tilesim/ddg.hpp"
#include "tilesim/memhier.hpp"
#include "tilesim/stats.hpp"
#include "tilesim/trace.hpp"

namespace tilesim {

struct SimDeadlock : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Composes core tiles, the shared memory hierarchy, and the message channels
// into one system and advances everything on a femtosecond time base. Ties
// are broken memory-first, then by ascending tile id, so runs are
// deterministic.
class Interleaver final : public CoreEnv {
 public:
  explicit Interleaver(const SystemConfig& config, AccelLibrary accel_models = {});

  // Tiles are numbered in the order they are added. core_config lets callers
  // override the config's [core] section per tile (DAE pairs).
  int add_core(const StaticDDG& ddg, const DynamicTrace& trace);
  int add_core(const StaticDDG& ddg, const DynamicTrace& trace,
               const CoreConfig& core_config);

  // Test-mode event log: `t=<fs> tile=<id> ev=<kind> ...` per event.
  void set_event_log(std::ostream* log) { log_ = log; }

  // Advances until every tile drains; throws SimDeadlock (with per-tile
  // blocked-instruction reports) if nothing can progress.
  SimStats run();

  // CoreEnv (called by core tiles during their step).
  bool mem_submit(int tile, uint64_t addr, bool is_write, uint64_t gid,
                  uint64_t cycle) override;
  bool try_send(int src, int dst, uint64_t data_ready_cycle, uint64_t* handle) override;
  void stamp_message(uint64_t handle, uint64_t data_ready_cycle) override;
  bool try_recv(int src, int dst, uint64_t cycle) override;
  AccelCost accel_cost(const AccelInvocation& inv) override;

  const MemorySystem& memory() const { return *mem_; }

 private:
  struct Msg {
    int src = 0, dst = 0;
    uint64_t ready_fs = UINT64_MAX;
  };
  struct Tick {
    uint64_t fs;
    int tier;  // 0 = memory, 1 = tiles
    int id;
    bool operator>(const Tick& o) const {
      return std::tie(fs, tier, id) > std::tie(o.fs, o.tier, o.id);
    }
  };

  void build_memory();
  void log(int tile, const std::string& kind, const std::string& detail);

  SystemConfig cfg_;
  AccelLibrary accel_models_;
  std::vector<std::unique_ptr<CoreTile>> cores_;
  std::vector<uint64_t> period_fs_;  // per tile
  uint64_t mem_period_fs_;
  std::unique_ptr<MemorySystem> mem_;

  std::map<std::pair<int, int>, std::deque<uint64_t>> channels_;  // msg ids, FIFO
  std::vector<Msg> messages_;

  std::priority_queue<Tick, std::vector<Tick>, std::greater<Tick>> ticks_;
  uint64_t now_fs_ = 0;
  uint64_t mem_cycle_ = 0;
  std::ostream* log_ = nullptr;
};

}  // namespace tilesim
