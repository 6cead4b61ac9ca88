#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "tilesim/config.hpp"
#include "tilesim/ddg.hpp"
#include "tilesim/mao.hpp"
#include "tilesim/trace.hpp"

namespace tilesim {

struct TraceMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AccelCost {
  double time_s = 0.0;
  double energy_j = 0.0;
};

// What a core tile needs from the surrounding system. Implemented by the
// Interleaver; tests plug in stubs. All cycles are in the calling core's
// clock; the environment converts time bases.
class CoreEnv {
 public:
  virtual ~CoreEnv() = default;

  // Memory access; false = back-pressure (L1 MSHR full), retry next cycle.
  // The response arrives later via CoreTile::memory_response(gid).
  virtual bool mem_submit(int tile, uint64_t addr, bool is_write, uint64_t gid,
                          uint64_t cycle) = 0;

  // Enqueues a message on channel (src, dst). data_ready_cycle is when the
  // payload exists at the sender (UINT64_MAX = unknown yet, stamped later).
  // Returns false when the channel is full. On success *handle identifies the
  // message for stamp_message.
  virtual bool try_send(int src, int dst, uint64_t data_ready_cycle, uint64_t* handle) = 0;
  virtual void stamp_message(uint64_t handle, uint64_t data_ready_cycle) = 0;

  // Consumes the oldest available message on channel (src, dst); false when
  // none has reached the receiver yet.
  virtual bool try_recv(int src, int dst, uint64_t cycle) = 0;

  virtual AccelCost accel_cost(const AccelInvocation& inv) = 0;
};

// Graph-based core model. Launches dynamic basic blocks from the control
// trace, issues node instances under resource limits (width, window, FUs,
// MAO), and reports per-tile statistics.
class CoreTile {
 public:
  CoreTile(int tile_id, const StaticDDG& ddg, const DynamicTrace& trace,
           const CoreConfig& config, const LatencyTable& latency, CoreEnv& env);

  // Advances one core cycle; returns true if anything happened (launch,
  // issue, or completion). Cycles must be called in increasing order.
  bool step(uint64_t cycle);

  bool done() const;

  // Memory response for the access issued with this gid, in core cycles.
  void memory_response(uint64_t gid, uint64_t cycle);

  int tile_id() const { return tile_; }
  uint64_t instructions_completed() const { return completed_count_; }
  uint64_t last_activity_cycle() const { return last_activity_; }
  double energy() const { return energy_; }
  const CoreConfig& config() const { return cfg_; }

  // Names the oldest incomplete instruction, for deadlock diagnostics.
  std::string blocked_report() const;

 private:
  enum class St : uint8_t { Waiting, Issued, Completed };

  struct NodeInst {
    St state = St::Waiting;
    bool addr_resolved = false;
    bool terminal = false;       // terminal load: retires the MAO slot at issue
    uint32_t parents_left = 0;
    uint64_t address = 0;        // LOAD/STORE trace address
    bool is_write = false;
    int32_t peer = -1;           // SEND destination / RECV source
    int32_t accel_index = -1;    // index into trace.accel
    int32_t linked_load = -1;    // SEND fed by an in-block terminal load
    uint64_t data_cycle = UINT64_MAX;  // terminal load: memory arrival
    uint64_t msg_handle = UINT64_MAX;  // terminal load: pending message stamp
    std::vector<std::pair<uint64_t, uint32_t>> cross_dependents;  // (dbb idx, pos)
  };

  struct Provider {
    bool ready = true;  // parameter or otherwise dependency-free
    uint64_t dbb = 0;
    uint32_t pos = 0;
  };

  struct DBBInst {
    int block = -1;
    uint64_t first_gid = 0;
    uint64_t launch_cycle = 0;
    uint64_t term_completion = UINT64_MAX;
    uint32_t remaining = 0;
    std::vector<NodeInst> nodes;
    std::vector<Provider> input_providers;
  };

  struct Pending {
    uint64_t cycle, gid;
    bool operator>(const Pending& o) const {
      return std::tie(cycle, gid) > std::tie(o.cycle, o.gid);
    }
  };

  void process_completions(uint64_t cycle);
  void try_launch(uint64_t cycle);
  void launch_dbb(uint64_t cycle);
  void drain_mao_pending();
  void try_issue(uint64_t cycle);
  bool issue_one(uint64_t gid, uint64_t cycle);
  void complete_node(uint64_t gid, uint64_t cycle);
  void on_ready(DBBInst& dbb, uint32_t pos);
  NodeInst& inst(uint64_t gid);
  std::pair<uint64_t, uint32_t> locate(uint64_t gid) const;
  const Node& static_node(const DBBInst& dbb, uint32_t pos) const;
  uint64_t window_floor() const;
  // Launch eligibility for the next trace entry; UINT64_MAX = blocked.
  uint64_t next_eligible_cycle() const;

  int tile_;
  const StaticDDG& ddg_;
  const DynamicTrace& trace_;
  CoreConfig cfg_;
  const LatencyTable& latency_;
  CoreEnv& env_;
  MAO mao_;

  // Static helpers derived once: in-block children lists and terminal loads.
  std::vector<std::vector<std::vector<int>>> children_;  // [block][pos] -> consumers
  std::vector<bool> terminal_load_;                      // by static node id

  std::deque<DBBInst> dbbs_;
  std::vector<uint64_t> first_gids_;  // parallel to dbbs_, for gid lookup
  size_t next_ctrl_ = 0;
  size_t next_mem_ = 0;
  size_t next_comm_ = 0;
  size_t next_accel_ = 0;
  uint64_t next_gid_ = 0;

  std::set<uint64_t> ready_;        // waiting instances with zero parents left
  std::set<uint64_t> uncompleted_;  // launched, not yet completed
  std::deque<uint64_t> mao_pending_;  // memory gids awaiting a MAO slot
  std::priority_queue<Pending, std::vector<Pending>, std::greater<Pending>> timers_;
  std::map<Opclass, uint32_t> fu_busy_;

  uint64_t completed_count_ = 0;
  uint64_t last_activity_ = 0;
  double energy_ = 0.0;
  bool progressed_ = false;
};

}  // namespace tilesim
