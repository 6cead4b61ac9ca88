#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

#include "tilesim/config.hpp"

namespace tilesim {

struct MemOrigin {
  int tile = -1;
  uint64_t token = 0;  // requester-defined (node-instance handle)
};

struct MemCompletion {
  MemOrigin origin;
  uint64_t cycle = 0;  // memory-clock cycle of completion
};

// Minimum-latency, epoch-bandwidth DRAM. Requests are keyed by
// submit_cycle + min_latency in a priority queue; advance() returns as many
// ready requests as the current epoch's budget allows.
class SimpleDRAM {
 public:
  explicit SimpleDRAM(const DRAMConfig& cfg) : cfg_(cfg) {}

  struct Stats {
    uint64_t requests = 0;
    uint64_t writebacks = 0;
    uint64_t completions = 0;
    uint64_t bw_stalled_cycles = 0;  // cycles a ready request waited on the epoch budget
  };

  // discard=true for writebacks: they consume bandwidth but produce no fill.
  void submit(uint64_t line, uint64_t cycle, bool discard = false);
  // Completes ready requests for this cycle; fills returned as line addresses.
  std::vector<uint64_t> advance(uint64_t cycle);

  bool idle() const { return pending_.empty(); }
  const Stats& stats() const { return stats_; }
  const DRAMConfig& config() const { return cfg_; }

 private:
  struct Pending {
    uint64_t ready_cycle;
    uint64_t seq;
    uint64_t line;
    bool discard;
    bool operator>(const Pending& o) const {
      return std::tie(ready_cycle, seq) > std::tie(o.ready_cycle, o.seq);
    }
  };

  DRAMConfig cfg_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<Pending>> pending_;
  uint64_t seq_ = 0;
  uint64_t cur_epoch_ = UINT64_MAX;
  uint32_t used_this_epoch_ = 0;
  Stats stats_;
};

// Streaming stride prefetcher: detects chains of accesses k words apart and
// issues `degree` line prefetches `distance` lines beyond the last access.
class StridePrefetcher {
 public:
  explicit StridePrefetcher(const PrefetchConfig& cfg) : cfg_(cfg) {}

  // Returns the line addresses to prefetch for this demand access.
  std::vector<uint64_t> observe(uint64_t addr, uint32_t line_size);

 private:
  struct Tracker {
    uint64_t last = 0;
    uint32_t run = 0;
    uint64_t tick = 0;
  };
  PrefetchConfig cfg_;
  std::vector<Tracker> trackers_ = std::vector<Tracker>(8);
  uint64_t tick_ = 0;
};

struct CacheStats {
  uint64_t hits = 0;
  uint64_t misses = 0;
  uint64_t coalesced = 0;
  uint64_t writebacks = 0;
  uint64_t evictions = 0;
  uint64_t back_invalidations = 0;
  uint64_t mshr_stalls = 0;
  uint64_t prefetch_issued = 0;
  uint64_t prefetch_useful = 0;
};

// Tag-only set-associative cache with LRU replacement, a dirty bit per line,
// and an MSHR map. Timing lives in MemorySystem; this class is the state.
class CacheArray {
 public:
  explicit CacheArray(const CacheConfig& cfg);

  struct Line {
    uint64_t tag = 0;
    bool valid = false;
    bool dirty = false;
    bool prefetched = false;
    uint64_t lru = 0;
  };

  uint64_t line_addr(uint64_t addr) const { return addr & ~(uint64_t)(cfg_.line_size - 1); }
  bool lookup(uint64_t line, bool is_write, bool touch = true);
  bool resident(uint64_t line) const;
  // Installs `line`; returns the evicted line via out-params.
  void fill(uint64_t line, bool& evicted_valid, uint64_t& evicted_line, bool& evicted_dirty);
  void invalidate(uint64_t line, bool& was_dirty);
  void mark_dirty(uint64_t line);
  void mark_prefetched(uint64_t line);
  // Clears the prefetched bit; returns true if it was set (a useful prefetch).
  bool consume_prefetched(uint64_t line);
  std::vector<uint64_t> resident_lines() const;

  const CacheConfig& config() const { return cfg_; }

 private:
  Line* find(uint64_t line);
  const Line* find(uint64_t line) const;
  std::vector<Line>& set_of(uint64_t line);

  CacheConfig cfg_;
  std::vector<std::vector<Line>> sets_;
  uint64_t lru_tick_ = 0;
};

// Private L1 per tile, one shared inclusive LLC, SimpleDRAM behind it.
// Write-back, write-allocate. Advanced one memory-clock cycle at a time.
class MemorySystem {
 public:
  MemorySystem(int num_tiles, const CacheConfig& l1, const CacheConfig& l2,
               const DRAMConfig& dram, bool prefetch_enabled = true);

  // Demand access from a tile. Returns false when the L1 MSHR is full (the
  // core keeps the instruction in issued-waiting state and retries).
  bool submit(int tile, uint64_t addr, bool is_write, MemOrigin origin, uint64_t cycle);

  // Processes one memory cycle; appends completions to `out`.
  void advance(uint64_t cycle, std::vector<MemCompletion>& out);

  bool idle() const;
  double energy() const { return energy_; }

  const CacheStats& l1_stats(int tile) const { return l1_stats_[static_cast<size_t>(tile)]; }
  const CacheStats& llc_stats() const { return llc_stats_; }
  const SimpleDRAM::Stats& dram_stats() const { return dram_.stats(); }

  // Test hooks.
  const CacheArray& l1_array(int tile) const { return l1s_[static_cast<size_t>(tile)]; }
  const CacheArray& llc_array() const { return llc_; }
  bool check_inclusive() const;

 private:
  enum class EvKind { LlcAccess, L1Fill, Respond };
  struct Event {
    uint64_t cycle;
    uint64_t seq;
    EvKind kind;
    uint64_t line = 0;
    int tile = -1;          // upstream L1 for LlcAccess/L1Fill
    MemOrigin origin;       // for Respond
    bool operator>(const Event& o) const {
      return std::tie(cycle, seq) > std::tie(o.cycle, o.seq);
    }
  };

  struct L1MshrEntry {
    struct Waiter {
      MemOrigin origin;
      bool is_write;
    };
    std::vector<Waiter> waiters;
    bool prefetch_only = true;
  };
  struct LlcMshrEntry {
    std::vector<int> waiting_tiles;  // -1 for an LLC-level prefetch
  };

  void schedule(uint64_t cycle, EvKind kind, uint64_t line, int tile,
                MemOrigin origin = {});
  void handle(const Event& ev, std::vector<MemCompletion>& out);
  void llc_access(uint64_t line, int tile, uint64_t cycle);
  void llc_fill(uint64_t line, uint64_t cycle);
  void l1_fill(int tile, uint64_t line, uint64_t cycle);
  void issue_prefetches(int tile, const std::vector<uint64_t>& lines, uint64_t cycle);

  std::vector<CacheArray> l1s_;
  CacheArray llc_;
  SimpleDRAM dram_;
  std::vector<StridePrefetcher> prefetchers_;
  bool prefetch_enabled_;

  std::vector<std::map<uint64_t, L1MshrEntry>> l1_mshrs_;
  std::map<uint64_t, LlcMshrEntry> llc_mshr_;

  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;
  uint64_t seq_ = 0;
  std::vector<CacheStats> l1_stats_;
  CacheStats llc_stats_;
  double energy_ = 0.0;
};

}  // namespace tilesim
