#include "tilesim/memhier.hpp"

#include <algorithm>
#include <cassert>

namespace tilesim {

// ---------------------------------------------------------------- SimpleDRAM

void SimpleDRAM::submit(uint64_t line, uint64_t cycle, bool discard) {
  pending_.push({cycle + cfg_.min_latency, seq_++, line, discard});
  stats_.requests++;
  if (discard) stats_.writebacks++;
}

std::vector<uint64_t> SimpleDRAM::advance(uint64_t cycle) {
  uint64_t epoch = cycle / cfg_.epoch_length;
  if (epoch != cur_epoch_) {
    cur_epoch_ = epoch;
    used_this_epoch_ = 0;
  }
  std::vector<uint64_t> fills;
  bool stalled = false;
  while (!pending_.empty() && pending_.top().ready_cycle <= cycle) {
    if (used_this_epoch_ >= cfg_.max_per_epoch) {
      stalled = true;
      break;
    }
    Pending p = pending_.top();
    pending_.pop();
    used_this_epoch_++;
    stats_.completions++;
    if (!p.discard) fills.push_back(p.line);
  }
  if (stalled) stats_.bw_stalled_cycles++;
  return fills;
}

// ----------------------------------------------------------- StridePrefetcher

std::vector<uint64_t> StridePrefetcher::observe(uint64_t addr, uint32_t line_size) {
  tick_++;
  uint64_t stride = static_cast<uint64_t>(cfg_.stride_words) * 4;
  Tracker* hit = nullptr;
  for (auto& t : trackers_) {
    if (t.run > 0 && addr == t.last + stride) {
      t.last = addr;
      t.run++;
      t.tick = tick_;
      hit = &t;
      break;
    }
    if (t.run > 0 && addr == t.last) {
      t.tick = tick_;
      return {};  // repeated access, neither extends nor breaks the chain
    }
  }
  if (hit == nullptr) {
    Tracker* victim = &trackers_[0];
    for (auto& t : trackers_)
      if (t.tick < victim->tick) victim = &t;
    *victim = {addr, 1, tick_};
    return {};
  }
  if (hit->run < cfg_.detect_length) return {};
  std::vector<uint64_t> lines;
  uint64_t base = (addr & ~(uint64_t)(line_size - 1)) +
                  static_cast<uint64_t>(cfg_.distance) * line_size;
  for (uint32_t i = 0; i < cfg_.degree; ++i)
    lines.push_back(base + static_cast<uint64_t>(i) * line_size);
  return lines;
}

// ------------------------------------------------------------------ CacheArray

CacheArray::CacheArray(const CacheConfig& cfg) : cfg_(cfg) {
  sets_.assign(cfg_.num_sets(), std::vector<Line>(cfg_.assoc));
}

std::vector<CacheArray::Line>& CacheArray::set_of(uint64_t line) {
  return sets_[(line / cfg_.line_size) % sets_.size()];
}

CacheArray::Line* CacheArray::find(uint64_t line) {
  for (auto& l : set_of(line))
    if (l.valid && l.tag == line) return &l;
  return nullptr;
}

const CacheArray::Line* CacheArray::find(uint64_t line) const {
  return const_cast<CacheArray*>(this)->find(line);
}

bool CacheArray::lookup(uint64_t line, bool is_write, bool touch) {
  Line* l = find(line);
  if (!l) return false;
  if (touch) l->lru = ++lru_tick_;
  if (is_write) l->dirty = true;
  return true;
}

bool CacheArray::resident(uint64_t line) const { return find(line) != nullptr; }

void CacheArray::fill(uint64_t line, bool& evicted_valid, uint64_t& evicted_line,
                      bool& evicted_dirty) {
  assert(find(line) == nullptr && "filling a resident line");
  auto& set = set_of(line);
  Line* victim = &set[0];
  for (auto& l : set) {
    if (!l.valid) {
      victim = &l;
      break;
    }
    if (l.lru < victim->lru) victim = &l;
  }
  evicted_valid = victim->valid;
  evicted_line = victim->tag;
  evicted_dirty = victim->dirty;
  *victim = {line, true, false, false, ++lru_tick_};
}

void CacheArray::invalidate(uint64_t line, bool& was_dirty) {
  Line* l = find(line);
  was_dirty = l && l->dirty;
  if (l) l->valid = false;
}

void CacheArray::mark_dirty(uint64_t line) {
  if (Line* l = find(line)) l->dirty = true;
}

void CacheArray::mark_prefetched(uint64_t line) {
  if (Line* l = find(line)) l->prefetched = true;
}

bool CacheArray::consume_prefetched(uint64_t line) {
  Line* l = find(line);
  if (l && l->prefetched) {
    l->prefetched = false;
    return true;
  }
  return false;
}

std::vector<uint64_t> CacheArray::resident_lines() const {
  std::vector<uint64_t> out;
  for (const auto& set : sets_)
    for (const auto& l : set)
      if (l.valid) out.push_back(l.tag);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- MemorySystem

MemorySystem::MemorySystem(int num_tiles, const CacheConfig& l1, const CacheConfig& l2,
                           const DRAMConfig& dram, bool prefetch_enabled)
    : llc_(l2), dram_(dram), prefetch_enabled_(prefetch_enabled && l1.prefetch.enable) {
  for (int i = 0; i < num_tiles; ++i) {
    l1s_.emplace_back(l1);
    prefetchers_.emplace_back(l1.prefetch);
  }
  l1_mshrs_.resize(static_cast<size_t>(num_tiles));
  l1_stats_.resize(static_cast<size_t>(num_tiles));
}

void MemorySystem::schedule(uint64_t cycle, EvKind kind, uint64_t line, int tile,
                            MemOrigin origin) {
  events_.push({cycle, seq_++, kind, line, tile, origin});
}

bool MemorySystem::submit(int tile, uint64_t addr, bool is_write, MemOrigin origin,
                          uint64_t cycle) {
  auto t = static_cast<size_t>(tile);
  CacheArray& l1 = l1s_[t];
  CacheStats& st = l1_stats_[t];
  uint64_t line = l1.line_addr(addr);
  uint32_t lat = l1.config().latency;

  bool accepted;
  if (l1.lookup(line, is_write)) {
    st.hits++;
    if (l1.consume_prefetched(line)) st.prefetch_useful++;
    energy_ += l1.config().access_energy;
    schedule(cycle + lat, EvKind::Respond, line, tile, origin);
    accepted = true;
  } else if (auto it = l1_mshrs_[t].find(line); it != l1_mshrs_[t].end()) {
    it->second.waiters.push_back({origin, is_write});
    it->second.prefetch_only = false;
    st.coalesced++;
    accepted = true;
  } else if (l1_mshrs_[t].size() >= l1.config().mshr_entries) {
    st.mshr_stalls++;
    accepted = false;
  } else {
    st.misses++;
    energy_ += l1.config().access_energy;
    L1MshrEntry entry;
    entry.waiters.push_back({origin, is_write});
    entry.prefetch_only = false;
    l1_mshrs_[t].emplace(line, std::move(entry));
    schedule(cycle + lat, EvKind::LlcAccess, line, tile);
    accepted = true;
  }

  if (accepted && prefetch_enabled_)
    issue_prefetches(tile, prefetchers_[t].observe(addr, l1.config().line_size), cycle);
  return accepted;
}

void MemorySystem::issue_prefetches(int tile, const std::vector<uint64_t>& lines,
                                    uint64_t cycle) {
  auto t = static_cast<size_t>(tile);
  CacheArray& l1 = l1s_[t];
  for (uint64_t line : lines) {
    if (l1.resident(line)) continue;
    if (l1_mshrs_[t].count(line)) continue;
    if (l1_mshrs_[t].size() >= l1.config().mshr_entries) break;  // drop, never stall
    l1_mshrs_[t].emplace(line, L1MshrEntry{});
    l1_stats_[t].prefetch_issued++;
    schedule(cycle + l1.config().latency, EvKind::LlcAccess, line, tile);
  }
}

void MemorySystem::llc_access(uint64_t line, int tile, uint64_t cycle) {
  if (llc_.lookup(line, false)) {
    llc_stats_.hits++;
    energy_ += llc_.config().access_energy;
    schedule(cycle + llc_.config().latency, EvKind::L1Fill, line, tile);
    return;
  }
  if (auto it = llc_mshr_.find(line); it != llc_mshr_.end()) {
    auto& tiles = it->second.waiting_tiles;
    if (std::find(tiles.begin(), tiles.end(), tile) == tiles.end()) tiles.push_back(tile);
    llc_stats_.coalesced++;
    return;
  }
  if (llc_mshr_.size() >= llc_.config().mshr_entries) {
    // Back-pressure inside the hierarchy: retry next cycle.
    llc_stats_.mshr_stalls++;
    schedule(cycle + 1, EvKind::LlcAccess, line, tile);
    return;
  }
  llc_stats_.misses++;
  energy_ += llc_.config().access_energy;
  llc_mshr_.emplace(line, LlcMshrEntry{{tile}});
  dram_.submit(line, cycle + llc_.config().latency);
  energy_ += dram_.config().access_energy;
}

void MemorySystem::llc_fill(uint64_t line, uint64_t cycle) {
  bool ev_valid, ev_dirty;
  uint64_t ev_line;
  llc_.fill(line, ev_valid, ev_line, ev_dirty);
  if (ev_valid) {
    llc_stats_.evictions++;
    // Inclusive hierarchy: the evicted line must leave every L1 too. A dirty
    // L1 copy is the freshest data, so it goes straight to DRAM.
    bool dirty_above = false;
    for (size_t t = 0; t < l1s_.size(); ++t) {
      bool was_dirty;
      if (l1s_[t].resident(ev_line)) {
        l1s_[t].invalidate(ev_line, was_dirty);
        l1_stats_[t].back_invalidations++;
        dirty_above = dirty_above || was_dirty;
      }
    }
    if (ev_dirty || dirty_above) {
      llc_stats_.writebacks++;
      dram_.submit(ev_line, cycle, /*discard=*/true);
      energy_ += dram_.config().access_energy;
    }
  }
  auto it = llc_mshr_.find(line);
  assert(it != llc_mshr_.end());
  for (int tile : it->second.waiting_tiles)
    if (tile >= 0) schedule(cycle + llc_.config().latency, EvKind::L1Fill, line, tile);
  llc_mshr_.erase(it);
}

void MemorySystem::l1_fill(int tile, uint64_t line, uint64_t cycle) {
  auto t = static_cast<size_t>(tile);
  CacheArray& l1 = l1s_[t];
  bool ev_valid, ev_dirty;
  uint64_t ev_line;
  l1.fill(line, ev_valid, ev_line, ev_dirty);
  if (ev_valid && ev_dirty) {
    l1_stats_[t].writebacks++;
    if (llc_.resident(ev_line)) {
      llc_.mark_dirty(ev_line);
      llc_.lookup(ev_line, true);
    } else {
      // Only reachable if the LLC copy vanished while the writeback was in
      // flight; send the data home.
      dram_.submit(ev_line, cycle, /*discard=*/true);
    }
  }
  if (ev_valid) l1_stats_[t].evictions++;

  auto it = l1_mshrs_[t].find(line);
  assert(it != l1_mshrs_[t].end());
  if (it->second.prefetch_only) l1.mark_prefetched(line);
  for (const auto& w : it->second.waiters) {
    if (w.is_write) l1.mark_dirty(line);
    schedule(cycle + l1.config().latency, EvKind::Respond, line, tile, w.origin);
  }
  l1_mshrs_[t].erase(it);
}

void MemorySystem::handle(const Event& ev, std::vector<MemCompletion>& out) {
  switch (ev.kind) {
    case EvKind::LlcAccess:
      llc_access(ev.line, ev.tile, ev.cycle);
      break;
    case EvKind::L1Fill:
      l1_fill(ev.tile, ev.line, ev.cycle);
      break;
    case EvKind::Respond:
      out.push_back({ev.origin, ev.cycle});
      break;
  }
}

void MemorySystem::advance(uint64_t cycle, std::vector<MemCompletion>& out) {
  while (!events_.empty() && events_.top().cycle <= cycle) {
    Event ev = events_.top();
    events_.pop();
    handle(ev, out);
  }
  for (uint64_t line : dram_.advance(cycle)) llc_fill(line, cycle);
}

bool MemorySystem::idle() const {
  if (!events_.empty() || !dram_.idle() || !llc_mshr_.empty()) return false;
  for (const auto& m : l1_mshrs_)
    if (!m.empty()) return false;
  return true;
}

bool MemorySystem::check_inclusive() const {
  for (const auto& l1 : l1s_)
    for (uint64_t line : l1.resident_lines())
      if (!llc_.resident(line)) return false;
  return true;
}

}  // namespace tilesim
