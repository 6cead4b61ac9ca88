#include "tilesim/mao.hpp"

namespace tilesim {

bool MAO::insert(uint64_t gid, bool is_store, uint64_t trace_address) {
  if (full()) return false;
  assert(entries_.empty() || entries_.back().gid < gid);
  entries_.push_back({gid, is_store, trace_address, false, false});
  return true;
}

void MAO::resolve(uint64_t gid) {
  if (Entry* e = find(gid)) e->resolved = true;
}

bool MAO::check(uint64_t gid) const {
  const Entry* self = find(gid);
  assert(self != nullptr);
  for (const Entry& older : entries_) {
    if (older.gid >= gid) break;
    if (older.completed) continue;
    if (!self->is_store && !older.is_store) continue;  // loads never conflict with loads
    bool conflict;
    if (older.resolved || speculate_) {
      // With perfect alias speculation the trace address stands in for an
      // unresolved one, so only true aliases conflict.
      conflict = older.address == self->address;
    } else {
      conflict = true;  // unresolved older address: conservative
    }
    if (conflict) return false;
  }
  return true;
}

void MAO::complete(uint64_t gid) {
  Entry* e = find(gid);
  assert(e != nullptr);
  e->completed = true;
}

void MAO::retire(uint64_t gid) {
  Entry* e = find(gid);
  assert(e != nullptr && e->completed);
  erase(gid);
}

void MAO::erase(uint64_t gid) {
  for (auto it = entries_.begin(); it != entries_.end(); ++it)
    if (it->gid == gid) {
      entries_.erase(it);
      return;
    }
  assert(false && "erasing a MAO entry that is not present");
}

const MAO::Entry* MAO::find(uint64_t gid) const {
  for (const auto& e : entries_)
    if (e.gid == gid) return &e;
  return nullptr;
}

MAO::Entry* MAO::find(uint64_t gid) {
  for (auto& e : entries_)
    if (e.gid == gid) return &e;
  return nullptr;
}

}  // namespace tilesim
