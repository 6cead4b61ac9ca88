#pragma once

#include <cassert>
#include <cstdint>
#include <deque>

namespace tilesim {

// Memory Address Orderer. Enforces true memory dependencies over the
// program-order stream of loads and stores and doubles as the LSQ capacity
// model. Entries are inserted in dynamic program order (ascending global
// instruction id), checked at issue, and retired on completion.
class MAO {
 public:
  struct Entry {
    uint64_t gid = 0;  // global instruction id, the program-order index
    bool is_store = false;
    uint64_t address = 0;     // trace-known address
    bool resolved = false;    // address operands ready
    bool completed = false;
  };

  explicit MAO(uint32_t capacity, bool alias_speculation = false)
      : capacity_(capacity), speculate_(alias_speculation) {}

  uint32_t capacity() const { return capacity_; }
  size_t occupancy() const { return entries_.size(); }
  bool full() const { return entries_.size() >= capacity_; }

  // Appends in program order; returns false when full. Out-of-order
  // insertion is an internal error.
  bool insert(uint64_t gid, bool is_store, uint64_t trace_address);

  bool contains(uint64_t gid) const { return find(gid) != nullptr; }

  // Marks the entry's address operands ready.
  void resolve(uint64_t gid);

  // May the memory op issue? Stores require no incomplete older access with a
  // matching or unresolved address; loads only check older stores. With
  // alias speculation, unresolved addresses are tested using their
  // trace-known values instead of conservatively conflicting.
  bool check(uint64_t gid) const;

  // Marks the entry completed (memory response arrived).
  void complete(uint64_t gid);

  // Frees the slot; the entry must be completed.
  void retire(uint64_t gid);

  // Drops an entry regardless of completion (terminal loads retire at issue).
  void erase(uint64_t gid);

 private:
  const Entry* find(uint64_t gid) const;
  Entry* find(uint64_t gid);

  uint32_t capacity_;
  bool speculate_;
  std::deque<Entry> entries_;  // ascending gid
};

}  // namespace tilesim
