#include "tilesim/stats.hpp"

#include <ostream>

namespace tilesim {

namespace {

template <typename Fn>
void each_cache_counter(const CacheStats& c, Fn fn) {
  fn("hits", c.hits);
  fn("misses", c.misses);
  fn("coalesced", c.coalesced);
  fn("writebacks", c.writebacks);
  fn("evictions", c.evictions);
  fn("back_invalidations", c.back_invalidations);
  fn("mshr_stalls", c.mshr_stalls);
  fn("prefetch_issued", c.prefetch_issued);
  fn("prefetch_useful", c.prefetch_useful);
}

}  // namespace

void emit_stats_text(std::ostream& out, const SimStats& s) {
  for (const auto& t : s.tiles) {
    out << "tile " << t.tile << ":\n";
    out << "  cycles       " << t.cycles << "\n";
    out << "  instructions " << t.instructions << "\n";
    out << "  ipc          " << t.ipc << "\n";
    out << "  energy_j     " << t.energy << "\n";
    each_cache_counter(t.l1, [&](const char* name, uint64_t v) {
      out << "  l1." << name << " " << v << "\n";
    });
  }
  out << "llc:\n";
  each_cache_counter(s.llc, [&](const char* name, uint64_t v) {
    out << "  " << name << " " << v << "\n";
  });
  out << "dram:\n";
  out << "  requests " << s.dram.requests << "\n";
  out << "  writebacks " << s.dram.writebacks << "\n";
  out << "  completions " << s.dram.completions << "\n";
  out << "  bw_stalled_cycles " << s.dram.bw_stalled_cycles << "\n";
  out << "global:\n";
  out << "  cycles " << s.global_cycles << "\n";
  out << "  time_s " << s.time_s << "\n";
  out << "  memory_energy_j " << s.memory_energy << "\n";
  out << "  total_energy_j " << s.total_energy << "\n";
  out << "  edp " << s.edp << "\n";
}

void emit_stats_csv(std::ostream& out, const SimStats& s) {
  out << "scope,id,counter,value\n";
  for (const auto& t : s.tiles) {
    out << "tile," << t.tile << ",cycles," << t.cycles << "\n";
    out << "tile," << t.tile << ",instructions," << t.instructions << "\n";
    out << "tile," << t.tile << ",ipc," << t.ipc << "\n";
    out << "tile," << t.tile << ",energy_j," << t.energy << "\n";
    each_cache_counter(t.l1, [&](const char* name, uint64_t v) {
      out << "tile," << t.tile << ",l1." << name << "," << v << "\n";
    });
  }
  each_cache_counter(s.llc, [&](const char* name, uint64_t v) {
    out << "llc,0," << name << "," << v << "\n";
  });
  out << "dram,0,requests," << s.dram.requests << "\n";
  out << "dram,0,writebacks," << s.dram.writebacks << "\n";
  out << "dram,0,completions," << s.dram.completions << "\n";
  out << "dram,0,bw_stalled_cycles," << s.dram.bw_stalled_cycles << "\n";
  out << "global,0,cycles," << s.global_cycles << "\n";
  out << "global,0,time_s," << s.time_s << "\n";
  out << "global,0,memory_energy_j," << s.memory_energy << "\n";
  out << "global,0,total_energy_j," << s.total_energy << "\n";
  out << "global,0,edp," << s.edp << "\n";
}

}  // namespace tilesim
