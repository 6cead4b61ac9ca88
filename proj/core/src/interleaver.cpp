#include "tilesim/interleaver.hpp"

#include <cmath>
#include <sstream>

namespace tilesim {

namespace {
uint64_t period_of(uint64_t freq_hz) {
  return static_cast<uint64_t>(std::llround(1e15 / static_cast<double>(freq_hz)));
}
}  // namespace

Interleaver::Interleaver(const SystemConfig& config, AccelLibrary accel_models)
    : cfg_(config), accel_models_(std::move(accel_models)) {
  cfg_.check();
  mem_period_fs_ = period_of(cfg_.mem_freq_hz);
}

int Interleaver::add_core(const StaticDDG& ddg, const DynamicTrace& trace) {
  return add_core(ddg, trace, cfg_.core);
}

int Interleaver::add_core(const StaticDDG& ddg, const DynamicTrace& trace,
                          const CoreConfig& core_config) {
  int id = static_cast<int>(cores_.size());
  cores_.push_back(
      std::make_unique<CoreTile>(id, ddg, trace, core_config, cfg_.latency, *this));
  period_fs_.push_back(period_of(core_config.freq_hz));
  return id;
}

void Interleaver::log(int tile, const std::string& kind, const std::string& detail) {
  if (!log_) return;
  *log_ << "t=" << now_fs_ << " tile=" << tile << " ev=" << kind;
  if (!detail.empty()) *log_ << " " << detail;
  *log_ << "\n";
}

bool Interleaver::mem_submit(int tile, uint64_t addr, bool is_write, uint64_t gid,
                             uint64_t cycle) {
  (void)cycle;
  uint64_t mem_cycle = now_fs_ / mem_period_fs_;
  return mem_->submit(tile, addr, is_write, {tile, gid}, mem_cycle);
}

bool Interleaver::try_send(int src, int dst, uint64_t data_ready_cycle, uint64_t* handle) {
  auto& ch = channels_[{src, dst}];
  if (ch.size() >= cfg_.msg.capacity) return false;
  Msg m;
  m.src = src;
  m.dst = dst;
  if (data_ready_cycle != UINT64_MAX)
    m.ready_fs = data_ready_cycle * period_fs_[static_cast<size_t>(src)] +
                 static_cast<uint64_t>(cfg_.msg.latency) *
                     period_fs_[static_cast<size_t>(dst)];
  uint64_t id = messages_.size();
  messages_.push_back(m);
  ch.push_back(id);
  *handle = id;
  log(src, "send", "dst=" + std::to_string(dst));
  return true;
}

void Interleaver::stamp_message(uint64_t handle, uint64_t data_ready_cycle) {
  Msg& m = messages_[handle];
  m.ready_fs = data_ready_cycle * period_fs_[static_cast<size_t>(m.src)] +
               static_cast<uint64_t>(cfg_.msg.latency) *
                   period_fs_[static_cast<size_t>(m.dst)];
  log(m.src, "stamp", "dst=" + std::to_string(m.dst));
}

bool Interleaver::try_recv(int src, int dst, uint64_t cycle) {
  (void)cycle;
  auto it = channels_.find({src, dst});
  if (it == channels_.end() || it->second.empty()) return false;
  // FIFO per channel: the head gates everything behind it.
  uint64_t id = it->second.front();
  if (messages_[id].ready_fs > now_fs_) return false;
  it->second.pop_front();
  log(dst, "recv", "src=" + std::to_string(src));
  return true;
}

AccelCost Interleaver::accel_cost(const AccelInvocation& inv) {
  auto it = accel_models_.find(inv.model_id);
  if (it == accel_models_.end())
    throw AccelError("no accelerator model named '" + inv.model_id + "'");
  AccelResult r = accel_estimate(it->second, inv);
  return {r.time, r.energy};
}

SimStats Interleaver::run() {
  mem_ = std::make_unique<MemorySystem>(static_cast<int>(cores_.size()), cfg_.l1,
                                        cfg_.l2, cfg_.dram,
                                        cfg_.l1.prefetch.enable);
  ticks_ = {};
  now_fs_ = 0;
  mem_cycle_ = 0;
  ticks_.push({0, 0, -1});  // memory
  std::vector<uint64_t> core_cycle(cores_.size(), 0);
  for (size_t i = 0; i < cores_.size(); ++i)
    ticks_.push({0, 1, static_cast<int>(i)});

  uint64_t max_period = mem_period_fs_;
  for (uint64_t p : period_fs_) max_period = std::max(max_period, p);
  const uint64_t watchdog_fs =
      4 * static_cast<uint64_t>(cfg_.dram.min_latency + cfg_.dram.epoch_length + 10000) *
      max_period;
  uint64_t last_progress_fs = 0;

  std::vector<MemCompletion> completions;
  while (!ticks_.empty()) {
    bool all_done = mem_->idle();
    for (const auto& c : cores_) all_done = all_done && c->done();
    if (all_done) break;

    Tick t = ticks_.top();
    ticks_.pop();
    now_fs_ = t.fs;

    bool progressed = false;
    if (t.tier == 0) {
      completions.clear();
      mem_->advance(mem_cycle_, completions);
      for (const auto& c : completions) {
        // Visible to the core at its first tick at or after now.
        uint64_t cc = (now_fs_ + period_fs_[static_cast<size_t>(c.origin.tile)] - 1) /
                      period_fs_[static_cast<size_t>(c.origin.tile)];
        cores_[static_cast<size_t>(c.origin.tile)]->memory_response(c.origin.token, cc);
        log(c.origin.tile, "mem", "gid=" + std::to_string(c.origin.token));
      }
      progressed = !completions.empty() || !mem_->idle();
      mem_cycle_++;
      ticks_.push({t.fs + mem_period_fs_, 0, -1});
    } else {
      auto i = static_cast<size_t>(t.id);
      if (!cores_[i]->done()) {
        progressed = cores_[i]->step(core_cycle[i]);
        core_cycle[i]++;
        ticks_.push({t.fs + period_fs_[i], 1, t.id});
      }
    }

    if (progressed) last_progress_fs = now_fs_;
    if (now_fs_ - last_progress_fs > watchdog_fs) {
      std::ostringstream os;
      os << "simulation deadlock at t=" << now_fs_ << "fs;";
      for (const auto& c : cores_) os << " " << c->blocked_report() << ";";
      throw SimDeadlock(os.str());
    }
  }

  SimStats s;
  uint64_t finish_fs = 0;
  for (size_t i = 0; i < cores_.size(); ++i) {
    TileStats ts;
    ts.tile = static_cast<int>(i);
    ts.cycles = cores_[i]->last_activity_cycle();
    ts.instructions = cores_[i]->instructions_completed();
    ts.ipc = ts.cycles ? static_cast<double>(ts.instructions) /
                             static_cast<double>(ts.cycles)
                       : 0.0;
    ts.energy = cores_[i]->energy();
    ts.l1 = mem_->l1_stats(static_cast<int>(i));
    s.tiles.push_back(ts);
    s.global_cycles = std::max(s.global_cycles, ts.cycles);
    s.total_energy += ts.energy;
    finish_fs = std::max(finish_fs, ts.cycles * period_fs_[i]);
  }
  s.llc = mem_->llc_stats();
  s.dram = mem_->dram_stats();
  s.memory_energy = mem_->energy();
  s.total_energy += s.memory_energy;
  s.time_s = static_cast<double>(finish_fs) * 1e-15;
  s.edp = s.total_energy * s.time_s;
  return s;
}

}  // namespace tilesim
