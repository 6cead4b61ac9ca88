#include "tilesim/core_tile.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace tilesim {

CoreTile::CoreTile(int tile_id, const StaticDDG& ddg, const DynamicTrace& trace,
                   const CoreConfig& config, const LatencyTable& latency, CoreEnv& env)
    : tile_(tile_id),
      ddg_(ddg),
      trace_(trace),
      cfg_(config),
      latency_(latency),
      env_(env),
      mao_(config.lsq_size, config.alias_speculation) {
  cfg_.check();
  const KernelProgram& prog = *ddg_.program;

  children_.resize(prog.blocks.size());
  for (size_t b = 0; b < prog.blocks.size(); ++b) {
    const auto& parents = ddg_.block_deps[b].parents;
    children_[b].resize(parents.size());
    for (size_t i = 0; i < parents.size(); ++i)
      for (int p : parents[i]) children_[b][static_cast<size_t>(p)].push_back(static_cast<int>(i));
  }

  // Terminal loads: LOADs whose every consumer is a SEND in the same block.
  // They free their MAO slot at issue and forward the value when it arrives.
  terminal_load_.assign(static_cast<size_t>(prog.num_nodes()), false);
  if (cfg_.terminal_loads) {
    std::vector<std::vector<int>> consumers(terminal_load_.size());
    for (auto [p, c] : ddg_.data_edges) consumers[static_cast<size_t>(p)].push_back(c);
    for (const auto& blk : prog.blocks)
      for (const auto& n : blk.nodes) {
        if (n.op != Opclass::LOAD) continue;
        const auto& cs = consumers[static_cast<size_t>(n.id)];
        bool terminal = !cs.empty();
        for (int c : cs) {
          const Node* cn = prog.node_by_id(c);
          terminal = terminal && cn && cn->op == Opclass::SEND && cn->block == n.block;
        }
        terminal_load_[static_cast<size_t>(n.id)] = terminal;
      }
  }
}

CoreTile::NodeInst& CoreTile::inst(uint64_t gid) {
  auto [di, pos] = locate(gid);
  return dbbs_[di].nodes[pos];
}

std::pair<uint64_t, uint32_t> CoreTile::locate(uint64_t gid) const {
  auto it = std::upper_bound(first_gids_.begin(), first_gids_.end(), gid);
  assert(it != first_gids_.begin());
  size_t di = static_cast<size_t>(it - first_gids_.begin()) - 1;
  return {di, static_cast<uint32_t>(gid - first_gids_[di])};
}

const Node& CoreTile::static_node(const DBBInst& dbb, uint32_t pos) const {
  return ddg_.program->block(dbb.block).nodes[pos];
}

uint64_t CoreTile::window_floor() const {
  return uncompleted_.empty() ? next_gid_ : *uncompleted_.begin();
}

uint64_t CoreTile::next_eligible_cycle() const {
  if (next_ctrl_ >= trace_.ctrl.size()) return UINT64_MAX;
  if (next_ctrl_ == 0) return 0;
  int b = static_cast<int>(trace_.ctrl[next_ctrl_]);
  const DBBInst& pred = dbbs_.back();
  const Node& term = ddg_.program->block(pred.block).nodes.back();
  bool found = false;
  for (const auto& t : term.targets) found = found || t.block == b;
  if (!found)
    throw TraceMismatch("tile " + std::to_string(tile_) + ": trace enters block " +
                        std::to_string(b) + " with no control edge from node " +
                        std::to_string(term.id));
  switch (cfg_.branch_mode) {
    case BranchMode::None:
      return pred.term_completion;  // UINT64_MAX while pending
    case BranchMode::Perfect:
      return pred.launch_cycle + 1;
    case BranchMode::Static: {
      bool correct = true;
      if (term.op == Opclass::COND_BRANCH) {
        // Backward-taken/forward-not-taken on block ids.
        int predicted = term.targets[0].block <= pred.block ? term.targets[0].block
                                                            : term.targets[1].block;
        correct = predicted == b;
      }
      if (correct) return pred.launch_cycle + 1;
      if (pred.term_completion == UINT64_MAX) return UINT64_MAX;
      return pred.term_completion + cfg_.misprediction_latency;
    }
  }
  return UINT64_MAX;
}

void CoreTile::try_launch(uint64_t cycle) {
  while (next_ctrl_ < trace_.ctrl.size()) {
    uint64_t eligible = next_eligible_cycle();
    if (eligible > cycle) break;
    int b = static_cast<int>(trace_.ctrl[next_ctrl_]);
    if (cfg_.live_dbb_limit > 0) {
      uint32_t live = 0;
      for (const auto& d : dbbs_)
        if (d.block == b && d.remaining > 0) ++live;
      if (live >= cfg_.live_dbb_limit) break;
    }
    if (next_gid_ >= window_floor() + cfg_.window_size) break;
    launch_dbb(cycle);
  }
}

void CoreTile::launch_dbb(uint64_t cycle) {
  int b = static_cast<int>(trace_.ctrl[next_ctrl_]);
  const BasicBlock& blk = ddg_.program->block(b);
  const auto& deps = ddg_.block_deps[static_cast<size_t>(b)];

  dbbs_.emplace_back();
  DBBInst& dbb = dbbs_.back();
  size_t my_index = dbbs_.size() - 1;
  dbb.block = b;
  dbb.first_gid = next_gid_;
  dbb.launch_cycle = cycle;
  dbb.nodes.resize(blk.nodes.size());
  dbb.remaining = static_cast<uint32_t>(blk.nodes.size());

  // Resolve where each block input's value comes from, chasing chained
  // inputs through predecessor instances.
  dbb.input_providers.assign(blk.inputs.size(), Provider{});
  if (next_ctrl_ > 0) {
    DBBInst& pred = dbbs_[my_index - 1];
    const Node& term = ddg_.program->block(pred.block).nodes.back();
    size_t ti = 0;
    while (ti < term.targets.size() && term.targets[ti].block != b) ++ti;
    assert(ti < term.targets.size());  // checked in next_eligible_cycle
    const auto& ap = ddg_.block_deps[static_cast<size_t>(pred.block)].arg_producers[ti];
    assert(ap.size() == blk.inputs.size());
    for (size_t j = 0; j < ap.size(); ++j) {
      int code = ap[j];
      if (code >= 0)
        dbb.input_providers[j] = {false, my_index - 1, static_cast<uint32_t>(code)};
      else if (code == -1)
        dbb.input_providers[j] = {};  // parameter: always ready
      else
        dbb.input_providers[j] = pred.input_providers[static_cast<size_t>(-2 - code)];
    }
  }

  auto mismatch = [&](const std::string& what, int node_id) {
    throw TraceMismatch("tile " + std::to_string(tile_) + ": " + what +
                        " trace record does not match node " + std::to_string(node_id));
  };

  for (size_t i = 0; i < blk.nodes.size(); ++i) {
    const Node& sn = blk.nodes[i];
    NodeInst& n = dbb.nodes[i];
    uint64_t gid = dbb.first_gid + i;

    if (sn.op == Opclass::LOAD || sn.op == Opclass::STORE) {
      if (next_mem_ >= trace_.mem.size()) mismatch("memory", sn.id);
      const MemRecord& rec = trace_.mem[next_mem_++];
      if (rec.node != static_cast<uint32_t>(sn.id)) mismatch("memory", sn.id);
      n.address = rec.address;
      n.is_write = rec.is_write != 0;
      n.terminal = terminal_load_[static_cast<size_t>(sn.id)];
      mao_pending_.push_back(gid);
    } else if (sn.op == Opclass::SEND || sn.op == Opclass::RECV) {
      if (next_comm_ >= trace_.comm.size()) mismatch("communication", sn.id);
      const CommRecord& rec = trace_.comm[next_comm_++];
      if (rec.node != static_cast<uint32_t>(sn.id)) mismatch("communication", sn.id);
      n.peer = rec.peer;
      if (sn.op == Opclass::SEND)
        for (int p : deps.parents[i])
          if (dbb.nodes[static_cast<size_t>(p)].terminal ||
              terminal_load_[static_cast<size_t>(blk.nodes[static_cast<size_t>(p)].id)])
            n.linked_load = p;
    } else if (sn.op == Opclass::ACCEL_INVOKE) {
      if (next_accel_ >= trace_.accel.size()) mismatch("accelerator", sn.id);
      n.accel_index = static_cast<int32_t>(next_accel_++);
    }

    n.parents_left = static_cast<uint32_t>(deps.parents[i].size());
    for (auto [operand_idx, input_idx] : deps.input_operands[i]) {
      (void)operand_idx;
      const Provider& pr = dbb.input_providers[static_cast<size_t>(input_idx)];
      if (pr.ready) continue;
      NodeInst& producer = dbbs_[pr.dbb].nodes[pr.pos];
      if (producer.state == St::Completed) continue;
      n.parents_left++;
      producer.cross_dependents.push_back({my_index, static_cast<uint32_t>(i)});
    }
    uncompleted_.insert(gid);
  }
  for (size_t i = 0; i < blk.nodes.size(); ++i)
    if (dbb.nodes[i].parents_left == 0) on_ready(dbb, static_cast<uint32_t>(i));

  first_gids_.push_back(dbb.first_gid);
  next_gid_ += blk.nodes.size();
  next_ctrl_++;
  progressed_ = true;
  last_activity_ = std::max(last_activity_, cycle);
}

void CoreTile::on_ready(DBBInst& dbb, uint32_t pos) {
  uint64_t gid = dbb.first_gid + pos;
  NodeInst& n = dbb.nodes[pos];
  const Node& sn = static_node(dbb, pos);
  if (sn.op == Opclass::LOAD || sn.op == Opclass::STORE) {
    n.addr_resolved = true;
    if (mao_.contains(gid)) mao_.resolve(gid);
  }
  ready_.insert(gid);
}

void CoreTile::drain_mao_pending() {
  while (!mao_pending_.empty() && !mao_.full()) {
    uint64_t gid = mao_pending_.front();
    mao_pending_.pop_front();
    NodeInst& n = inst(gid);
    mao_.insert(gid, n.is_write, n.address);
    if (n.addr_resolved) mao_.resolve(gid);
  }
}

bool CoreTile::issue_one(uint64_t gid, uint64_t cycle) {
  auto [di, pos] = locate(gid);
  DBBInst& dbb = dbbs_[di];
  NodeInst& n = dbb.nodes[pos];
  const Node& sn = static_node(dbb, pos);
  assert(n.state == St::Waiting && n.parents_left == 0);

  if (auto it = cfg_.fu_counts.find(sn.op);
      it != cfg_.fu_counts.end() && it->second != kUnlimitedFUs &&
      fu_busy_[sn.op] >= it->second)
    return false;

  switch (sn.op) {
    case Opclass::LOAD:
    case Opclass::STORE: {
      if (!mao_.contains(gid)) return false;  // still queued for a MAO slot
      if (!mao_.check(gid)) return false;
      if (!env_.mem_submit(tile_, n.address, n.is_write, gid, cycle)) return false;
      if (n.terminal) {
        // The slot and the dataflow dependence clear immediately; the value
        // reaches the consumer SEND's message when memory responds.
        mao_.erase(gid);
        timers_.push({cycle + 1, gid});
      }
      break;
    }
    case Opclass::SEND: {
      uint64_t lat = latency_.cost(sn.op).latency;
      NodeInst* load = n.linked_load >= 0
                           ? &dbb.nodes[static_cast<size_t>(n.linked_load)]
                           : nullptr;
      uint64_t ready;
      if (load && load->data_cycle == UINT64_MAX) ready = UINT64_MAX;
      else if (load) ready = std::max(cycle + lat, load->data_cycle);
      else ready = cycle + lat;
      uint64_t handle = 0;
      if (!env_.try_send(tile_, n.peer, ready, &handle)) return false;
      if (ready == UINT64_MAX) load->msg_handle = handle;
      timers_.push({cycle + lat, gid});
      break;
    }
    case Opclass::RECV: {
      if (!env_.try_recv(n.peer, tile_, cycle)) return false;
      timers_.push({cycle + latency_.cost(sn.op).latency, gid});
      break;
    }
    case Opclass::ACCEL_INVOKE: {
      AccelCost cost = env_.accel_cost(trace_.accel[static_cast<size_t>(n.accel_index)]);
      auto cycles = static_cast<uint64_t>(
          std::ceil(cost.time_s * static_cast<double>(cfg_.freq_hz)));
      timers_.push({cycle + std::max<uint64_t>(1, cycles), gid});
      energy_ += cost.energy_j;
      break;
    }
    default:
      timers_.push({cycle + latency_.cost(sn.op).latency, gid});
      break;
  }
  n.state = St::Issued;
  fu_busy_[sn.op]++;
  return true;
}

void CoreTile::try_issue(uint64_t cycle) {
  uint32_t issued = 0;
  uint64_t limit = window_floor() + cfg_.window_size;
  for (auto it = ready_.begin(); it != ready_.end() && issued < cfg_.issue_width;) {
    if (*it >= limit) break;  // outside the sliding window; so is everything younger
    if (issue_one(*it, cycle)) {
      it = ready_.erase(it);
      issued++;
      progressed_ = true;
      last_activity_ = std::max(last_activity_, cycle);
    } else {
      ++it;
    }
  }
}

void CoreTile::complete_node(uint64_t gid, uint64_t cycle) {
  auto [di, pos] = locate(gid);
  DBBInst& dbb = dbbs_[di];
  NodeInst& n = dbb.nodes[pos];
  const Node& sn = static_node(dbb, pos);
  assert(n.state == St::Issued && "double completion");
  n.state = St::Completed;
  completed_count_++;
  uncompleted_.erase(gid);
  assert(dbb.remaining > 0);
  dbb.remaining--;
  assert(fu_busy_[sn.op] > 0);
  fu_busy_[sn.op]--;

  if (sn.op == Opclass::LOAD || sn.op == Opclass::STORE) {
    if (!n.terminal) {
      mao_.complete(gid);
      mao_.retire(gid);
    }
  } else if (sn.op != Opclass::ACCEL_INVOKE) {
    energy_ += latency_.cost(sn.op).energy;
  }
  if (sn.is_terminator()) dbb.term_completion = cycle;

  for (int q : children_[static_cast<size_t>(dbb.block)][pos]) {
    NodeInst& c = dbb.nodes[static_cast<size_t>(q)];
    assert(c.parents_left > 0);
    if (--c.parents_left == 0) on_ready(dbb, static_cast<uint32_t>(q));
  }
  for (auto [ddi, q] : n.cross_dependents) {
    NodeInst& c = dbbs_[ddi].nodes[q];
    assert(c.parents_left > 0);
    if (--c.parents_left == 0) on_ready(dbbs_[ddi], q);
  }
  progressed_ = true;
  last_activity_ = std::max(last_activity_, cycle);
}

void CoreTile::process_completions(uint64_t cycle) {
  while (!timers_.empty() && timers_.top().cycle <= cycle) {
    Pending p = timers_.top();
    timers_.pop();
    complete_node(p.gid, p.cycle);
  }
}

void CoreTile::memory_response(uint64_t gid, uint64_t cycle) {
  NodeInst& n = inst(gid);
  if (n.terminal) {
    n.data_cycle = cycle;
    if (n.msg_handle != UINT64_MAX) env_.stamp_message(n.msg_handle, cycle);
    return;  // dataflow completion was scheduled at issue
  }
  timers_.push({cycle, gid});
}

bool CoreTile::step(uint64_t cycle) {
  progressed_ = false;
  process_completions(cycle);
  try_launch(cycle);
  drain_mao_pending();
  try_issue(cycle);
  return progressed_;
}

bool CoreTile::done() const {
  return next_ctrl_ >= trace_.ctrl.size() && uncompleted_.empty() && timers_.empty() &&
         mao_pending_.empty();
}

std::string CoreTile::blocked_report() const {
  std::ostringstream os;
  os << "tile " << tile_ << ": ";
  if (done()) {
    os << "done";
    return os.str();
  }
  if (uncompleted_.empty()) {
    os << "blocked before launching trace entry " << next_ctrl_;
    return os.str();
  }
  uint64_t gid = *uncompleted_.begin();
  auto [di, pos] = locate(gid);
  const Node& sn = static_node(dbbs_[di], pos);
  const NodeInst& n = dbbs_[di].nodes[pos];
  os << "oldest incomplete gid " << gid << " (node " << sn.id << ", "
     << opclass_name(sn.op) << ", "
     << (n.state == St::Waiting
             ? (n.parents_left > 0 ? "waiting on parents" : "issue-blocked")
             : "in flight")
     << ")";
  return os.str();
}

}  // namespace tilesim
