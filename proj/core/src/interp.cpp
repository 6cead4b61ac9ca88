#include "tilesim/interp.hpp"

#include <cstring>
#include <deque>
#include <memory>

namespace tilesim {

uint64_t MemImage::load64(uint64_t addr) const {
  if (addr + 8 > bytes.size())
    throw InterpError("out-of-bounds load at address " + std::to_string(addr) +
                      " (image size " + std::to_string(bytes.size()) + ")");
  uint64_t v;
  std::memcpy(&v, bytes.data() + addr, 8);
  return v;
}

void MemImage::store64(uint64_t addr, uint64_t value) {
  if (addr + 8 > bytes.size())
    throw InterpError("out-of-bounds store at address " + std::to_string(addr) +
                      " (image size " + std::to_string(bytes.size()) + ")");
  std::memcpy(bytes.data() + addr, &value, 8);
}

namespace {

double as_f64(uint64_t bits) {
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

uint64_t from_f64(double d) {
  uint64_t bits;
  std::memcpy(&bits, &d, 8);
  return bits;
}

int64_t as_i64(uint64_t bits) { return static_cast<int64_t>(bits); }

using Channels = std::map<std::pair<int, int>, std::deque<uint64_t>>;

class TileInterp {
 public:
  TileInterp(const KernelProgram& p, int tile_id, int num_tiles, const Bindings& inputs,
             MemImage& image, Channels& channels, uint64_t budget)
      : prog_(p),
        tile_(tile_id),
        ntiles_(num_tiles),
        image_(image),
        channels_(channels),
        budget_(budget) {
    for (const auto& param : p.params) {
      auto it = inputs.find(param.name);
      if (it == inputs.end())
        throw InterpError("kernel parameter '" + param.name + "' is unbound");
      env_[param.name] = it->second;
    }
    trace_.tile_id = tile_id;
    trace_.num_tiles = num_tiles;
    enter_block(p.entry_block, {});
  }

  enum class Status { Running, Blocked, Finished };

  Status status() const { return status_; }
  const DynamicTrace& trace() const { return trace_; }
  DynamicTrace take_trace() { return std::move(trace_); }
  int blocked_node() const { return blocked_node_; }

  // Runs until the tile finishes or blocks on an empty RECV channel.
  void run() {
    while (status_ == Status::Running) step();
  }

  // Retries a blocked RECV.
  void resume() {
    if (status_ == Status::Blocked) status_ = Status::Running;
    run();
  }

 private:
  void enter_block(int id, const std::vector<uint64_t>& args) {
    const BasicBlock& b = prog_.block(id);
    for (size_t i = 0; i < b.inputs.size(); ++i) env_[b.inputs[i]] = args[i];
    cur_block_ = id;
    pc_ = 0;
    trace_.ctrl.push_back(static_cast<uint32_t>(id));
  }

  uint64_t value(const std::string& name) const {
    auto it = env_.find(name);
    if (it == env_.end()) throw InterpError("unbound value '" + name + "'");
    return it->second;
  }

  void step() {
    const BasicBlock& b = prog_.block(cur_block_);
    const Node& n = b.nodes[pc_];
    if (++executed_ > budget_)
      throw InterpError("tile " + std::to_string(tile_) +
                        ": dynamic instruction budget exceeded (" +
                        std::to_string(budget_) + ")");
    switch (n.op) {
      case Opclass::IADD:
        set(n, static_cast<uint64_t>(as_i64(value(n.operands[0])) +
                                     as_i64(value(n.operands[1]))));
        break;
      case Opclass::IMUL:
        set(n, static_cast<uint64_t>(as_i64(value(n.operands[0])) *
                                     as_i64(value(n.operands[1]))));
        break;
      case Opclass::IDIV: {
        int64_t d = as_i64(value(n.operands[1]));
        if (d == 0)
          throw InterpError("tile " + std::to_string(tile_) + ": division by zero at node " +
                            std::to_string(n.id));
        set(n, static_cast<uint64_t>(as_i64(value(n.operands[0])) / d));
        break;
      }
      case Opclass::FADD:
        set(n, from_f64(as_f64(value(n.operands[0])) + as_f64(value(n.operands[1]))));
        break;
      case Opclass::FMUL:
        set(n, from_f64(as_f64(value(n.operands[0])) * as_f64(value(n.operands[1]))));
        break;
      case Opclass::FDIV: {
        double d = as_f64(value(n.operands[1]));
        set(n, from_f64(as_f64(value(n.operands[0])) / d));
        break;
      }
      case Opclass::CMP:
        set(n, eval_cmp(n) ? 1 : 0);
        break;
      case Opclass::CAST:
        if (n.cast_kind == "itof")
          set(n, from_f64(static_cast<double>(as_i64(value(n.operands[0])))));
        else
          set(n, static_cast<uint64_t>(static_cast<int64_t>(as_f64(value(n.operands[0])))));
        break;
      case Opclass::LOAD: {
        uint64_t addr = value(n.operands[0]);
        uint64_t v;
        try {
          v = image_.load64(addr);
        } catch (const InterpError& e) {
          throw InterpError("tile " + std::to_string(tile_) + ", node " +
                            std::to_string(n.id) + ": " + e.what());
        }
        trace_.mem.push_back({static_cast<uint32_t>(n.id), addr, 8, 0});
        set(n, v);
        break;
      }
      case Opclass::STORE: {
        uint64_t addr = value(n.operands[0]);
        try {
          image_.store64(addr, value(n.operands[1]));
        } catch (const InterpError& e) {
          throw InterpError("tile " + std::to_string(tile_) + ", node " +
                            std::to_string(n.id) + ": " + e.what());
        }
        trace_.mem.push_back({static_cast<uint32_t>(n.id), addr, 8, 1});
        break;
      }
      case Opclass::SEND: {
        int dst = static_cast<int>(as_i64(value(n.operands[0])));
        if (dst < 0 || dst >= ntiles_)
          throw InterpError("tile " + std::to_string(tile_) + ", node " +
                            std::to_string(n.id) + ": send to invalid tile " +
                            std::to_string(dst));
        channels_[{tile_, dst}].push_back(value(n.operands[1]));
        trace_.comm.push_back({static_cast<uint32_t>(n.id), dst, 8});
        break;
      }
      case Opclass::RECV: {
        int src = static_cast<int>(as_i64(value(n.operands[0])));
        auto& q = channels_[{src, tile_}];
        if (q.empty()) {
          // Retry the same node on resume; undo the budget charge.
          --executed_;
          blocked_node_ = n.id;
          status_ = Status::Blocked;
          return;
        }
        set(n, q.front());
        q.pop_front();
        trace_.comm.push_back({static_cast<uint32_t>(n.id), src, 8});
        break;
      }
      case Opclass::ACCEL_INVOKE: {
        AccelInvocation inv;
        inv.model_id = n.accel_model;
        inv.num_instances = value(n.operands[0]);
        inv.bytes_transferred = value(n.operands[1]);
        size_t k = 2;
        for (int group : n.accel_groups) {
          std::vector<uint64_t> loops;
          for (int j = 0; j < group; ++j) loops.push_back(value(n.operands[k++]));
          inv.iteration_counts.push_back(std::move(loops));
        }
        trace_.accel.push_back(std::move(inv));
        break;
      }
      case Opclass::TILE_ID:
        set(n, static_cast<uint64_t>(tile_));
        break;
      case Opclass::NUM_TILES:
        set(n, static_cast<uint64_t>(ntiles_));
        break;
      case Opclass::CONST:
        set(n, n.const_bits);
        break;
      case Opclass::MOVE:
        set(n, value(n.operands[0]));
        break;
      case Opclass::BRANCH: {
        take_branch(n.targets[0]);
        return;
      }
      case Opclass::COND_BRANCH: {
        take_branch(value(n.operands[0]) != 0 ? n.targets[0] : n.targets[1]);
        return;
      }
      case Opclass::RETURN:
        status_ = Status::Finished;
        return;
    }
    ++pc_;
  }

  void take_branch(const BranchTarget& t) {
    std::vector<uint64_t> args;
    args.reserve(t.args.size());
    for (const auto& a : t.args) args.push_back(value(a));
    enter_block(t.block, args);
  }

  bool eval_cmp(const Node& n) {
    if (n.cmp_pred[0] == 'f') {
      double a = as_f64(value(n.operands[0])), b = as_f64(value(n.operands[1]));
      if (n.cmp_pred == "feq") return a == b;
      if (n.cmp_pred == "fne") return a != b;
      if (n.cmp_pred == "flt") return a < b;
      if (n.cmp_pred == "fle") return a <= b;
      if (n.cmp_pred == "fgt") return a > b;
      return a >= b;
    }
    int64_t a = as_i64(value(n.operands[0])), b = as_i64(value(n.operands[1]));
    if (n.cmp_pred == "eq") return a == b;
    if (n.cmp_pred == "ne") return a != b;
    if (n.cmp_pred == "lt") return a < b;
    if (n.cmp_pred == "le") return a <= b;
    if (n.cmp_pred == "gt") return a > b;
    return a >= b;
  }

  void set(const Node& n, uint64_t v) { env_[n.result] = v; }

  const KernelProgram& prog_;
  int tile_;
  int ntiles_;
  MemImage& image_;
  Channels& channels_;
  uint64_t budget_;
  uint64_t executed_ = 0;

  std::map<std::string, uint64_t> env_;
  int cur_block_ = 0;
  size_t pc_ = 0;
  Status status_ = Status::Running;
  int blocked_node_ = -1;
  DynamicTrace trace_;
};

}  // namespace

std::vector<DynamicTrace> interpret_system(const std::vector<TileProgram>& tiles,
                                           int num_tiles, const Bindings& inputs,
                                           MemImage& image, const InterpOptions& opts) {
  Channels channels;
  std::vector<std::unique_ptr<TileInterp>> interps;
  for (const auto& tp : tiles)
    interps.push_back(std::make_unique<TileInterp>(*tp.program, tp.tile_id, num_tiles,
                                                   inputs, image, channels,
                                                   opts.max_dynamic_nodes));
  bool progress = true;
  while (progress) {
    progress = false;
    bool all_done = true;
    for (auto& ti : interps) {
      if (ti->status() == TileInterp::Status::Finished) continue;
      size_t before = ti->trace().ctrl.size() + ti->trace().mem.size() +
                      ti->trace().comm.size();
      ti->resume();
      size_t after = ti->trace().ctrl.size() + ti->trace().mem.size() +
                     ti->trace().comm.size();
      if (after != before || ti->status() == TileInterp::Status::Finished) progress = true;
      if (ti->status() != TileInterp::Status::Finished) all_done = false;
    }
    if (all_done) break;
    if (!progress) {
      std::string msg = "rendezvous deadlock:";
      for (size_t i = 0; i < interps.size(); ++i)
        if (interps[i]->status() == TileInterp::Status::Blocked)
          msg += " tile " + std::to_string(tiles[i].tile_id) + " blocked at node " +
                 std::to_string(interps[i]->blocked_node());
      throw InterpError(msg);
    }
  }
  std::vector<DynamicTrace> out;
  for (auto& ti : interps) {
    if (ti->status() != TileInterp::Status::Finished) {
      // Unreachable when the loop above exits normally.
      throw InterpError("tile did not finish");
    }
    out.push_back(ti->take_trace());
  }
  return out;
}

DynamicTrace interpret(const KernelProgram& program, const Bindings& inputs,
                       MemImage& image, int tile_id, int num_tiles,
                       const InterpOptions& opts) {
  auto traces = interpret_system({{&program, tile_id}}, num_tiles, inputs, image, opts);
  return std::move(traces[0]);
}

std::vector<DynamicTrace> generate_spmd_traces(const KernelProgram& program, int T,
                                               const Bindings& inputs, MemImage& image,
                                               const InterpOptions& opts) {
  if (T < 1) throw InterpError("tile count must be >= 1");
  std::vector<TileProgram> tiles;
  for (int t = 0; t < T; ++t) tiles.push_back({&program, t});
  return interpret_system(tiles, T, inputs, image, opts);
}

}  // namespace tilesim
