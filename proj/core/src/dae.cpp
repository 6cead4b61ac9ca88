#include "tilesim/dae.hpp"

#include <cstdio>
#include <map>
#include <set>
#include <vector>

namespace tilesim {

namespace {

// Name resolution inside one program: where is this value defined?
struct DefMap {
  // (block, name) -> node index within the block, inputs as -1, params as -2.
  std::map<std::pair<int, std::string>, int> defs;

  explicit DefMap(const KernelProgram& p) {
    for (const auto& param : p.params)
      for (const auto& b : p.blocks) defs[{b.id, param.name}] = -2;
    for (const auto& b : p.blocks) {
      for (const auto& in : b.inputs) defs[{b.id, in}] = -1;
      for (size_t i = 0; i < b.nodes.size(); ++i)
        if (!b.nodes[i].result.empty())
          defs[{b.id, b.nodes[i].result}] = static_cast<int>(i);
    }
  }

  int lookup(int block, const std::string& name) const {
    auto it = defs.find({block, name});
    return it == defs.end() ? -3 : it->second;
  }
};

// Backward closure of a set of (block, value) roots through data
// dependencies, including cross-block flow via block inputs.
struct Closure {
  const KernelProgram& p;
  const DefMap& dm;
  std::vector<std::set<std::string>> vals;   // per block
  std::vector<std::set<size_t>> inputs;      // per block
  std::set<int> nodes;                       // global node ids in the closure

  Closure(const KernelProgram& p_, const DefMap& dm_)
      : p(p_), dm(dm_), vals(p_.blocks.size()), inputs(p_.blocks.size()) {}

  void mark(int block, const std::string& name) {
    auto b = static_cast<size_t>(block);
    if (!vals[b].insert(name).second) return;
    int def = dm.lookup(block, name);
    if (def >= 0) {
      const Node& n = p.blocks[b].nodes[static_cast<size_t>(def)];
      nodes.insert(n.id);
      for (const auto& op : n.operands) mark(block, op);
    } else if (def == -1) {
      size_t j = 0;
      while (p.blocks[b].inputs[j] != name) ++j;
      if (!inputs[b].insert(j).second) return;
      for (const auto& pred : p.blocks) {
        const Node& t = pred.nodes.back();
        for (const auto& tgt : t.targets)
          if (tgt.block == block) mark(pred.id, tgt.args[j]);
      }
    }
    // def == -2: parameter, always available. -3 cannot happen (validated IR).
  }
};

bool is_float_compute(const Node& n) {
  if (n.op == Opclass::FADD || n.op == Opclass::FMUL || n.op == Opclass::FDIV)
    return true;
  return n.op == Opclass::CMP && !n.cmp_pred.empty() && n.cmp_pred[0] == 'f';
}

void check_sliceable(const KernelProgram& p) {
  for (const auto& b : p.blocks)
    for (const auto& n : b.nodes)
      if (n.op == Opclass::SEND || n.op == Opclass::RECV ||
          n.op == Opclass::ACCEL_INVOKE)
        throw SliceError("node " + std::to_string(n.id) + ": kernel already uses " +
                             opclass_name(n.op) + ", cannot slice",
                         n.id);

  // Addresses and control flow must be computable on the access side: no
  // floating-point node may feed them (loss of decoupling).
  DefMap dm(p);
  Closure c(p, dm);
  for (const auto& b : p.blocks) {
    for (const auto& n : b.nodes)
      if (n.op == Opclass::LOAD || n.op == Opclass::STORE) c.mark(b.id, n.operands[0]);
    for (const auto& op : b.nodes.back().operands) c.mark(b.id, op);
  }
  for (int id : c.nodes) {
    const Node* n = p.node_by_id(id);
    if (n && is_float_compute(*n))
      throw SliceError("node " + std::to_string(id) +
                           ": address or control flow depends on floating-point "
                           "computation (loss of decoupling)",
                       id);
  }
}

Node make_node(Opclass op, std::string result, std::vector<std::string> operands) {
  Node n;
  n.op = op;
  n.result = std::move(result);
  n.operands = std::move(operands);
  return n;
}

Node make_const(std::string result, uint64_t bits) {
  Node n;
  n.op = Opclass::CONST;
  n.result = std::move(result);
  n.const_bits = bits;
  return n;
}

// Emits the raw-to-logical rewrite shared by both slices: logical tile id is
// raw/2 and logical tile count is raw/2.
void rewrite_tile_coords(std::vector<Node>& out, const Node& n, int block_id) {
  std::string raw = "$raw" + std::to_string(n.id);
  std::string two = "$two" + std::to_string(n.id);
  out.push_back(make_node(n.op, raw, {}));
  out.push_back(make_const(two, 2));
  out.push_back(make_node(Opclass::IDIV, n.result, {raw, two}));
  (void)block_id;
}

// Prepends the peer-tile computation ($peer<b> = raw id +/- 1) if the block
// contains any memory traffic to forward.
bool needs_peer(const BasicBlock& b) {
  for (const auto& n : b.nodes)
    if (n.op == Opclass::LOAD || n.op == Opclass::STORE) return true;
  return false;
}

void emit_peer(std::vector<Node>& out, int block_id, bool access) {
  std::string sfx = std::to_string(block_id);
  out.push_back(make_node(Opclass::TILE_ID, "$me" + sfx, {}));
  out.push_back(make_const("$delta" + sfx, access ? 1 : ~uint64_t{0}));
  out.push_back(
      make_node(Opclass::IADD, "$peer" + sfx, {"$me" + sfx, "$delta" + sfx}));
}

// Liveness-based cleanup: drops nodes whose results are unused and block
// inputs nothing consumes, rewriting branch args to match. Nodes with side
// effects or control roles are always kept.
void dce(KernelProgram& p) {
  DefMap dm(p);
  Closure live(p, dm);
  for (const auto& b : p.blocks)
    for (const auto& n : b.nodes) {
      bool seed = n.op == Opclass::LOAD || n.op == Opclass::STORE ||
                  n.op == Opclass::SEND || n.op == Opclass::RECV ||
                  n.is_terminator();
      if (!seed) continue;
      live.nodes.insert(n.id);
      for (const auto& op : n.operands) live.mark(b.id, op);
    }

  for (auto& b : p.blocks) {
    auto bi = static_cast<size_t>(b.id);
    std::vector<Node> kept;
    for (auto& n : b.nodes)
      if (live.nodes.count(n.id) ||
          (!n.result.empty() && live.vals[bi].count(n.result)))
        kept.push_back(std::move(n));
    b.nodes = std::move(kept);
  }
  // Drop dead inputs and the matching branch args.
  std::vector<std::vector<bool>> keep_input(p.blocks.size());
  for (auto& b : p.blocks) {
    auto bi = static_cast<size_t>(b.id);
    keep_input[bi].resize(b.inputs.size());
    std::vector<std::string> kept;
    for (size_t j = 0; j < b.inputs.size(); ++j) {
      keep_input[bi][j] = live.inputs[bi].count(j) > 0;
      if (keep_input[bi][j]) kept.push_back(b.inputs[j]);
    }
    b.inputs = std::move(kept);
  }
  for (auto& b : p.blocks)
    for (auto& tgt : b.nodes.back().targets) {
      std::vector<std::string> args;
      for (size_t j = 0; j < tgt.args.size(); ++j)
        if (keep_input[static_cast<size_t>(tgt.block)][j]) args.push_back(tgt.args[j]);
      tgt.args = std::move(args);
    }
  renumber_nodes(p);
  validate(p);
}

}  // namespace

SlicePair slice(const KernelProgram& program) {
  check_sliceable(program);

  SlicePair pair;
  for (int side = 0; side < 2; ++side) {
    bool access = side == 0;
    KernelProgram out;
    out.name = program.name + (access ? "_access" : "_execute");
    out.params = program.params;
    out.entry_block = program.entry_block;
    for (const auto& b : program.blocks) {
      BasicBlock nb;
      nb.id = b.id;
      nb.inputs = b.inputs;
      if (needs_peer(b)) emit_peer(nb.nodes, b.id, access);
      std::string peer = "$peer" + std::to_string(b.id);
      for (const auto& n : b.nodes) {
        switch (n.op) {
          case Opclass::TILE_ID:
          case Opclass::NUM_TILES:
            rewrite_tile_coords(nb.nodes, n, b.id);
            break;
          case Opclass::LOAD:
            if (access) {
              nb.nodes.push_back(n);
              nb.nodes.push_back(make_node(Opclass::SEND, "", {peer, n.result}));
            } else {
              nb.nodes.push_back(make_node(Opclass::RECV, n.result, {peer}));
            }
            break;
          case Opclass::STORE:
            if (access) {
              std::string v = "$sv" + std::to_string(n.id);
              nb.nodes.push_back(make_node(Opclass::RECV, v, {peer}));
              nb.nodes.push_back(make_node(Opclass::STORE, "", {n.operands[0], v}));
            } else {
              nb.nodes.push_back(make_node(Opclass::SEND, "", {peer, n.operands[1]}));
            }
            break;
          default:
            nb.nodes.push_back(n);
            break;
        }
      }
      out.blocks.push_back(std::move(nb));
    }
    renumber_nodes(out);
    dce(out);
    (access ? pair.access : pair.execute) = std::move(out);
  }
  return pair;
}

SliceCheck verify_slice_equivalence(const KernelProgram& program, const Bindings& inputs,
                                    const MemImage& initial) {
  SliceCheck result;
  MemImage reference = initial;
  interpret(program, inputs, reference, 0, 1);

  SlicePair pair = slice(program);
  MemImage sliced = initial;
  try {
    interpret_system({{&pair.access, 0}, {&pair.execute, 1}}, 2, inputs, sliced);
  } catch (const InterpError& e) {
    result.pass = false;
    result.detail = std::string("slice pair failed: ") + e.what();
    return result;
  }

  for (size_t i = 0; i < reference.bytes.size(); ++i)
    if (reference.bytes[i] != sliced.bytes[i]) {
      result.pass = false;
      result.detail = "first divergence at address 0x" + [](uint64_t a) {
        char buf[32];
        snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(a));
        return std::string(buf);
      }(i);
      return result;
    }
  return result;
}

}  // namespace tilesim
