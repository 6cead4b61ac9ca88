#include "tilesim/ddg.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace tilesim {

bool StaticDDG::has_control_edge(int terminator_node, int successor_block) const {
  for (const auto& [t, b] : control_edges)
    if (t == terminator_node && b == successor_block) return true;
  return false;
}

StaticDDG build_ddg(const KernelProgram& program) {
  StaticDDG ddg;
  ddg.program = &program;
  ddg.block_deps.resize(program.blocks.size());

  for (const auto& b : program.blocks) {
    auto& deps = ddg.block_deps[static_cast<size_t>(b.id)];
    deps.parents.resize(b.nodes.size());
    deps.input_consumers.resize(b.inputs.size());
    deps.input_operands.resize(b.nodes.size());

    // Name -> defining node position within this block.
    std::map<std::string, int> defs;
    std::map<std::string, int> input_index;
    for (size_t j = 0; j < b.inputs.size(); ++j)
      input_index[b.inputs[j]] = static_cast<int>(j);

    for (size_t i = 0; i < b.nodes.size(); ++i) {
      const Node& n = b.nodes[i];
      for (size_t oi = 0; oi < n.operands.size(); ++oi) {
        const std::string& v = n.operands[oi];
        auto it = defs.find(v);
        if (it != defs.end()) {
          deps.parents[i].push_back(it->second);
          ddg.data_edges.emplace_back(b.nodes[static_cast<size_t>(it->second)].id, n.id);
        } else if (auto ii = input_index.find(v); ii != input_index.end()) {
          deps.input_consumers[static_cast<size_t>(ii->second)].push_back(
              static_cast<int>(i));
          deps.input_operands[i].emplace_back(static_cast<int>(oi), ii->second);
        }
        // Otherwise a kernel parameter: always ready, no edge.
      }
      if (is_memory(n.op)) ddg.memory_nodes.push_back(n.id);
      if (!n.result.empty()) {
        if (defs.count(n.result) && defs[n.result] >= static_cast<int>(i))
          throw ParseError("cyclic data dependence in block " + std::to_string(b.id), 0);
        defs[n.result] = static_cast<int>(i);
      }
    }

    const Node& term = b.nodes.back();
    deps.arg_producers.resize(term.targets.size());
    std::set<int> seen_targets;
    for (size_t ti = 0; ti < term.targets.size(); ++ti) {
      const BranchTarget& t = term.targets[ti];
      if (seen_targets.insert(t.block).second)
        ddg.control_edges.emplace_back(term.id, t.block);
      auto& prods = deps.arg_producers[ti];
      const auto& succ = program.block(t.block);
      for (size_t ai = 0; ai < t.args.size(); ++ai) {
        const std::string& v = t.args[ai];
        auto it = defs.find(v);
        if (it != defs.end()) {
          prods.push_back(it->second);
          // Cross-block data edges through block inputs: producer of the
          // branch arg feeds every consumer of the matching input.
          const auto& succ_deps_idx = static_cast<size_t>(t.block);
          (void)succ_deps_idx;
          for (const Node& cn : succ.nodes)
            for (const auto& op : cn.operands)
              if (op == succ.inputs[ai])
                ddg.data_edges.emplace_back(b.nodes[static_cast<size_t>(it->second)].id,
                                            cn.id);
        } else if (auto ii = input_index.find(v); ii != input_index.end()) {
          prods.push_back(-2 - ii->second);
        } else {
          prods.push_back(-1);  // kernel parameter
        }
      }
    }
  }
  return ddg;
}

std::string dump_ddg(const StaticDDG& ddg) {
  std::ostringstream os;
  const KernelProgram& p = *ddg.program;
  os << "kernel " << p.name << "\n";
  for (const auto& b : p.blocks)
    for (const auto& n : b.nodes) {
      os << "node " << n.id << " block " << b.id << " op " << opclass_name(n.op);
      if (!n.result.empty()) os << " result " << n.result;
      os << "\n";
    }
  auto edges = ddg.data_edges;
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (const auto& [a, c] : edges) os << "data " << a << " -> " << c << "\n";
  for (const auto& [t, blk] : ddg.control_edges)
    os << "control " << t << " -> block " << blk << "\n";
  os << "memory";
  for (int id : ddg.memory_nodes) os << " " << id;
  os << "\n";
  return os.str();
}

}  // namespace tilesim
