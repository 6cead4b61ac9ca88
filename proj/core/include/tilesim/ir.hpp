#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tilesim {

// Instruction classes of the mini-IR. Fixed set; costs are keyed by name in
// the latency/energy table so new classes only need a table entry.
enum class Opclass {
  IADD, IMUL, IDIV,
  FADD, FMUL, FDIV,
  CMP, CAST,
  LOAD, STORE,
  BRANCH, COND_BRANCH, RETURN,
  SEND, RECV,
  ACCEL_INVOKE,
  TILE_ID, NUM_TILES,
  CONST, MOVE,
};

const char* opclass_name(Opclass op);
std::optional<Opclass> opclass_from_name(const std::string& name);

bool is_terminator(Opclass op);
bool is_memory(Opclass op);

enum class ParamKind { Int, Float, Ptr };

struct Param {
  std::string name;
  ParamKind kind = ParamKind::Int;
};

struct BranchTarget {
  int block = -1;
  std::vector<std::string> args;  // values bound to the target's block inputs
};

struct Node {
  int id = -1;           // global static node id
  int block = -1;        // owning block id
  Opclass op = Opclass::MOVE;
  std::vector<std::string> operands;  // value references (no branch targets)
  std::string result;                 // empty when the node produces no value

  // CMP predicate: eq ne lt le gt ge (signed int) / feq fne flt fle fgt fge.
  std::string cmp_pred;
  // CAST kind: itof, ftoi.
  std::string cast_kind;

  // CONST payload, stored as raw bits with a kind tag.
  uint64_t const_bits = 0;
  bool const_is_float = false;

  // BRANCH has one target, COND_BRANCH two (taken first).
  std::vector<BranchTarget> targets;

  // ACCEL_INVOKE: model name plus per-process grouping of the iteration
  // operands. operands = [instances, bytes, iter...]; accel_groups[i] gives
  // the number of iteration operands belonging to process i.
  std::string accel_model;
  std::vector<int> accel_groups;

  bool is_terminator() const { return tilesim::is_terminator(op); }
};

struct BasicBlock {
  int id = -1;
  std::vector<std::string> inputs;  // named values supplied at branch sites
  std::vector<Node> nodes;          // terminator is the last node
};

struct KernelProgram {
  std::string name;
  std::vector<Param> params;
  std::vector<BasicBlock> blocks;  // block ids are dense 0..n-1
  int entry_block = 0;

  const BasicBlock& block(int id) const { return blocks.at(static_cast<size_t>(id)); }
  const Node* node_by_id(int node_id) const;
  int num_nodes() const;
};

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(const std::string& msg, int line_, int column_ = 0);
};

// Parses the line-oriented kernel text format:
//   kernel <name>(<param>: <int|float|ptr>, ...)
//   block <id>(<inputs>):
//     <result> = <opclass> <operand>...
//     store <addr> <value>
//     branch <id>(<args>)
//     cond_branch <cond> <id>(<args>) <id>(<args>)
//   # comments run to end of line
// Throws ParseError with a location on malformed input; the returned program
// satisfies all structural invariants (validate() has been run).
KernelProgram parse_kernel(const std::string& text);

// Pretty-prints in the same format parse_kernel accepts (round-trip safe).
std::string print_kernel(const KernelProgram& program);

// Re-checks structural invariants: dense block ids, one trailing terminator
// per block, defined-before-use operands. Throws ParseError on violation.
void validate(const KernelProgram& program);

// Assigns dense global node ids in (block, position) order. Called by the
// parser; useful after programmatic construction or transforms.
void renumber_nodes(KernelProgram& program);

}  // namespace tilesim
