#include "tilesim/ir.hpp"

#include <cctype>
#include <cstring>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace tilesim {

namespace {

struct OpInfo {
  Opclass op;
  const char* name;
};

constexpr OpInfo kOps[] = {
    {Opclass::IADD, "iadd"},       {Opclass::IMUL, "imul"},
    {Opclass::IDIV, "idiv"},       {Opclass::FADD, "fadd"},
    {Opclass::FMUL, "fmul"},       {Opclass::FDIV, "fdiv"},
    {Opclass::CMP, "cmp"},         {Opclass::CAST, "cast"},
    {Opclass::LOAD, "load"},       {Opclass::STORE, "store"},
    {Opclass::BRANCH, "branch"},   {Opclass::COND_BRANCH, "cond_branch"},
    {Opclass::RETURN, "return"},   {Opclass::SEND, "send"},
    {Opclass::RECV, "recv"},       {Opclass::ACCEL_INVOKE, "accel_invoke"},
    {Opclass::TILE_ID, "tile_id"}, {Opclass::NUM_TILES, "num_tiles"},
    {Opclass::CONST, "const"},     {Opclass::MOVE, "move"},
};

const std::set<std::string> kIntPreds = {"eq", "ne", "lt", "le", "gt", "ge"};
const std::set<std::string> kFloatPreds = {"feq", "fne", "flt", "fle", "fgt", "fge"};

}  // namespace

const char* opclass_name(Opclass op) {
  for (const auto& info : kOps)
    if (info.op == op) return info.name;
  return "?";
}

std::optional<Opclass> opclass_from_name(const std::string& name) {
  for (const auto& info : kOps)
    if (name == info.name) return info.op;
  return std::nullopt;
}

bool is_terminator(Opclass op) {
  return op == Opclass::BRANCH || op == Opclass::COND_BRANCH || op == Opclass::RETURN;
}

bool is_memory(Opclass op) { return op == Opclass::LOAD || op == Opclass::STORE; }

const Node* KernelProgram::node_by_id(int node_id) const {
  for (const auto& b : blocks)
    for (const auto& n : b.nodes)
      if (n.id == node_id) return &n;
  return nullptr;
}

int KernelProgram::num_nodes() const {
  int n = 0;
  for (const auto& b : blocks) n += static_cast<int>(b.nodes.size());
  return n;
}

ParseError::ParseError(const std::string& msg, int line_, int column_)
    : std::runtime_error("line " + std::to_string(line_) +
                         (column_ > 0 ? ":" + std::to_string(column_) : "") + ": " + msg),
      line(line_),
      column(column_) {}

void renumber_nodes(KernelProgram& program) {
  int next = 0;
  for (auto& b : program.blocks)
    for (auto& n : b.nodes) {
      n.id = next++;
      n.block = b.id;
    }
}

namespace {

// --- Tokenizer -------------------------------------------------------------

struct Tok {
  std::string text;
  int col;
};

std::vector<Tok> tokenize(const std::string& line) {
  std::vector<Tok> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      ++i;
      continue;
    }
    if (c == '(' || c == ')' || c == ':' || c == ';' || c == '=') {
      out.push_back({std::string(1, c), static_cast<int>(i) + 1});
      ++i;
      continue;
    }
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
           std::string("(),:;=#").find(line[i]) == std::string::npos)
      ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  if (s.size() > i + 1 && s[i] == '0' && (s[i + 1] == 'x' || s[i + 1] == 'X')) {
    for (size_t j = i + 2; j < s.size(); ++j)
      if (!std::isxdigit(static_cast<unsigned char>(s[j]))) return false;
    return s.size() > i + 2;
  }
  for (size_t j = i; j < s.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
  return true;
}

bool is_float_literal(const std::string& s) {
  if (s.empty()) return false;
  bool has_digit = false, has_dot_or_exp = false;
  for (size_t j = (s[0] == '-' || s[0] == '+') ? 1 : 0; j < s.size(); ++j) {
    char c = s[j];
    if (std::isdigit(static_cast<unsigned char>(c))) has_digit = true;
    else if (c == '.' || c == 'e' || c == 'E' || c == '-' || c == '+') has_dot_or_exp = true;
    else return false;
  }
  return has_digit && has_dot_or_exp;
}

// --- Parser ----------------------------------------------------------------

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  KernelProgram run() {
    std::istringstream in(text_);
    std::string raw;
    while (std::getline(in, raw)) {
      ++lineno_;
      auto toks = tokenize(raw);
      if (toks.empty()) continue;
      parse_line(toks);
    }
    finish_block();
    if (prog_.blocks.empty()) throw ParseError("kernel has no blocks", lineno_);
    renumber_nodes(prog_);
    validate(prog_);
    return prog_;
  }

 private:
  void parse_line(std::vector<Tok>& t) {
    if (t[0].text == "kernel") {
      parse_kernel_header(t);
      return;
    }
    if (t[0].text == "block") {
      finish_block();
      parse_block_header(t);
      return;
    }
    if (cur_ == nullptr)
      throw ParseError("instruction outside of a block", lineno_, t[0].col);
    parse_instruction(t);
  }

  void parse_kernel_header(std::vector<Tok>& t) {
    size_t i = 1;
    prog_.name = expect_ident(t, i, "kernel name");
    expect(t, i, "(");
    while (i < t.size() && t[i].text != ")") {
      Param p;
      p.name = expect_ident(t, i, "parameter name");
      expect(t, i, ":");
      std::string kind = expect_ident(t, i, "parameter kind");
      if (kind == "int") p.kind = ParamKind::Int;
      else if (kind == "float") p.kind = ParamKind::Float;
      else if (kind == "ptr") p.kind = ParamKind::Ptr;
      else throw ParseError("unknown parameter kind '" + kind + "'", lineno_);
      prog_.params.push_back(std::move(p));
    }
    expect(t, i, ")");
  }

  void parse_block_header(std::vector<Tok>& t) {
    size_t i = 1;
    std::string id_tok = expect_ident(t, i, "block id");
    if (!is_integer(id_tok)) throw ParseError("block id must be an integer", lineno_);
    BasicBlock b;
    b.id = std::stoi(id_tok);
    for (const auto& prev : prog_.blocks)
      if (prev.id == b.id)
        throw ParseError("duplicate block ID " + std::to_string(b.id), lineno_);
    expect(t, i, "(");
    while (i < t.size() && t[i].text != ")")
      b.inputs.push_back(expect_ident(t, i, "block input"));
    expect(t, i, ")");
    expect(t, i, ":");
    prog_.blocks.push_back(std::move(b));
    cur_ = &prog_.blocks.back();
  }

  void parse_instruction(std::vector<Tok>& t) {
    Node n;
    size_t i = 0;
    if (t.size() >= 2 && t[1].text == "=") {
      n.result = t[0].text;
      i = 2;
    }
    if (i >= t.size()) throw ParseError("missing opclass", lineno_);
    std::string opname = t[i].text;
    auto op = opclass_from_name(opname);
    if (!op) throw ParseError("unknown opclass '" + opname + "'", lineno_, t[i].col);
    n.op = *op;
    ++i;

    switch (n.op) {
      case Opclass::CMP: {
        n.cmp_pred = expect_ident(t, i, "cmp predicate");
        if (!kIntPreds.count(n.cmp_pred) && !kFloatPreds.count(n.cmp_pred))
          throw ParseError("unknown cmp predicate '" + n.cmp_pred + "'", lineno_);
        n.operands.push_back(expect_ident(t, i, "cmp operand"));
        n.operands.push_back(expect_ident(t, i, "cmp operand"));
        break;
      }
      case Opclass::CAST: {
        n.cast_kind = expect_ident(t, i, "cast kind");
        if (n.cast_kind != "itof" && n.cast_kind != "ftoi")
          throw ParseError("unknown cast kind '" + n.cast_kind + "'", lineno_);
        n.operands.push_back(expect_ident(t, i, "cast operand"));
        break;
      }
      case Opclass::CONST: {
        std::string lit = expect_ident(t, i, "constant literal");
        if (is_integer(lit)) {
          int64_t v = std::stoll(lit, nullptr, 0);
          n.const_bits = static_cast<uint64_t>(v);
          n.const_is_float = false;
        } else if (is_float_literal(lit)) {
          double d = std::stod(lit);
          static_assert(sizeof(double) == sizeof(uint64_t));
          std::memcpy(&n.const_bits, &d, sizeof(d));
          n.const_is_float = true;
        } else {
          throw ParseError("bad constant literal '" + lit + "'", lineno_);
        }
        break;
      }
      case Opclass::BRANCH:
        n.targets.push_back(parse_target(t, i));
        break;
      case Opclass::COND_BRANCH:
        n.operands.push_back(expect_ident(t, i, "branch condition"));
        n.targets.push_back(parse_target(t, i));
        n.targets.push_back(parse_target(t, i));
        break;
      case Opclass::RETURN:
        if (i < t.size()) n.operands.push_back(expect_ident(t, i, "return value"));
        break;
      case Opclass::ACCEL_INVOKE: {
        n.accel_model = expect_ident(t, i, "accelerator model id");
        n.operands.push_back(expect_ident(t, i, "instance count"));
        n.operands.push_back(expect_ident(t, i, "byte count"));
        int group = 0;
        n.accel_groups.clear();
        while (i < t.size()) {
          if (t[i].text == ";") {
            n.accel_groups.push_back(group);
            group = 0;
            ++i;
            continue;
          }
          n.operands.push_back(expect_ident(t, i, "iteration count"));
          ++group;
        }
        n.accel_groups.push_back(group);
        break;
      }
      default: {
        while (i < t.size()) n.operands.push_back(expect_ident(t, i, "operand"));
        break;
      }
    }
    if (i < t.size()) throw ParseError("trailing tokens", lineno_, t[i].col);
    check_arity(n);
    n.block = cur_->id;
    cur_->nodes.push_back(std::move(n));
  }

  BranchTarget parse_target(std::vector<Tok>& t, size_t& i) {
    BranchTarget bt;
    std::string id_tok = expect_ident(t, i, "branch target");
    if (!is_integer(id_tok)) throw ParseError("branch target must be a block id", lineno_);
    bt.block = std::stoi(id_tok);
    expect(t, i, "(");
    while (i < t.size() && t[i].text != ")")
      bt.args.push_back(expect_ident(t, i, "branch argument"));
    expect(t, i, ")");
    return bt;
  }

  void check_arity(const Node& n) {
    auto need = [&](size_t k, const char* what) {
      if (n.operands.size() != k)
        throw ParseError(std::string(opclass_name(n.op)) + " expects " + what, lineno_);
    };
    switch (n.op) {
      case Opclass::IADD: case Opclass::IMUL: case Opclass::IDIV:
      case Opclass::FADD: case Opclass::FMUL: case Opclass::FDIV:
        need(2, "two operands"); require_result(n); break;
      case Opclass::CMP: need(2, "two operands"); require_result(n); break;
      case Opclass::CAST: need(1, "one operand"); require_result(n); break;
      case Opclass::LOAD: need(1, "one address operand"); require_result(n); break;
      case Opclass::STORE: need(2, "address and value operands"); require_no_result(n); break;
      case Opclass::SEND: need(2, "destination tile and value"); require_no_result(n); break;
      case Opclass::RECV: need(1, "source tile operand"); require_result(n); break;
      case Opclass::MOVE: need(1, "one operand"); require_result(n); break;
      case Opclass::TILE_ID: case Opclass::NUM_TILES: case Opclass::CONST:
        need(0, "no operands"); require_result(n); break;
      case Opclass::BRANCH: case Opclass::RETURN:
        require_no_result(n); break;
      case Opclass::COND_BRANCH: need(1, "one condition operand"); require_no_result(n); break;
      case Opclass::ACCEL_INVOKE:
        if (n.operands.size() < 2)
          throw ParseError("accel_invoke expects instances and bytes operands", lineno_);
        require_no_result(n);
        break;
    }
  }

  void require_result(const Node& n) {
    if (n.result.empty())
      throw ParseError(std::string(opclass_name(n.op)) + " requires a result", lineno_);
  }
  void require_no_result(const Node& n) {
    if (!n.result.empty())
      throw ParseError(std::string(opclass_name(n.op)) + " produces no result", lineno_);
  }

  std::string expect_ident(std::vector<Tok>& t, size_t& i, const char* what) {
    if (i >= t.size()) throw ParseError(std::string("expected ") + what, lineno_);
    std::string s = t[i].text;
    if (s == "(" || s == ")" || s == ":" || s == "=" || s == ";")
      throw ParseError(std::string("expected ") + what + ", got '" + s + "'", lineno_,
                       t[i].col);
    ++i;
    return s;
  }

  void expect(std::vector<Tok>& t, size_t& i, const char* tok) {
    if (i >= t.size() || t[i].text != tok)
      throw ParseError(std::string("expected '") + tok + "'", lineno_,
                       i < t.size() ? t[i].col : 0);
    ++i;
  }

  void finish_block() {
    if (cur_ == nullptr) return;
    if (cur_->nodes.empty() || !cur_->nodes.back().is_terminator())
      throw ParseError("missing terminator, block " + std::to_string(cur_->id), lineno_);
    cur_ = nullptr;
  }

  const std::string& text_;
  KernelProgram prog_;
  BasicBlock* cur_ = nullptr;
  int lineno_ = 0;
};

std::string format_const(const Node& n) {
  if (n.const_is_float) {
    double d;
    std::memcpy(&d, &n.const_bits, sizeof(d));
    std::ostringstream os;
    os.precision(17);
    os << d;
    std::string s = os.str();
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
    return s;
  }
  return std::to_string(static_cast<int64_t>(n.const_bits));
}

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

}  // namespace

KernelProgram parse_kernel(const std::string& text) { return Parser(text).run(); }

std::string print_kernel(const KernelProgram& program) {
  std::ostringstream os;
  os << "kernel " << program.name << "(";
  for (size_t i = 0; i < program.params.size(); ++i) {
    if (i) os << ", ";
    const auto& p = program.params[i];
    os << p.name << ": "
       << (p.kind == ParamKind::Int ? "int" : p.kind == ParamKind::Float ? "float" : "ptr");
  }
  os << ")\n";
  for (const auto& b : program.blocks) {
    os << "block " << b.id << "(" << join(b.inputs) << "):\n";
    for (const auto& n : b.nodes) {
      os << "  ";
      if (!n.result.empty()) os << n.result << " = ";
      os << opclass_name(n.op);
      switch (n.op) {
        case Opclass::CMP: os << " " << n.cmp_pred << " " << join(n.operands, " "); break;
        case Opclass::CAST: os << " " << n.cast_kind << " " << n.operands[0]; break;
        case Opclass::CONST: os << " " << format_const(n); break;
        case Opclass::BRANCH:
          os << " " << n.targets[0].block << "(" << join(n.targets[0].args) << ")";
          break;
        case Opclass::COND_BRANCH:
          os << " " << n.operands[0];
          for (const auto& t : n.targets)
            os << " " << t.block << "(" << join(t.args) << ")";
          break;
        case Opclass::ACCEL_INVOKE: {
          os << " " << n.accel_model << " " << n.operands[0] << " " << n.operands[1];
          size_t k = 2;
          for (size_t g = 0; g < n.accel_groups.size(); ++g) {
            if (g) os << " ;";
            for (int j = 0; j < n.accel_groups[g]; ++j) os << " " << n.operands[k++];
          }
          break;
        }
        default:
          for (const auto& o : n.operands) os << " " << o;
          break;
      }
      os << "\n";
    }
  }
  return os.str();
}

void validate(const KernelProgram& program) {
  // Dense, unique block ids (0..n-1), in order.
  for (size_t i = 0; i < program.blocks.size(); ++i)
    if (program.blocks[i].id != static_cast<int>(i))
      throw ParseError("block IDs must be dense 0..n-1 in order; got " +
                           std::to_string(program.blocks[i].id) + " at position " +
                           std::to_string(i),
                       0);
  if (program.entry_block != 0) throw ParseError("entry block must be block 0", 0);

  std::set<std::string> param_names;
  for (const auto& p : program.params) param_names.insert(p.name);

  std::set<int> node_ids;
  for (const auto& b : program.blocks) {
    if (b.nodes.empty() || !b.nodes.back().is_terminator())
      throw ParseError("missing terminator, block " + std::to_string(b.id), 0);
    for (size_t i = 0; i + 1 < b.nodes.size(); ++i)
      if (b.nodes[i].is_terminator())
        throw ParseError("terminator is not last in block " + std::to_string(b.id), 0);

    std::set<std::string> defined(param_names);
    for (const auto& in : b.inputs) defined.insert(in);
    for (const auto& n : b.nodes) {
      if (!node_ids.insert(n.id).second)
        throw ParseError("duplicate node id " + std::to_string(n.id), 0);
      auto check_value = [&](const std::string& v) {
        if (!defined.count(v))
          throw ParseError("undefined value '" + v + "' in block " + std::to_string(b.id),
                           0);
      };
      for (const auto& o : n.operands) check_value(o);
      for (const auto& t : n.targets) {
        if (t.block < 0 || t.block >= static_cast<int>(program.blocks.size()))
          throw ParseError("branch to unknown block " + std::to_string(t.block), 0);
        if (t.args.size() != program.blocks[static_cast<size_t>(t.block)].inputs.size())
          throw ParseError("branch argument count does not match block " +
                               std::to_string(t.block) + " inputs",
                           0);
        for (const auto& a : t.args) check_value(a);
      }
      if (!n.result.empty()) defined.insert(n.result);
    }
  }
}

}  // namespace tilesim
