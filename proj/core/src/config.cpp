#include "tilesim/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace tilesim {

void CoreConfig::check() const {
  if (issue_width < 1) throw ConfigError("issue_width must be >= 1");
  if (window_size < 1) throw ConfigError("window_size must be >= 1");
  if (freq_hz == 0) throw ConfigError("freq_hz must be > 0");
}

LatencyTable LatencyTable::defaults() {
  LatencyTable t;
  t.entries[Opclass::IADD] = {1, 0.5e-12};
  t.entries[Opclass::IMUL] = {3, 1.5e-12};
  t.entries[Opclass::IDIV] = {12, 6.0e-12};
  t.entries[Opclass::FADD] = {4, 1.0e-12};
  t.entries[Opclass::FMUL] = {4, 2.0e-12};
  t.entries[Opclass::FDIV] = {8, 8.0e-12};
  t.entries[Opclass::CMP] = {1, 0.5e-12};
  t.entries[Opclass::CAST] = {1, 0.5e-12};
  t.entries[Opclass::BRANCH] = {1, 0.3e-12};
  t.entries[Opclass::COND_BRANCH] = {1, 0.3e-12};
  t.entries[Opclass::RETURN] = {1, 0.3e-12};
  t.entries[Opclass::TILE_ID] = {1, 0.1e-12};
  t.entries[Opclass::NUM_TILES] = {1, 0.1e-12};
  t.entries[Opclass::CONST] = {1, 0.1e-12};
  t.entries[Opclass::MOVE] = {1, 0.1e-12};
  t.entries[Opclass::SEND] = {1, 0.5e-12};
  t.entries[Opclass::RECV] = {1, 0.5e-12};
  return t;
}

bool LatencyTable::is_dynamic(Opclass op) const {
  return op == Opclass::LOAD || op == Opclass::STORE || op == Opclass::ACCEL_INVOKE;
}

CostEntry LatencyTable::cost(Opclass op) const {
  auto it = entries.find(op);
  if (it == entries.end())
    throw ConfigError(std::string("latency table has no entry for opclass ") +
                      opclass_name(op));
  if (it->second.latency < 1)
    throw ConfigError(std::string("latency for ") + opclass_name(op) + " must be >= 1");
  return it->second;
}

void CacheConfig::check(const std::string& which) const {
  auto fail = [&](const std::string& m) { throw ConfigError(which + ": " + m); };
  if (line_size == 0 || (line_size & (line_size - 1)) != 0)
    fail("line_size must be a power of two");
  if (assoc == 0) fail("assoc must be >= 1");
  if (size % (static_cast<uint64_t>(line_size) * assoc) != 0)
    fail("size must be divisible by line_size * assoc");
  if (latency < 1) fail("latency must be >= 1");
}

void DRAMConfig::check() const {
  if (epoch_length == 0) throw ConfigError("dram epoch_length must be >= 1");
  if (max_per_epoch == 0) throw ConfigError("dram max_per_epoch must be >= 1");
}

void SystemConfig::check() const {
  core.check();
  l1.check("l1");
  l2.check("l2");
  dram.check();
  if (mem_freq_hz == 0) throw ConfigError("mem freq_hz must be > 0");
}

namespace {

struct Cursor {
  std::string origin;
  int line = 0;
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
  }
};

uint64_t parse_u64(const std::string& v, const Cursor& c) {
  try {
    size_t pos;
    uint64_t x = std::stoull(v, &pos, 0);
    if (pos != v.size()) c.fail("bad integer '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    c.fail("bad integer '" + v + "'");
  }
}

double parse_f64(const std::string& v, const Cursor& c) {
  try {
    size_t pos;
    double x = std::stod(v, &pos);
    if (pos != v.size()) c.fail("bad number '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    c.fail("bad number '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const Cursor& c) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  c.fail("bad boolean '" + v + "'");
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void set_core(CoreConfig& core, const std::string& key, const std::string& val,
              const Cursor& c) {
  if (key == "issue_width") core.issue_width = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "window_size") core.window_size = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "lsq_size") core.lsq_size = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "live_dbb_limit")
    core.live_dbb_limit = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "freq_hz") core.freq_hz = parse_u64(val, c);
  else if (key == "misprediction_latency")
    core.misprediction_latency = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "alias_speculation") core.alias_speculation = parse_bool(val, c);
  else if (key == "terminal_loads") core.terminal_loads = parse_bool(val, c);
  else if (key == "branch") {
    if (val == "none") core.branch_mode = BranchMode::None;
    else if (val == "perfect") core.branch_mode = BranchMode::Perfect;
    else if (val == "static") core.branch_mode = BranchMode::Static;
    else c.fail("branch must be none|perfect|static");
  } else if (key.rfind("fu.", 0) == 0) {
    auto op = opclass_from_name(key.substr(3));
    if (!op) {
      // fu.* keys use upper-case opclass names in configs; accept both.
      std::string lower = key.substr(3);
      for (auto& ch : lower) ch = static_cast<char>(std::tolower(ch));
      op = opclass_from_name(lower);
    }
    if (!op) c.fail("unknown opclass in '" + key + "'");
    core.fu_counts[*op] = static_cast<uint32_t>(parse_u64(val, c));
  } else {
    c.fail("unknown key '" + key + "' in [core]");
  }
}

void set_cache(CacheConfig& cc, const std::string& key, const std::string& val,
               const Cursor& c) {
  if (key == "size") cc.size = parse_u64(val, c);
  else if (key == "line_size") cc.line_size = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "assoc") cc.assoc = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "latency") cc.latency = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "mshr") cc.mshr_entries = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "access_energy") cc.access_energy = parse_f64(val, c);
  else if (key == "prefetch") cc.prefetch.enable = parse_bool(val, c);
  else if (key == "prefetch_k") cc.prefetch.stride_words = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "prefetch_detect")
    cc.prefetch.detect_length = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "prefetch_degree")
    cc.prefetch.degree = static_cast<uint32_t>(parse_u64(val, c));
  else if (key == "prefetch_distance")
    cc.prefetch.distance = static_cast<uint32_t>(parse_u64(val, c));
  else c.fail("unknown cache key '" + key + "'");
}

void set_pair(SystemConfig& cfg, const std::string& section, const std::string& key,
              const std::string& val, const Cursor& c) {
  if (section == "core") {
    set_core(cfg.core, key, val, c);
  } else if (section == "l1") {
    set_cache(cfg.l1, key, val, c);
  } else if (section == "l2") {
    set_cache(cfg.l2, key, val, c);
  } else if (section == "dram") {
    if (key == "min_latency") cfg.dram.min_latency = static_cast<uint32_t>(parse_u64(val, c));
    else if (key == "epoch_length")
      cfg.dram.epoch_length = static_cast<uint32_t>(parse_u64(val, c));
    else if (key == "max_per_epoch")
      cfg.dram.max_per_epoch = static_cast<uint32_t>(parse_u64(val, c));
    else if (key == "access_energy") cfg.dram.access_energy = parse_f64(val, c);
    else c.fail("unknown key '" + key + "' in [dram]");
  } else if (section == "msg") {
    if (key == "capacity") cfg.msg.capacity = static_cast<uint32_t>(parse_u64(val, c));
    else if (key == "latency") cfg.msg.latency = static_cast<uint32_t>(parse_u64(val, c));
    else c.fail("unknown key '" + key + "' in [msg]");
  } else if (section == "mem") {
    if (key == "freq_hz") cfg.mem_freq_hz = parse_u64(val, c);
    else c.fail("unknown key '" + key + "' in [mem]");
  } else if (section == "sim") {
    if (key == "seed") cfg.seed = parse_u64(val, c);
    else c.fail("unknown key '" + key + "' in [sim]");
  } else if (section == "latency") {
    std::string lower = key;
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(ch));
    auto op = opclass_from_name(lower);
    if (!op) c.fail("unknown opclass '" + key + "' in [latency]");
    std::istringstream vs(val);
    CostEntry e;
    std::string lat, en;
    vs >> lat >> en;
    e.latency = static_cast<uint32_t>(parse_u64(lat, c));
    if (!en.empty()) e.energy = parse_f64(en, c);
    cfg.latency.entries[*op] = e;
  } else {
    c.fail("unknown section [" + section + "]");
  }
}

}  // namespace

SystemConfig parse_config(const std::string& text, const std::string& origin) {
  SystemConfig cfg;
  Cursor c{origin, 0};
  std::istringstream in(text);
  std::string raw, section;
  while (std::getline(in, raw)) {
    ++c.line;
    std::string line = trim(raw);
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') c.fail("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) c.fail("expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (section.empty()) c.fail("key outside of a section");
    set_pair(cfg, section, key, val, c);
  }
  cfg.check();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

void apply_override(SystemConfig& cfg, const std::string& spec) {
  auto eq = spec.find('=');
  auto dot = spec.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("--set expects section.key=value, got '" + spec + "'");
  Cursor c{"--set " + spec, 1};
  set_pair(cfg, spec.substr(0, dot), spec.substr(dot + 1, eq - dot - 1),
           trim(spec.substr(eq + 1)), c);
  cfg.check();
}

}  // namespace tilesim
