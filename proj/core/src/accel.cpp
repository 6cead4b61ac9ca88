#include "tilesim/accel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace tilesim {

void AccelModelParams::check() const {
  if (loop_latency.empty())
    throw AccelError("model " + model_id + ": needs at least one process");
  for (const auto& proc : loop_latency) {
    if (proc.empty())
      throw AccelError("model " + model_id + ": process with no loops");
    for (uint32_t lat : proc)
      if (lat < 1) throw AccelError("model " + model_id + ": loop latency must be >= 1");
  }
  if (avg_power < 0) throw AccelError("model " + model_id + ": negative power");
  if (freq_hz <= 0) throw AccelError("model " + model_id + ": freq must be > 0");
}

AccelResult accel_estimate(const AccelModelParams& params, const AccelInvocation& inv) {
  params.check();
  if (inv.num_instances < 1) throw AccelError("num_instances must be >= 1");
  if (inv.iteration_counts.size() != params.loop_latency.size())
    throw AccelError("model " + params.model_id + ": invocation has " +
                     std::to_string(inv.iteration_counts.size()) + " processes, model has " +
                     std::to_string(params.loop_latency.size()));
  size_t nproc = params.loop_latency.size();

  // Per-process totals and the pipelined combination: the bottleneck process
  // runs end to end; every other process contributes one iteration of its
  // first loop as pipeline fill/drain.
  uint64_t max_total = 0;
  size_t bottleneck = 0;
  std::vector<uint64_t> totals(nproc, 0);
  for (size_t p = 0; p < nproc; ++p) {
    if (inv.iteration_counts[p].size() != params.loop_latency[p].size())
      throw AccelError("model " + params.model_id + ": process " + std::to_string(p) +
                       " loop count mismatch");
    for (size_t l = 0; l < params.loop_latency[p].size(); ++l)
      totals[p] += inv.iteration_counts[p][l] * params.loop_latency[p][l];
    if (totals[p] > max_total) {
      max_total = totals[p];
      bottleneck = p;
    }
  }
  uint64_t compute_cycles = max_total + params.invocation_overhead;
  for (size_t p = 0; p < nproc; ++p)
    if (p != bottleneck) compute_cycles += params.loop_latency[p][0];

  double compute_time = static_cast<double>(compute_cycles) / params.freq_hz;
  double bw_time = 0.0;
  if (inv.bytes_transferred > 0) {
    if (params.max_bandwidth > 0) {
      double share = params.max_bandwidth / static_cast<double>(inv.num_instances);
      bw_time = static_cast<double>(inv.bytes_transferred) / share;
    }
    // max_bandwidth == 0 means unlimited; bytes cost no extra time.
  }

  AccelResult r;
  r.bytes = inv.bytes_transferred;
  r.bandwidth_limited = bw_time > compute_time;
  r.time = r.bandwidth_limited ? bw_time : compute_time;
  r.cycles = r.bandwidth_limited
                 ? static_cast<uint64_t>(std::ceil(r.time * params.freq_hz))
                 : compute_cycles;
  r.energy = params.avg_power * r.time * static_cast<double>(inv.num_instances);
  return r;
}

CoreConfig prertl_config(const CoreConfig& base, const PreRtlKnobs& knobs) {
  CoreConfig cfg = base;
  cfg.live_dbb_limit = knobs.live_dbb_limit;
  if (knobs.window_size != 0) cfg.window_size = knobs.window_size;
  for (const auto& [op, n] : knobs.fu_counts) cfg.fu_counts[op] = n;
  return cfg;
}

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw AccelError(origin + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

AccelLibrary parse_accel_models(const std::string& text, const std::string& origin) {
  AccelLibrary lib;
  AccelModelParams* cur = nullptr;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "model") {
      std::string id;
      if (!(ls >> id)) fail(origin, lineno, "model needs a name");
      if (lib.count(id)) fail(origin, lineno, "duplicate model '" + id + "'");
      cur = &lib[id];
      cur->model_id = id;
      continue;
    }
    if (!cur) fail(origin, lineno, "'" + word + "' before any model");
    if (word == "process") {
      std::string idx;
      if (!(ls >> idx)) fail(origin, lineno, "process needs an index");
      if (!idx.empty() && idx.back() == ':') idx.pop_back();
      size_t p = std::stoul(idx);
      if (p != cur->loop_latency.size())
        fail(origin, lineno, "processes must be declared in order");
      cur->loop_latency.emplace_back();
      std::string tok;
      while (ls >> tok) {
        // `loop <j> latency=<cycles>`
        if (tok != "loop") fail(origin, lineno, "expected 'loop', got '" + tok + "'");
        std::string j, lat;
        if (!(ls >> j >> lat)) fail(origin, lineno, "malformed loop clause");
        if (lat.rfind("latency=", 0) != 0)
          fail(origin, lineno, "expected latency=<cycles>");
        if (std::stoul(j) != cur->loop_latency.back().size())
          fail(origin, lineno, "loops must be declared in order");
        cur->loop_latency.back().push_back(
            static_cast<uint32_t>(std::stoul(lat.substr(8))));
      }
      if (cur->loop_latency.back().empty())
        fail(origin, lineno, "process with no loops");
      continue;
    }
    auto eq = word.find('=');
    std::string key = word, val;
    if (eq != std::string::npos) {
      key = word.substr(0, eq);
      val = word.substr(eq + 1);
    }
    if (val.empty()) {
      std::string rest;
      ls >> rest;
      if (rest == "=") ls >> val;
      else if (!rest.empty() && rest[0] == '=') val = rest.substr(1);
      else val = rest;
    }
    if (val.empty()) fail(origin, lineno, "expected " + key + "=<value>");
    try {
      if (key == "power") cur->avg_power = std::stod(val);
      else if (key == "freq") cur->freq_hz = std::stod(val);
      else if (key == "max_bandwidth") cur->max_bandwidth = std::stod(val);
      else if (key == "overhead") cur->invocation_overhead = std::stoull(val);
      else fail(origin, lineno, "unknown key '" + key + "'");
    } catch (const AccelError&) {
      throw;
    } catch (...) {
      fail(origin, lineno, "bad value '" + val + "' for " + key);
    }
  }
  for (auto& [id, m] : lib) m.check();
  return lib;
}

AccelLibrary load_accel_models(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw AccelError("cannot open accelerator model file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_accel_models(ss.str(), path);
}

}  // namespace tilesim
