#include "tilesim/trace.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tilesim {

namespace {

void put_le(std::ostream& out, uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

bool get_le(std::istream& in, uint64_t& v, int bytes) {
  v = 0;
  for (int i = 0; i < bytes; ++i) {
    int c = in.get();
    if (c == EOF) return i == 0 ? false : throw std::runtime_error("truncated trace record");
    v |= static_cast<uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return true;
}

}  // namespace

void write_ctrl_text(std::ostream& out, const std::vector<uint32_t>& ctrl) {
  for (uint32_t b : ctrl) out << b << "\n";
}

void write_ctrl_binary(std::ostream& out, const std::vector<uint32_t>& ctrl) {
  for (uint32_t b : ctrl) put_le(out, b, 4);
}

std::vector<uint32_t> read_ctrl_text(std::istream& in) {
  std::vector<uint32_t> ctrl;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ctrl.push_back(static_cast<uint32_t>(std::stoul(line)));
  }
  return ctrl;
}

std::vector<uint32_t> read_ctrl_binary(std::istream& in) {
  std::vector<uint32_t> ctrl;
  uint64_t v;
  while (get_le(in, v, 4)) ctrl.push_back(static_cast<uint32_t>(v));
  return ctrl;
}

void write_mem_binary(std::ostream& out, const std::vector<MemRecord>& mem) {
  for (const auto& r : mem) {
    put_le(out, r.node, 4);
    put_le(out, r.address, 8);
    put_le(out, r.size, 2);
    put_le(out, r.is_write, 1);
  }
}

std::vector<MemRecord> read_mem_binary(std::istream& in) {
  std::vector<MemRecord> mem;
  uint64_t v;
  while (get_le(in, v, 4)) {
    MemRecord r;
    r.node = static_cast<uint32_t>(v);
    get_le(in, v, 8);
    r.address = v;
    get_le(in, v, 2);
    r.size = static_cast<uint16_t>(v);
    get_le(in, v, 1);
    r.is_write = static_cast<uint8_t>(v);
    mem.push_back(r);
  }
  return mem;
}

void write_comm_text(std::ostream& out, const std::vector<CommRecord>& comm) {
  for (const auto& r : comm)
    out << "comm node=" << r.node << " peer=" << r.peer << " size=" << r.size << "\n";
}

std::vector<CommRecord> read_comm_text(std::istream& in) {
  std::vector<CommRecord> comm;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CommRecord r;
    unsigned node, size;
    int peer;
    if (std::sscanf(line.c_str(), "comm node=%u peer=%d size=%u", &node, &peer, &size) != 3)
      throw std::runtime_error("bad comm trace line: " + line);
    r.node = node;
    r.peer = peer;
    r.size = static_cast<uint16_t>(size);
    comm.push_back(r);
  }
  return comm;
}

void write_accel_text(std::ostream& out, const std::vector<AccelInvocation>& accel) {
  for (const auto& a : accel) {
    out << "accel " << a.model_id << " instances=" << a.num_instances
        << " bytes=" << a.bytes_transferred << " iters=";
    for (size_t p = 0; p < a.iteration_counts.size(); ++p) {
      if (p) out << ";";
      for (size_t l = 0; l < a.iteration_counts[p].size(); ++l) {
        if (l) out << ",";
        out << a.iteration_counts[p][l];
      }
    }
    out << "\n";
  }
}

std::vector<AccelInvocation> read_accel_text(std::istream& in) {
  std::vector<AccelInvocation> accel;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag, model, field;
    ls >> tag >> model;
    if (tag != "accel") throw std::runtime_error("bad accel trace line: " + line);
    AccelInvocation a;
    a.model_id = model;
    while (ls >> field) {
      auto eq = field.find('=');
      if (eq == std::string::npos) throw std::runtime_error("bad accel field: " + field);
      std::string key = field.substr(0, eq), val = field.substr(eq + 1);
      if (key == "instances") {
        a.num_instances = std::stoull(val);
      } else if (key == "bytes") {
        a.bytes_transferred = std::stoull(val);
      } else if (key == "iters") {
        std::istringstream vs(val);
        std::string group;
        while (std::getline(vs, group, ';')) {
          std::vector<uint64_t> loops;
          std::istringstream gs(group);
          std::string item;
          while (std::getline(gs, item, ','))
            if (!item.empty()) loops.push_back(std::stoull(item));
          a.iteration_counts.push_back(std::move(loops));
        }
      } else {
        throw std::runtime_error("unknown accel field: " + key);
      }
    }
    accel.push_back(std::move(a));
  }
  return accel;
}

void write_trace_files(const std::string& dir, const std::string& kernel,
                       const DynamicTrace& trace, bool binary_ctrl) {
  std::string prefix = dir + "/" + kernel + ".t" + std::to_string(trace.tile_id);
  {
    std::ofstream f(prefix + (binary_ctrl ? ".ctrl.bin" : ".ctrl"),
                    binary_ctrl ? std::ios::binary : std::ios::out);
    if (!f) throw std::runtime_error("cannot write ctrl trace under " + dir);
    binary_ctrl ? write_ctrl_binary(f, trace.ctrl) : write_ctrl_text(f, trace.ctrl);
  }
  {
    std::ofstream f(prefix + ".mem.bin", std::ios::binary);
    write_mem_binary(f, trace.mem);
  }
  {
    std::ofstream f(prefix + ".comm");
    write_comm_text(f, trace.comm);
  }
  {
    std::ofstream f(prefix + ".accel");
    write_accel_text(f, trace.accel);
  }
}

}  // namespace tilesim
