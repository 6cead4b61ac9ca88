#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tilesim {

struct MemRecord {
  uint32_t node = 0;  // static node id
  uint64_t address = 0;
  uint16_t size = 0;
  uint8_t is_write = 0;
};

// One SEND/RECV executed by this tile, in dynamic program order.
struct CommRecord {
  uint32_t node = 0;
  int32_t peer = 0;       // destination tile for SEND, source tile for RECV
  uint16_t size = 8;      // payload bytes
};

struct AccelInvocation {
  std::string model_id;
  std::vector<std::vector<uint64_t>> iteration_counts;  // [process][loop]
  uint64_t bytes_transferred = 0;
  uint64_t num_instances = 1;
};

struct DynamicTrace {
  std::vector<uint32_t> ctrl;      // basic-block ids in execution order
  std::vector<MemRecord> mem;      // dynamic program order
  std::vector<CommRecord> comm;    // dynamic program order
  std::vector<AccelInvocation> accel;
  int tile_id = 0;
  int num_tiles = 1;
};

// --- Control-flow trace ------------------------------------------------------
void write_ctrl_text(std::ostream& out, const std::vector<uint32_t>& ctrl);
void write_ctrl_binary(std::ostream& out, const std::vector<uint32_t>& ctrl);
std::vector<uint32_t> read_ctrl_text(std::istream& in);
std::vector<uint32_t> read_ctrl_binary(std::istream& in);

// --- Memory trace (fixed-width little-endian records) ------------------------
void write_mem_binary(std::ostream& out, const std::vector<MemRecord>& mem);
std::vector<MemRecord> read_mem_binary(std::istream& in);

// --- Communication trace ------------------------------------------------------
void write_comm_text(std::ostream& out, const std::vector<CommRecord>& comm);
std::vector<CommRecord> read_comm_text(std::istream& in);

// --- Accelerator trace (textual) ---------------------------------------------
void write_accel_text(std::ostream& out, const std::vector<AccelInvocation>& accel);
std::vector<AccelInvocation> read_accel_text(std::istream& in);

// Writes all trace streams of one tile under dir with the prefix
// "<kernel>.t<tile>". binary_ctrl selects the binary ctrl encoding.
void write_trace_files(const std::string& dir, const std::string& kernel,
                       const DynamicTrace& trace, bool binary_ctrl);

}  // namespace tilesim
