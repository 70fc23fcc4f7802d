// Dynamic trace format: one TraceRecord per retired instruction, with
// post-execution register/memory effects. The on-disk format is
// line-oriented (see docs/FORMATS.md) with header "#dilforge-trace v1".
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dilforge/isa.hpp"

namespace dilforge {

struct RegEffect {
  uint8_t reg = 0;
  uint64_t value = 0;
  bool operator==(const RegEffect&) const = default;
};

struct MemEffect {
  uint64_t addr = 0;
  uint8_t size = 0;
  uint64_t value = 0;
  bool operator==(const MemEffect&) const = default;
};

struct TraceRecord {
  uint64_t seq = 0;
  uint64_t ip = 0;
  Opcode op = Opcode::Halt;
  BranchCond cond = BranchCond::Eq;

  uint8_t n_reads = 0;
  std::array<RegEffect, 3> reads{};
  bool has_write = false;
  RegEffect write{};

  bool has_mem_read = false;   // prefetch records its computed address here
  MemEffect mem_read{};
  bool has_mem_write = false;
  MemEffect mem_write{};

  int8_t branch_taken = -1;  // -1 absent, 0/1 otherwise

  void add_read(uint8_t reg, uint64_t value) {
    reads[n_reads++] = {reg, value};
  }
  bool operator==(const TraceRecord&) const = default;
};

using Trace = std::vector<TraceRecord>;

void write_trace(std::ostream& out, const Trace& t);
void write_trace_file(const std::string& path, const Trace& t);

// Throws TraceParseError (with 1-based line number) on malformed input.
Trace read_trace(std::istream& in);
Trace read_trace_file(const std::string& path);

struct TraceParseError : std::runtime_error {
  TraceParseError(size_t line, const std::string& what);
  size_t line;
};

// FNV-1a over the canonical serialized form; used for round-trip checks
// and report digests.
uint64_t trace_digest(const Trace& t);
std::string digest_hex(uint64_t d);

// Exact producer links reconstructed from the trace: for every register
// and memory read, the seq of the last writer (or kNone when the value
// predates the trace / initial data). Shared by the slicer and the
// timing model.
class DependenceLinks {
 public:
  static constexpr uint64_t kNone = static_cast<uint64_t>(-1);

  explicit DependenceLinks(const Trace& t);

  // Producer seq of record `seq`'s i-th register read.
  uint64_t reg_producer(uint64_t seq, unsigned i) const {
    return reg_prod_[seq * 3 + i];
  }
  // Producer seq of record `seq`'s memory read (store that last wrote any
  // byte of the loaded word).
  uint64_t mem_producer(uint64_t seq) const { return mem_prod_[seq]; }

 private:
  std::vector<uint64_t> reg_prod_;
  std::vector<uint64_t> mem_prod_;
};

}  // namespace dilforge
