// Interpreter: deterministic execution of a Program against its data
// segments, emitting one TraceRecord per retired instruction.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "dilforge/isa.hpp"
#include "dilforge/trace.hpp"

namespace dilforge {

// Sparse byte-addressed memory. Mappedness is fixed at construction from
// the program's data segments plus the stack region [stack_base -
// stack_size, stack_base); load/store outside mapped ranges fault.
class Memory {
 public:
  void map_range(uint64_t base, uint64_t len);
  bool is_mapped(uint64_t addr, uint64_t len) const;
  void write_initial(uint64_t addr, const std::vector<uint8_t>& bytes);

  uint64_t read_u64(uint64_t addr) const;
  void write_u64(uint64_t addr, uint64_t value);

  // Snapshot of all touched/initialized bytes in a range.
  std::vector<uint8_t> read_range(uint64_t addr, uint64_t len) const;

 private:
  static constexpr uint64_t kPageBits = 12;
  using Page = std::array<uint8_t, 1 << kPageBits>;

  uint8_t* page_for(uint64_t addr, bool create);
  const uint8_t* page_for(uint64_t addr) const;

  std::unordered_map<uint64_t, std::unique_ptr<Page>> pages_;
  std::map<uint64_t, uint64_t> mapped_;  // base -> end (coalesced)
};

struct ArchState {
  std::array<uint64_t, kNumRegs> regs{};
  Memory memory;
  uint64_t pc = 0;
  bool halted = false;
};

enum class RunStatus : uint8_t {
  Halted,
  BudgetExceeded,  // distinct non-error outcome
  Fault,
};

enum class FaultKind : uint8_t {
  None,
  UnmappedLoad,
  UnmappedStore,
  DivideByZero,
  BadReturnTarget,
  BadFallthrough,  // ran off the end of the instruction list
};

struct RunResult {
  RunStatus status = RunStatus::Halted;
  FaultKind fault = FaultKind::None;
  uint64_t fault_ip = 0;
  uint64_t fault_seq = 0;
  uint64_t fault_addr = 0;
  std::string describe() const;
};

struct ExecOptions {
  uint64_t max_instructions = 50'000'000;
  bool collect_trace = true;
};

struct Execution {
  RunResult result;
  ArchState state;
  Trace trace;
};

// Precondition: validate(prog).empty(). r15 starts at prog.stack_base,
// all other registers at zero.
Execution interpret(const Program& prog, const ExecOptions& opts = {});

}  // namespace dilforge
