// dilforge: abstract register-machine ISA — static programs and their
// validation. The machine has 16 64-bit general-purpose registers (r15 is
// the stack pointer by convention), byte-addressed sparse memory, and a
// load/store instruction set. Memory is only ever touched through an
// explicit address expression (base + index*scale + disp).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dilforge {

constexpr unsigned kNumRegs = 16;
constexpr unsigned kSpReg = 15;  // stack pointer by convention
constexpr unsigned kAccessSize = 8;

enum class Opcode : uint8_t {
  Li,      // load-immediate
  Load,
  Store,
  Add,
  Sub,
  Mul,
  Div,     // unsigned; divisor 0 faults
  Mod,
  Shl,
  And,
  Or,
  Xor,
  Mov,
  Cmp,     // signed three-way: dest = -1/0/1
  Br,      // conditional branch, tests one register against zero
  Jmp,
  Call,
  Ret,
  Prefetch,  // computes an address, never faults, architecturally inert
  Halt,
};

enum class BranchCond : uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

const char* opcode_name(Opcode op);
const char* cond_name(BranchCond c);

inline bool is_memory_op(Opcode op) {
  return op == Opcode::Load || op == Opcode::Store || op == Opcode::Prefetch;
}
inline bool is_branch(Opcode op) {
  return op == Opcode::Br || op == Opcode::Jmp || op == Opcode::Call;
}
inline bool has_dest(Opcode op) {
  switch (op) {
    case Opcode::Store:
    case Opcode::Br:
    case Opcode::Jmp:
    case Opcode::Call:
    case Opcode::Ret:
    case Opcode::Prefetch:
    case Opcode::Halt:
      return false;
    default:
      return true;
  }
}

// base + index*scale + disp; index optional.
struct AddrExpr {
  uint8_t base = 0;
  std::optional<uint8_t> index;
  uint8_t scale = 1;
  int64_t disp = 0;

  bool operator==(const AddrExpr&) const = default;
};

struct Operand {
  bool is_imm = false;
  uint8_t reg = 0;
  uint64_t imm = 0;

  static Operand r(uint8_t id) { return {false, id, 0}; }
  static Operand i(uint64_t v) { return {true, 0, v}; }
  bool operator==(const Operand&) const = default;
};

struct Instruction {
  uint64_t ip = 0;
  Opcode op = Opcode::Halt;
  BranchCond cond = BranchCond::Eq;     // Br only
  std::optional<uint8_t> dest;
  std::vector<Operand> srcs;            // 0..2 entries
  std::optional<AddrExpr> addr;         // memory ops only
  uint64_t target = 0;                  // Br/Jmp/Call

  bool operator==(const Instruction&) const = default;
};

struct DataSegment {
  std::string name;
  uint64_t base = 0;
  std::vector<uint8_t> bytes;
  // When non-empty the bytes live in a sidecar file and `bytes` holds the
  // loaded contents; the path is kept so the segment round-trips by
  // reference instead of inline hex.
  std::string file;
};

struct Program {
  std::vector<Instruction> instructions;  // list order defines fall-through
  uint64_t entry = 0;
  std::vector<DataSegment> data;
  uint64_t stack_base = 0;
  uint64_t stack_size = 1 << 16;

  const Instruction* find(uint64_t ip) const;
  uint64_t max_ip() const;
};

struct Diagnostic {
  std::optional<uint64_t> ip;
  std::string message;
};

// Empty result iff the program satisfies every static invariant: unique
// ips, register ids in range, branch/call targets present, memory ops
// carry an address expression (and only memory ops do), prefetch/store
// have no dest, data segments non-overlapping, entry exists.
std::vector<Diagnostic> validate(const Program& prog);

// Convenience: incrementally builds a Program with symbolic labels; ips
// are assigned sequentially from 0 in emission order.
class ProgramBuilder {
 public:
  using Label = size_t;

  Label new_label() {
    labels_.push_back(kUnbound);
    return labels_.size() - 1;
  }
  void bind(Label l) { labels_[l] = prog_.instructions.size(); }
  Label here() {
    Label l = new_label();
    bind(l);
    return l;
  }

  uint64_t li(uint8_t rd, uint64_t v);
  uint64_t mov(uint8_t rd, uint8_t rs);
  uint64_t alu(Opcode op, uint8_t rd, Operand a, Operand b);
  uint64_t add(uint8_t rd, uint8_t ra, Operand b) { return alu(Opcode::Add, rd, Operand::r(ra), b); }
  uint64_t sub(uint8_t rd, uint8_t ra, Operand b) { return alu(Opcode::Sub, rd, Operand::r(ra), b); }
  uint64_t mul(uint8_t rd, uint8_t ra, Operand b) { return alu(Opcode::Mul, rd, Operand::r(ra), b); }
  uint64_t div(uint8_t rd, uint8_t ra, Operand b) { return alu(Opcode::Div, rd, Operand::r(ra), b); }
  uint64_t mod(uint8_t rd, uint8_t ra, Operand b) { return alu(Opcode::Mod, rd, Operand::r(ra), b); }
  uint64_t shl(uint8_t rd, uint8_t ra, Operand b) { return alu(Opcode::Shl, rd, Operand::r(ra), b); }
  uint64_t and_(uint8_t rd, uint8_t ra, Operand b) { return alu(Opcode::And, rd, Operand::r(ra), b); }
  uint64_t or_(uint8_t rd, uint8_t ra, Operand b) { return alu(Opcode::Or, rd, Operand::r(ra), b); }
  uint64_t xor_(uint8_t rd, uint8_t ra, Operand b) { return alu(Opcode::Xor, rd, Operand::r(ra), b); }
  uint64_t cmp(uint8_t rd, Operand a, Operand b);
  uint64_t load(uint8_t rd, AddrExpr a);
  uint64_t store(uint8_t rs, AddrExpr a);
  uint64_t prefetch(AddrExpr a);
  uint64_t br(BranchCond c, uint8_t rs, Label l);
  uint64_t jmp(Label l);
  uint64_t call(Label l);
  uint64_t ret();
  uint64_t halt();

  void data_segment(std::string name, uint64_t base, std::vector<uint8_t> bytes);
  void set_stack(uint64_t base, uint64_t size) {
    prog_.stack_base = base;
    prog_.stack_size = size;
  }

  // Resolves labels to ips; throws std::runtime_error on unbound labels.
  Program build();

 private:
  static constexpr size_t kUnbound = static_cast<size_t>(-1);
  uint64_t emit(Instruction in);

  Program prog_;
  std::vector<size_t> labels_;                    // label -> instruction index
  std::vector<std::pair<size_t, Label>> fixups_;  // instruction index -> label
};

}  // namespace dilforge
