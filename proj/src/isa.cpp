#include "dilforge/isa.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace dilforge {

const char* opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Li: return "li";
    case Opcode::Load: return "load";
    case Opcode::Store: return "store";
    case Opcode::Add: return "add";
    case Opcode::Sub: return "sub";
    case Opcode::Mul: return "mul";
    case Opcode::Div: return "div";
    case Opcode::Mod: return "mod";
    case Opcode::Shl: return "shl";
    case Opcode::And: return "and";
    case Opcode::Or: return "or";
    case Opcode::Xor: return "xor";
    case Opcode::Mov: return "mov";
    case Opcode::Cmp: return "cmp";
    case Opcode::Br: return "br";
    case Opcode::Jmp: return "jmp";
    case Opcode::Call: return "call";
    case Opcode::Ret: return "ret";
    case Opcode::Prefetch: return "prefetch";
    case Opcode::Halt: return "halt";
  }
  return "?";
}

const char* cond_name(BranchCond c) {
  switch (c) {
    case BranchCond::Eq: return "eq";
    case BranchCond::Ne: return "ne";
    case BranchCond::Lt: return "lt";
    case BranchCond::Le: return "le";
    case BranchCond::Gt: return "gt";
    case BranchCond::Ge: return "ge";
  }
  return "?";
}

const Instruction* Program::find(uint64_t ip) const {
  for (const auto& in : instructions)
    if (in.ip == ip) return &in;
  return nullptr;
}

uint64_t Program::max_ip() const {
  uint64_t m = 0;
  for (const auto& in : instructions) m = std::max(m, in.ip);
  return m;
}

namespace {

void check_reg(std::vector<Diagnostic>& out, uint64_t ip, uint8_t r,
               const char* role) {
  if (r >= kNumRegs)
    out.push_back({ip, std::string("register id out of range for ") + role +
                           ": r" + std::to_string(r)});
}

}  // namespace

std::vector<Diagnostic> validate(const Program& prog) {
  std::vector<Diagnostic> out;
  if (prog.instructions.empty()) {
    out.push_back({std::nullopt, "no entry instruction"});
    return out;
  }

  std::unordered_set<uint64_t> ips;
  for (const auto& in : prog.instructions) {
    if (!ips.insert(in.ip).second)
      out.push_back({in.ip, "duplicate ip"});
  }
  if (!ips.count(prog.entry))
    out.push_back({prog.entry, "entry ip 0x" /*hex below*/ +
                                   std::to_string(prog.entry) +
                                   " is not an instruction"});

  for (const auto& in : prog.instructions) {
    if (in.dest) check_reg(out, in.ip, *in.dest, "dest");
    for (const auto& s : in.srcs)
      if (!s.is_imm) check_reg(out, in.ip, s.reg, "source");
    if (in.addr) {
      check_reg(out, in.ip, in.addr->base, "address base");
      if (in.addr->index) check_reg(out, in.ip, *in.addr->index, "address index");
      if (!is_memory_op(in.op))
        out.push_back({in.ip, "address expression on a non-memory opcode"});
    } else if (is_memory_op(in.op)) {
      out.push_back({in.ip, "memory opcode without an address expression"});
    }
    if (in.dest && !has_dest(in.op))
      out.push_back({in.ip, std::string(opcode_name(in.op)) + " must not have a dest"});
    if (!in.dest && has_dest(in.op))
      out.push_back({in.ip, std::string(opcode_name(in.op)) + " requires a dest"});
    if (is_branch(in.op) && !ips.count(in.target))
      out.push_back({in.ip, "branch target 0x" + [&] {
                       char buf[32];
                       snprintf(buf, sizeof buf, "%llx",
                                static_cast<unsigned long long>(in.target));
                       return std::string(buf);
                     }() + " is not an instruction"});
  }

  // Data segments must not overlap each other or the stack region.
  struct Range { uint64_t lo, hi; std::string name; };
  std::vector<Range> ranges;
  for (const auto& d : prog.data)
    if (!d.bytes.empty())
      ranges.push_back({d.base, d.base + d.bytes.size(), d.name});
  if (prog.stack_size > 0 && prog.stack_base > 0)
    ranges.push_back({prog.stack_base - prog.stack_size, prog.stack_base, "<stack>"});
  std::sort(ranges.begin(), ranges.end(),
            [](const Range& a, const Range& b) { return a.lo < b.lo; });
  for (size_t i = 1; i < ranges.size(); ++i)
    if (ranges[i].lo < ranges[i - 1].hi)
      out.push_back({std::nullopt, "data segments overlap: " + ranges[i - 1].name +
                                       " and " + ranges[i].name});
  return out;
}

uint64_t ProgramBuilder::emit(Instruction in) {
  in.ip = prog_.instructions.size();
  prog_.instructions.push_back(std::move(in));
  return prog_.instructions.back().ip;
}

uint64_t ProgramBuilder::li(uint8_t rd, uint64_t v) {
  Instruction in;
  in.op = Opcode::Li;
  in.dest = rd;
  in.srcs = {Operand::i(v)};
  return emit(in);
}

uint64_t ProgramBuilder::mov(uint8_t rd, uint8_t rs) {
  Instruction in;
  in.op = Opcode::Mov;
  in.dest = rd;
  in.srcs = {Operand::r(rs)};
  return emit(in);
}

uint64_t ProgramBuilder::alu(Opcode op, uint8_t rd, Operand a, Operand b) {
  Instruction in;
  in.op = op;
  in.dest = rd;
  in.srcs = {a, b};
  return emit(in);
}

uint64_t ProgramBuilder::cmp(uint8_t rd, Operand a, Operand b) {
  return alu(Opcode::Cmp, rd, a, b);
}

uint64_t ProgramBuilder::load(uint8_t rd, AddrExpr a) {
  Instruction in;
  in.op = Opcode::Load;
  in.dest = rd;
  in.addr = a;
  return emit(in);
}

uint64_t ProgramBuilder::store(uint8_t rs, AddrExpr a) {
  Instruction in;
  in.op = Opcode::Store;
  in.srcs = {Operand::r(rs)};
  in.addr = a;
  return emit(in);
}

uint64_t ProgramBuilder::prefetch(AddrExpr a) {
  Instruction in;
  in.op = Opcode::Prefetch;
  in.addr = a;
  return emit(in);
}

uint64_t ProgramBuilder::br(BranchCond c, uint8_t rs, Label l) {
  Instruction in;
  in.op = Opcode::Br;
  in.cond = c;
  in.srcs = {Operand::r(rs)};
  fixups_.emplace_back(prog_.instructions.size(), l);
  return emit(in);
}

uint64_t ProgramBuilder::jmp(Label l) {
  Instruction in;
  in.op = Opcode::Jmp;
  fixups_.emplace_back(prog_.instructions.size(), l);
  return emit(in);
}

uint64_t ProgramBuilder::call(Label l) {
  Instruction in;
  in.op = Opcode::Call;
  fixups_.emplace_back(prog_.instructions.size(), l);
  return emit(in);
}

uint64_t ProgramBuilder::ret() {
  Instruction in;
  in.op = Opcode::Ret;
  return emit(in);
}

uint64_t ProgramBuilder::halt() {
  Instruction in;
  in.op = Opcode::Halt;
  return emit(in);
}

void ProgramBuilder::data_segment(std::string name, uint64_t base,
                                  std::vector<uint8_t> bytes) {
  prog_.data.push_back({std::move(name), base, std::move(bytes), ""});
}

Program ProgramBuilder::build() {
  for (auto& [idx, label] : fixups_) {
    if (labels_[label] == kUnbound)
      throw std::runtime_error("unbound label " + std::to_string(label));
    prog_.instructions[idx].target = labels_[label];
  }
  prog_.entry = 0;
  return prog_;
}

}  // namespace dilforge
