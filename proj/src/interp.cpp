#include "dilforge/interp.hpp"

#include <cstring>
#include <stdexcept>

namespace dilforge {

void Memory::map_range(uint64_t base, uint64_t len) {
  if (len == 0) return;
  uint64_t lo = base, hi = base + len;
  // Coalesce with neighbours so is_mapped stays a single lookup.
  auto it = mapped_.upper_bound(lo);
  if (it != mapped_.begin()) {
    auto prev = std::prev(it);
    if (prev->second >= lo) {
      lo = prev->first;
      hi = std::max(hi, prev->second);
      it = mapped_.erase(prev);
    }
  }
  while (it != mapped_.end() && it->first <= hi) {
    hi = std::max(hi, it->second);
    it = mapped_.erase(it);
  }
  mapped_[lo] = hi;
}

bool Memory::is_mapped(uint64_t addr, uint64_t len) const {
  auto it = mapped_.upper_bound(addr);
  if (it == mapped_.begin()) return false;
  --it;
  return addr >= it->first && addr + len <= it->second;
}

uint8_t* Memory::page_for(uint64_t addr, bool create) {
  uint64_t key = addr >> kPageBits;
  auto it = pages_.find(key);
  if (it == pages_.end()) {
    if (!create) return nullptr;
    it = pages_.emplace(key, std::make_unique<Page>()).first;
    it->second->fill(0);
  }
  return it->second->data();
}

const uint8_t* Memory::page_for(uint64_t addr) const {
  auto it = pages_.find(addr >> kPageBits);
  return it == pages_.end() ? nullptr : it->second->data();
}

void Memory::write_initial(uint64_t addr, const std::vector<uint8_t>& bytes) {
  map_range(addr, bytes.size());
  for (size_t i = 0; i < bytes.size();) {
    uint64_t a = addr + i;
    uint64_t off = a & ((1 << kPageBits) - 1);
    size_t n = std::min<size_t>(bytes.size() - i, (1 << kPageBits) - off);
    std::memcpy(page_for(a, true) + off, bytes.data() + i, n);
    i += n;
  }
}

uint64_t Memory::read_u64(uint64_t addr) const {
  uint64_t off = addr & ((1 << kPageBits) - 1);
  if (off + 8 <= (1 << kPageBits)) {
    const uint8_t* p = page_for(addr);
    if (!p) return 0;
    uint64_t v;
    std::memcpy(&v, p + off, 8);
    return v;
  }
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    const uint8_t* p = page_for(addr + i);
    uint64_t byte = p ? p[(addr + i) & ((1 << kPageBits) - 1)] : 0;
    v |= byte << (8 * i);
  }
  return v;
}

void Memory::write_u64(uint64_t addr, uint64_t value) {
  uint64_t off = addr & ((1 << kPageBits) - 1);
  if (off + 8 <= (1 << kPageBits)) {
    std::memcpy(page_for(addr, true) + off, &value, 8);
    return;
  }
  for (int i = 0; i < 8; ++i) {
    uint8_t* p = page_for(addr + i, true);
    p[(addr + i) & ((1 << kPageBits) - 1)] = (value >> (8 * i)) & 0xff;
  }
}

std::vector<uint8_t> Memory::read_range(uint64_t addr, uint64_t len) const {
  std::vector<uint8_t> out(len, 0);
  for (uint64_t i = 0; i < len; ++i) {
    const uint8_t* p = page_for(addr + i);
    if (p) out[i] = p[(addr + i) & ((1 << kPageBits) - 1)];
  }
  return out;
}

std::string RunResult::describe() const {
  switch (status) {
    case RunStatus::Halted: return "halted";
    case RunStatus::BudgetExceeded: return "instruction budget exceeded";
    case RunStatus::Fault: {
      const char* kind = "fault";
      switch (fault) {
        case FaultKind::UnmappedLoad: kind = "load from unmapped address"; break;
        case FaultKind::UnmappedStore: kind = "store to unmapped address"; break;
        case FaultKind::DivideByZero: kind = "divide by zero"; break;
        case FaultKind::BadReturnTarget: kind = "return to invalid ip"; break;
        case FaultKind::BadFallthrough: kind = "fell off instruction list"; break;
        default: break;
      }
      char buf[128];
      snprintf(buf, sizeof buf, "%s at ip 0x%llx (seq %llu)", kind,
               static_cast<unsigned long long>(fault_ip),
               static_cast<unsigned long long>(fault_seq));
      return buf;
    }
  }
  return "?";
}

namespace {

struct Ctx {
  const Program& prog;
  ArchState st;
  Trace trace;
  std::unordered_map<uint64_t, size_t> ip_index;

  explicit Ctx(const Program& p) : prog(p) {
    ip_index.reserve(p.instructions.size() * 2);
    for (size_t i = 0; i < p.instructions.size(); ++i)
      ip_index.emplace(p.instructions[i].ip, i);
  }
};

inline uint64_t operand_value(const Ctx& c, const Operand& o, TraceRecord& rec,
                              bool record) {
  if (o.is_imm) return o.imm;
  uint64_t v = c.st.regs[o.reg];
  if (record) rec.add_read(o.reg, v);
  return v;
}

inline uint64_t addr_value(const Ctx& c, const AddrExpr& a, TraceRecord& rec,
                           bool record) {
  uint64_t v = c.st.regs[a.base];
  if (record) rec.add_read(a.base, v);
  uint64_t addr = v + static_cast<uint64_t>(a.disp);
  if (a.index) {
    uint64_t iv = c.st.regs[*a.index];
    if (record) rec.add_read(*a.index, iv);
    addr += iv * a.scale;
  }
  return addr;
}

}  // namespace

Execution interpret(const Program& prog, const ExecOptions& opts) {
  Ctx c(prog);
  for (const auto& d : prog.data) c.st.memory.write_initial(d.base, d.bytes);
  if (prog.stack_size > 0 && prog.stack_base > 0)
    c.st.memory.map_range(prog.stack_base - prog.stack_size, prog.stack_size);
  c.st.regs[kSpReg] = prog.stack_base;
  c.st.pc = prog.entry;

  Execution ex;
  size_t idx = c.ip_index.at(prog.entry);
  uint64_t seq = 0;
  if (opts.collect_trace) c.trace.reserve(std::min<uint64_t>(opts.max_instructions, 1 << 20));

  auto fault = [&](FaultKind k, uint64_t ip, uint64_t addr) {
    ex.result.status = RunStatus::Fault;
    ex.result.fault = k;
    ex.result.fault_ip = ip;
    ex.result.fault_seq = seq;
    ex.result.fault_addr = addr;
  };

  while (!c.st.halted) {
    if (seq >= opts.max_instructions) {
      ex.result.status = RunStatus::BudgetExceeded;
      break;
    }
    if (idx >= prog.instructions.size()) {
      fault(FaultKind::BadFallthrough, c.st.pc, 0);
      break;
    }
    const Instruction& in = prog.instructions[idx];
    c.st.pc = in.ip;

    TraceRecord rec;
    rec.seq = seq;
    rec.ip = in.ip;
    rec.op = in.op;
    rec.cond = in.cond;

    size_t next = idx + 1;
    bool faulted = false;

    switch (in.op) {
      case Opcode::Li: {
        uint64_t v = in.srcs[0].imm;
        c.st.regs[*in.dest] = v;
        rec.has_write = true;
        rec.write = {*in.dest, v};
        break;
      }
      case Opcode::Mov: {
        uint64_t v = operand_value(c, in.srcs[0], rec, true);
        c.st.regs[*in.dest] = v;
        rec.has_write = true;
        rec.write = {*in.dest, v};
        break;
      }
      case Opcode::Add:
      case Opcode::Sub:
      case Opcode::Mul:
      case Opcode::Div:
      case Opcode::Mod:
      case Opcode::Shl:
      case Opcode::And:
      case Opcode::Or:
      case Opcode::Xor:
      case Opcode::Cmp: {
        uint64_t a = operand_value(c, in.srcs[0], rec, true);
        uint64_t b = operand_value(c, in.srcs[1], rec, true);
        uint64_t v = 0;
        switch (in.op) {
          case Opcode::Add: v = a + b; break;
          case Opcode::Sub: v = a - b; break;
          case Opcode::Mul: v = a * b; break;
          case Opcode::Div:
          case Opcode::Mod:
            if (b == 0) {
              fault(FaultKind::DivideByZero, in.ip, 0);
              faulted = true;
              break;
            }
            v = in.op == Opcode::Div ? a / b : a % b;
            break;
          case Opcode::Shl: v = a << (b & 63); break;
          case Opcode::And: v = a & b; break;
          case Opcode::Or: v = a | b; break;
          case Opcode::Xor: v = a ^ b; break;
          case Opcode::Cmp: {
            int64_t sa = static_cast<int64_t>(a), sb = static_cast<int64_t>(b);
            v = sa < sb ? static_cast<uint64_t>(-1) : (sa > sb ? 1 : 0);
            break;
          }
          default: break;
        }
        if (faulted) break;
        c.st.regs[*in.dest] = v;
        rec.has_write = true;
        rec.write = {*in.dest, v};
        break;
      }
      case Opcode::Load: {
        uint64_t addr = addr_value(c, *in.addr, rec, true);
        if (!c.st.memory.is_mapped(addr, kAccessSize)) {
          fault(FaultKind::UnmappedLoad, in.ip, addr);
          faulted = true;
          break;
        }
        uint64_t v = c.st.memory.read_u64(addr);
        c.st.regs[*in.dest] = v;
        rec.has_mem_read = true;
        rec.mem_read = {addr, kAccessSize, v};
        rec.has_write = true;
        rec.write = {*in.dest, v};
        break;
      }
      case Opcode::Store: {
        uint64_t v = operand_value(c, in.srcs[0], rec, true);
        uint64_t addr = addr_value(c, *in.addr, rec, true);
        if (!c.st.memory.is_mapped(addr, kAccessSize)) {
          fault(FaultKind::UnmappedStore, in.ip, addr);
          faulted = true;
          break;
        }
        c.st.memory.write_u64(addr, v);
        rec.has_mem_write = true;
        rec.mem_write = {addr, kAccessSize, v};
        break;
      }
      case Opcode::Prefetch: {
        // Never faults, touches no architectural state; the computed
        // address is recorded for the analyses.
        uint64_t addr = addr_value(c, *in.addr, rec, true);
        rec.has_mem_read = true;
        rec.mem_read = {addr, kAccessSize, 0};
        break;
      }
      case Opcode::Br: {
        uint64_t v = operand_value(c, in.srcs[0], rec, true);
        int64_t sv = static_cast<int64_t>(v);
        bool taken = false;
        switch (in.cond) {
          case BranchCond::Eq: taken = sv == 0; break;
          case BranchCond::Ne: taken = sv != 0; break;
          case BranchCond::Lt: taken = sv < 0; break;
          case BranchCond::Le: taken = sv <= 0; break;
          case BranchCond::Gt: taken = sv > 0; break;
          case BranchCond::Ge: taken = sv >= 0; break;
        }
        rec.branch_taken = taken ? 1 : 0;
        if (taken) next = c.ip_index.at(in.target);
        break;
      }
      case Opcode::Jmp:
        rec.branch_taken = 1;
        next = c.ip_index.at(in.target);
        break;
      case Opcode::Call: {
        uint64_t retip = idx + 1 < prog.instructions.size()
                             ? prog.instructions[idx + 1].ip
                             : in.ip + 1;
        uint64_t sp = c.st.regs[kSpReg] - 8;
        if (!c.st.memory.is_mapped(sp, kAccessSize)) {
          fault(FaultKind::UnmappedStore, in.ip, sp);
          faulted = true;
          break;
        }
        c.st.memory.write_u64(sp, retip);
        c.st.regs[kSpReg] = sp;
        rec.has_write = true;
        rec.write = {kSpReg, sp};
        rec.has_mem_write = true;
        rec.mem_write = {sp, kAccessSize, retip};
        rec.branch_taken = 1;
        next = c.ip_index.at(in.target);
        break;
      }
      case Opcode::Ret: {
        uint64_t sp = c.st.regs[kSpReg];
        rec.add_read(kSpReg, sp);
        if (!c.st.memory.is_mapped(sp, kAccessSize)) {
          fault(FaultKind::UnmappedLoad, in.ip, sp);
          faulted = true;
          break;
        }
        uint64_t retip = c.st.memory.read_u64(sp);
        auto it = c.ip_index.find(retip);
        if (it == c.ip_index.end()) {
          fault(FaultKind::BadReturnTarget, in.ip, retip);
          faulted = true;
          break;
        }
        c.st.regs[kSpReg] = sp + 8;
        rec.has_mem_read = true;
        rec.mem_read = {sp, kAccessSize, retip};
        rec.has_write = true;
        rec.write = {kSpReg, sp + 8};
        rec.branch_taken = 1;
        next = it->second;
        break;
      }
      case Opcode::Halt:
        c.st.halted = true;
        break;
    }

    if (faulted) break;
    if (opts.collect_trace) c.trace.push_back(rec);
    ++seq;
    idx = next;
  }

  if (c.st.halted) ex.result.status = RunStatus::Halted;
  ex.state = std::move(c.st);
  ex.trace = std::move(c.trace);
  return ex;
}

}  // namespace dilforge
