#include "dilforge/asm_text.hpp"

#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dilforge {

namespace fs = std::filesystem;

AsmParseError::AsmParseError(size_t line_, const std::string& what)
    : std::runtime_error("asm line " + std::to_string(line_) + ": " + what),
      line(line_) {}

namespace {

constexpr const char* kHeader = "#dilforge-asm v1";

std::string hex(uint64_t v) {
  char buf[20];
  snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string reg_name(uint8_t r) {
  if (r == kSpReg) return "sp";
  return "r" + std::to_string(r);
}

std::string operand_str(const Operand& o) {
  if (o.is_imm) return "#" + hex(o.imm);
  return reg_name(o.reg);
}

std::string addr_str(const AddrExpr& a) {
  std::string s = "[" + reg_name(a.base);
  if (a.index)
    s += " + " + reg_name(*a.index) + "*" + std::to_string(a.scale);
  if (a.disp > 0)
    s += " + " + hex(static_cast<uint64_t>(a.disp));
  else if (a.disp < 0)
    s += " - " + hex(static_cast<uint64_t>(-a.disp));
  s += "]";
  return s;
}

struct Tokenizer {
  std::string_view s;
  size_t pos = 0;
  size_t line_no;

  [[noreturn]] void fail(const std::string& what) const {
    throw AsmParseError(line_no, what);
  }
  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool consume(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }
  std::string_view word() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && (isalnum((unsigned char)s[pos]) || s[pos] == '.' ||
                              s[pos] == '_' || s[pos] == '-'))
      ++pos;
    if (pos == start) fail("expected a token");
    return s.substr(start, pos - start);
  }
  uint64_t number() {
    skip_ws();
    bool neg = false;
    if (pos < s.size() && s[pos] == '-') {
      neg = true;
      ++pos;
    }
    int base = 10;
    if (pos + 1 < s.size() && s[pos] == '0' && s[pos + 1] == 'x') {
      base = 16;
      pos += 2;
    }
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v, base);
    if (ec != std::errc() || p == s.data() + pos) fail("malformed number");
    pos = p - s.data();
    return neg ? ~v + 1 : v;
  }
  uint8_t reg() {
    skip_ws();
    if (pos + 1 < s.size() && s[pos] == 's' && s[pos + 1] == 'p') {
      pos += 2;
      return kSpReg;
    }
    if (pos >= s.size() || s[pos] != 'r') fail("expected register");
    ++pos;
    uint64_t n = number();
    if (n >= kNumRegs) fail("register id out of range");
    return static_cast<uint8_t>(n);
  }
  Operand operand() {
    skip_ws();
    if (pos < s.size() && s[pos] == '#') {
      ++pos;
      return Operand::i(number());
    }
    return Operand::r(reg());
  }
  AddrExpr addr() {
    expect('[');
    AddrExpr a;
    a.base = reg();
    while (true) {
      skip_ws();
      if (consume(']')) break;
      bool minus = false;
      if (consume('-'))
        minus = true;
      else
        expect('+');
      skip_ws();
      if (!minus && pos < s.size() && (s[pos] == 'r' || s[pos] == 's')) {
        a.index = reg();
        a.scale = 1;
        if (consume('*')) a.scale = static_cast<uint8_t>(number());
      } else {
        uint64_t d = number();
        a.disp = minus ? -static_cast<int64_t>(d) : static_cast<int64_t>(d);
      }
    }
    return a;
  }
};

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string format_instruction(const Instruction& in) {
  std::string s = hex(in.ip) + ": ";
  switch (in.op) {
    case Opcode::Li:
      s += "li " + reg_name(*in.dest) + ", " + operand_str(in.srcs[0]);
      break;
    case Opcode::Mov:
      s += "mov " + reg_name(*in.dest) + ", " + operand_str(in.srcs[0]);
      break;
    case Opcode::Load:
      s += "load " + reg_name(*in.dest) + ", " + addr_str(*in.addr);
      break;
    case Opcode::Store:
      s += "store " + operand_str(in.srcs[0]) + ", " + addr_str(*in.addr);
      break;
    case Opcode::Prefetch:
      s += "prefetch " + addr_str(*in.addr);
      break;
    case Opcode::Br:
      s += std::string("br.") + cond_name(in.cond) + " " +
           operand_str(in.srcs[0]) + ", " + hex(in.target);
      break;
    case Opcode::Jmp:
      s += "jmp " + hex(in.target);
      break;
    case Opcode::Call:
      s += "call " + hex(in.target);
      break;
    case Opcode::Ret:
      s += "ret";
      break;
    case Opcode::Halt:
      s += "halt";
      break;
    default:
      s += std::string(opcode_name(in.op)) + " " + reg_name(*in.dest) + ", " +
           operand_str(in.srcs[0]) + ", " + operand_str(in.srcs[1]);
      break;
  }
  return s;
}

void write_program(std::ostream& out, const Program& prog) {
  out << kHeader << '\n';
  out << ".entry " << hex(prog.entry) << '\n';
  out << ".stack " << hex(prog.stack_base) << " " << hex(prog.stack_size)
      << '\n';
  for (const auto& d : prog.data) {
    if (!d.file.empty()) {
      out << ".datafile " << d.name << " " << hex(d.base) << " " << d.file
          << '\n';
      continue;
    }
    out << ".data " << d.name << " " << hex(d.base) << " ";
    static const char* digits = "0123456789abcdef";
    std::string h;
    h.reserve(d.bytes.size() * 2);
    for (uint8_t b : d.bytes) {
      h += digits[b >> 4];
      h += digits[b & 0xf];
    }
    out << h << '\n';
  }
  for (const auto& in : prog.instructions) out << format_instruction(in) << '\n';
}

void write_program_file(const std::string& path, const Program& prog,
                        size_t inline_threshold) {
  Program copy = prog;
  fs::path p(path);
  for (auto& d : copy.data) {
    if (!d.file.empty()) continue;  // caller manages the sidecar
    if (d.bytes.size() <= inline_threshold) continue;
    std::string sidecar = p.stem().string() + "." + d.name + ".bin";
    std::ofstream f(p.parent_path() / sidecar, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write data sidecar: " + sidecar);
    f.write(reinterpret_cast<const char*>(d.bytes.data()),
            static_cast<std::streamsize>(d.bytes.size()));
    d.file = sidecar;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_program(f, copy);
}

Program read_program(std::istream& in, const std::string& dir) {
  Program prog;
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line) || line != kHeader)
    throw AsmParseError(1, "missing or bad header");
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto c = line.find(';'); c != std::string::npos) line.resize(c);
    Tokenizer t{line, 0, line_no};
    if (t.done()) continue;

    if (t.peek() == '.') {
      std::string_view dir_word = t.word();
      if (dir_word == ".entry") {
        prog.entry = t.number();
      } else if (dir_word == ".stack") {
        prog.stack_base = t.number();
        prog.stack_size = t.number();
      } else if (dir_word == ".data") {
        DataSegment d;
        d.name = std::string(t.word());
        d.base = t.number();
        t.skip_ws();
        std::string_view h = t.s.substr(t.pos);
        if (h.size() % 2) t.fail("odd hex digit count");
        d.bytes.reserve(h.size() / 2);
        for (size_t i = 0; i < h.size(); i += 2) {
          int hi = hex_nibble(h[i]), lo = hex_nibble(h[i + 1]);
          if (hi < 0 || lo < 0) t.fail("bad hex byte");
          d.bytes.push_back(static_cast<uint8_t>(hi << 4 | lo));
        }
        t.pos = t.s.size();
        prog.data.push_back(std::move(d));
      } else if (dir_word == ".datafile") {
        DataSegment d;
        d.name = std::string(t.word());
        d.base = t.number();
        t.skip_ws();
        d.file = std::string(t.s.substr(t.pos));
        t.pos = t.s.size();
        while (!d.file.empty() && (d.file.back() == ' ' || d.file.back() == '\t'))
          d.file.pop_back();
        std::ifstream f(fs::path(dir) / d.file, std::ios::binary);
        if (!f) t.fail("cannot open data file: " + d.file);
        d.bytes.assign(std::istreambuf_iterator<char>(f),
                       std::istreambuf_iterator<char>());
        prog.data.push_back(std::move(d));
      } else {
        t.fail("unknown directive '" + std::string(dir_word) + "'");
      }
      continue;
    }

    Instruction ins;
    ins.ip = t.number();
    t.expect(':');
    std::string_view mn = t.word();
    auto two_or_three = [&](Opcode op) {
      ins.op = op;
      ins.dest = t.reg();
      t.expect(',');
      Operand a = t.operand();
      if (t.consume(',')) {
        ins.srcs = {a, t.operand()};
      } else {
        // two-operand shorthand: dest doubles as the first source
        ins.srcs = {Operand::r(*ins.dest), a};
      }
    };
    if (mn == "li") {
      ins.op = Opcode::Li;
      ins.dest = t.reg();
      t.expect(',');
      Operand o = t.operand();
      if (!o.is_imm) t.fail("li requires an immediate");
      ins.srcs = {o};
    } else if (mn == "mov") {
      ins.op = Opcode::Mov;
      ins.dest = t.reg();
      t.expect(',');
      ins.srcs = {t.operand()};
    } else if (mn == "load") {
      ins.op = Opcode::Load;
      ins.dest = t.reg();
      t.expect(',');
      ins.addr = t.addr();
    } else if (mn == "store") {
      ins.op = Opcode::Store;
      ins.srcs = {t.operand()};
      t.expect(',');
      ins.addr = t.addr();
    } else if (mn == "prefetch") {
      ins.op = Opcode::Prefetch;
      ins.addr = t.addr();
    } else if (mn == "jmp" || mn == "call") {
      ins.op = mn == "jmp" ? Opcode::Jmp : Opcode::Call;
      ins.target = t.number();
    } else if (mn == "ret") {
      ins.op = Opcode::Ret;
    } else if (mn == "halt") {
      ins.op = Opcode::Halt;
    } else if (mn.substr(0, 3) == "br.") {
      ins.op = Opcode::Br;
      std::string_view cn = mn.substr(3);
      bool found = false;
      for (int i = 0; i < 6; ++i)
        if (cn == cond_name(static_cast<BranchCond>(i))) {
          ins.cond = static_cast<BranchCond>(i);
          found = true;
        }
      if (!found) t.fail("unknown branch condition");
      ins.srcs = {Operand::r(t.reg())};
      t.expect(',');
      ins.target = t.number();
    } else if (mn == "add") {
      two_or_three(Opcode::Add);
    } else if (mn == "sub") {
      two_or_three(Opcode::Sub);
    } else if (mn == "mul") {
      two_or_three(Opcode::Mul);
    } else if (mn == "div") {
      two_or_three(Opcode::Div);
    } else if (mn == "mod") {
      two_or_three(Opcode::Mod);
    } else if (mn == "shl") {
      two_or_three(Opcode::Shl);
    } else if (mn == "and") {
      two_or_three(Opcode::And);
    } else if (mn == "or") {
      two_or_three(Opcode::Or);
    } else if (mn == "xor") {
      two_or_three(Opcode::Xor);
    } else if (mn == "cmp") {
      two_or_three(Opcode::Cmp);
    } else {
      t.fail("unknown mnemonic '" + std::string(mn) + "'");
    }
    if (!t.done()) t.fail("trailing characters");
    prog.instructions.push_back(std::move(ins));
  }
  return prog;
}

Program read_program_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_program(f, fs::path(path).parent_path().string());
}

}  // namespace dilforge
