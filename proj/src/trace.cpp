#include "dilforge/trace.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace dilforge {

namespace {

constexpr const char* kHeader = "#dilforge-trace v1";

void append_hex(std::string& s, uint64_t v) {
  char buf[20];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
  s += "0x";
  s.append(buf, p);
}

void append_dec(std::string& s, uint64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, p);
}

void append_record(std::string& line, const TraceRecord& r) {
  append_dec(line, r.seq);
  line += '\t';
  append_hex(line, r.ip);
  line += '\t';
  line += opcode_name(r.op);
  if (r.op == Opcode::Br) {
    line += '.';
    line += cond_name(r.cond);
  }
  line += '\t';
  if (r.n_reads == 0) {
    line += '-';
  } else {
    for (unsigned i = 0; i < r.n_reads; ++i) {
      if (i) line += ',';
      line += 'r';
      append_dec(line, r.reads[i].reg);
      line += '=';
      append_hex(line, r.reads[i].value);
    }
  }
  line += '\t';
  if (!r.has_write) {
    line += '-';
  } else {
    line += 'r';
    append_dec(line, r.write.reg);
    line += '=';
    append_hex(line, r.write.value);
  }
  line += '\t';
  auto mem = [&](bool has, const MemEffect& m) {
    if (!has) {
      line += '-';
      return;
    }
    append_hex(line, m.addr);
    line += ':';
    append_dec(line, m.size);
    line += ':';
    append_hex(line, m.value);
  };
  mem(r.has_mem_read, r.mem_read);
  line += '\t';
  mem(r.has_mem_write, r.mem_write);
  line += '\t';
  if (r.branch_taken < 0)
    line += '-';
  else
    line += r.branch_taken ? '1' : '0';
  line += '\n';
}

struct Cursor {
  const char* p;
  const char* end;
  size_t line_no;

  [[noreturn]] void fail(const std::string& what) const {
    throw TraceParseError(line_no, what);
  }
  bool at_field_end() const { return p == end || *p == '\t'; }
  void expect_tab() {
    if (p == end || *p != '\t') fail("expected tab separator");
    ++p;
  }
  uint64_t parse_u64(int base) {
    uint64_t v = 0;
    if (base == 16) {
      if (end - p < 2 || p[0] != '0' || p[1] != 'x') fail("expected 0x prefix");
      p += 2;
    }
    auto [np, ec] = std::from_chars(p, end, v, base);
    if (ec != std::errc() || np == p) fail("malformed number");
    p = np;
    return v;
  }
};

Opcode parse_opcode(Cursor& c, BranchCond& cond) {
  const char* start = c.p;
  while (c.p != c.end && *c.p != '\t') ++c.p;
  std::string_view tok(start, c.p - start);
  if (tok.substr(0, 3) == "br.") {
    std::string_view cn = tok.substr(3);
    for (int i = 0; i < 6; ++i)
      if (cn == cond_name(static_cast<BranchCond>(i))) {
        cond = static_cast<BranchCond>(i);
        return Opcode::Br;
      }
    c.fail("unknown branch condition '" + std::string(cn) + "'");
  }
  for (int i = 0; i <= static_cast<int>(Opcode::Halt); ++i) {
    auto op = static_cast<Opcode>(i);
    if (op != Opcode::Br && tok == opcode_name(op)) return op;
  }
  c.fail("unknown opcode '" + std::string(tok) + "'");
}

}  // namespace

TraceParseError::TraceParseError(size_t line_, const std::string& what)
    : std::runtime_error("trace line " + std::to_string(line_) + ": " + what),
      line(line_) {}

void write_trace(std::ostream& out, const Trace& t) {
  out << kHeader << '\n';
  std::string line;
  line.reserve(160);
  for (const auto& r : t) {
    line.clear();
    append_record(line, r);
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
}

void write_trace_file(const std::string& path, const Trace& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_trace(f, t);
}

Trace read_trace(std::istream& in) {
  Trace t;
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) throw TraceParseError(1, "missing header");
  ++line_no;
  if (line != kHeader) throw TraceParseError(1, "bad header '" + line + "'");
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Cursor c{line.data(), line.data() + line.size(), line_no};
    TraceRecord r;
    r.seq = c.parse_u64(10);
    c.expect_tab();
    r.ip = c.parse_u64(16);
    c.expect_tab();
    r.op = parse_opcode(c, r.cond);
    c.expect_tab();
    if (*c.p == '-' && (c.p + 1 == c.end || c.p[1] == '\t')) {
      ++c.p;
    } else {
      while (true) {
        if (c.p == c.end || *c.p != 'r') c.fail("expected register effect");
        ++c.p;
        if (r.n_reads >= 3) c.fail("too many register reads");
        uint64_t reg = c.parse_u64(10);
        if (c.p == c.end || *c.p != '=') c.fail("expected '='");
        ++c.p;
        uint64_t val = c.parse_u64(16);
        r.add_read(static_cast<uint8_t>(reg), val);
        if (c.at_field_end()) break;
        if (*c.p != ',') c.fail("expected ','");
        ++c.p;
      }
    }
    c.expect_tab();
    if (*c.p == '-' && (c.p + 1 == c.end || c.p[1] == '\t')) {
      ++c.p;
    } else {
      if (c.p == c.end || *c.p != 'r') c.fail("expected register effect");
      ++c.p;
      uint64_t reg = c.parse_u64(10);
      if (c.p == c.end || *c.p != '=') c.fail("expected '='");
      ++c.p;
      uint64_t val = c.parse_u64(16);
      r.has_write = true;
      r.write = {static_cast<uint8_t>(reg), val};
    }
    c.expect_tab();
    auto parse_mem = [&](bool& has, MemEffect& m) {
      if (*c.p == '-' && (c.p + 1 == c.end || c.p[1] == '\t')) {
        ++c.p;
        return;
      }
      m.addr = c.parse_u64(16);
      if (c.p == c.end || *c.p != ':') c.fail("expected ':'");
      ++c.p;
      m.size = static_cast<uint8_t>(c.parse_u64(10));
      if (c.p == c.end || *c.p != ':') c.fail("expected ':'");
      ++c.p;
      m.value = c.parse_u64(16);
      has = true;
    };
    parse_mem(r.has_mem_read, r.mem_read);
    c.expect_tab();
    parse_mem(r.has_mem_write, r.mem_write);
    c.expect_tab();
    if (*c.p == '-')
      r.branch_taken = -1;
    else if (*c.p == '0')
      r.branch_taken = 0;
    else if (*c.p == '1')
      r.branch_taken = 1;
    else
      c.fail("bad branch-taken field");
    ++c.p;
    if (c.p != c.end) c.fail("trailing characters");
    t.push_back(r);
  }
  return t;
}

Trace read_trace_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_trace(f);
}

uint64_t trace_digest(const Trace& t) {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](const void* data, size_t n) {
    const uint8_t* p = static_cast<const uint8_t*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ull;
    }
  };
  std::string line;
  for (const auto& r : t) {
    line.clear();
    append_record(line, r);
    mix(line.data(), line.size());
  }
  return h;
}

std::string digest_hex(uint64_t d) {
  char buf[20];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
  return buf;
}

DependenceLinks::DependenceLinks(const Trace& t) {
  reg_prod_.assign(t.size() * 3, kNone);
  mem_prod_.assign(t.size(), kNone);
  std::array<uint64_t, kNumRegs> last_reg;
  last_reg.fill(kNone);
  std::unordered_map<uint64_t, uint64_t> last_mem;  // byte addr -> seq
  last_mem.reserve(1 << 16);
  for (const auto& r : t) {
    for (unsigned i = 0; i < r.n_reads; ++i)
      reg_prod_[r.seq * 3 + i] = last_reg[r.reads[i].reg];
    if (r.has_mem_read && r.op != Opcode::Prefetch) {
      uint64_t prod = kNone;
      for (unsigned b = 0; b < r.mem_read.size; ++b) {
        auto it = last_mem.find(r.mem_read.addr + b);
        if (it != last_mem.end() &&
            (prod == kNone || it->second > prod))
          prod = it->second;
      }
      mem_prod_[r.seq] = prod;
    }
    if (r.has_write) last_reg[r.write.reg] = r.seq;
    if (r.has_mem_write)
      for (unsigned b = 0; b < r.mem_write.size; ++b)
        last_mem[r.mem_write.addr + b] = r.seq;
  }
}

}  // namespace dilforge
