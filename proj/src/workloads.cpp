#include "dilforge/workloads.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace dilforge {

namespace {

// Common memory map. Segments are spaced far apart; the validator checks
// non-overlap anyway.
constexpr uint64_t kStackBase = 0x20000;
constexpr uint64_t kStackSize = 0x10000;
constexpr uint64_t kOutBase = 0x40000;
constexpr uint64_t kInputBase = 0x100000;
constexpr uint64_t kTableBase = 0x1000000;
constexpr uint64_t kNodesBase = 0x4000000;

std::vector<uint8_t> u64_bytes(const std::vector<uint64_t>& v) {
  std::vector<uint8_t> out(v.size() * 8);
  std::memcpy(out.data(), v.data(), out.size());
  return out;
}

void put_u64(std::vector<uint8_t>& v, size_t off, uint64_t x) {
  std::memcpy(v.data() + off, &x, 8);
}

// Branch-free integer busywork between the interesting loads: mixes `src`
// into `acc` through `tmp`. Keeps hot-loop sizes in the range where a few
// loop iterations fill the instruction window, like the binaries these
// kernels stand in for. Represented as data so the output oracles can
// replay the same arithmetic host-side.
struct PadOp {
  uint8_t kind;
  uint64_t imm;
};

std::vector<PadOp> make_pad_ops(int n, Xorshift64Star& rng) {
  std::vector<PadOp> ops;
  ops.reserve(n);
  for (int i = 0; i < n; ++i) {
    uint8_t kind = static_cast<uint8_t>(rng.below(5));
    uint64_t imm = 0;
    switch (kind) {
      case 0: imm = rng.next() | 1; break;
      case 2: imm = rng.below(1 << 20); break;
      case 3: imm = 1 + rng.below(31); break;
      case 4: imm = rng.next(); break;
    }
    ops.push_back({kind, imm});
  }
  return ops;
}

void emit_pad(ProgramBuilder& b, const std::vector<PadOp>& ops, uint8_t tmp,
              uint8_t acc, uint8_t src) {
  for (const auto& op : ops) {
    switch (op.kind) {
      case 0: b.mul(tmp, src, Operand::i(op.imm)); break;
      case 1: b.xor_(acc, acc, Operand::r(tmp)); break;
      case 2: b.add(acc, acc, Operand::i(op.imm)); break;
      case 3: b.shl(tmp, acc, Operand::i(op.imm)); break;
      case 4: b.and_(tmp, tmp, Operand::i(op.imm)); break;
    }
  }
}

void apply_pad(const std::vector<PadOp>& ops, uint64_t& tmp, uint64_t& acc,
               uint64_t src) {
  for (const auto& op : ops) {
    switch (op.kind) {
      case 0: tmp = src * op.imm; break;
      case 1: acc ^= tmp; break;
      case 2: acc += op.imm; break;
      case 3: tmp = acc << (op.imm & 63); break;
      case 4: tmp &= op.imm; break;
    }
  }
}

Workload make_hash_histogram(uint64_t size, uint64_t unique, uint64_t seed) {
  constexpr uint64_t kTableEntries = 262139;  // prime, table ~2 MiB
  constexpr uint64_t kNodeSize = 128;         // count at +0, key at +64
  if (unique > kTableEntries)
    throw std::invalid_argument("unique-keys exceeds hash table size");

  Xorshift64Star rng(seed * 0x9e3779b97f4a7c15ull + 1);

  // Distinct residues mod table size, one bucket node per unique key; a
  // probe always hits the first (only) node of its bucket.
  std::vector<uint32_t> residues(kTableEntries);
  std::iota(residues.begin(), residues.end(), 0);
  for (uint64_t i = 0; i < unique; ++i) {
    uint64_t j = i + rng.below(kTableEntries - i);
    std::swap(residues[i], residues[j]);
  }
  std::vector<uint64_t> keys(unique);
  for (uint64_t j = 0; j < unique; ++j)
    keys[j] = residues[j] + kTableEntries * rng.below(1 << 20);

  std::vector<uint64_t> heads(kTableEntries, 0);
  std::vector<uint8_t> nodes(unique * kNodeSize, 0);
  for (uint64_t j = 0; j < unique; ++j) {
    heads[residues[j]] = kNodesBase + j * kNodeSize;
    put_u64(nodes, j * kNodeSize + 64, keys[j]);
  }

  Xorshift64Star pad_rng(seed ^ 0xabcd1234u);
  auto pad_ops = make_pad_ops(38, pad_rng);

  std::vector<uint64_t> input(size);
  std::vector<uint64_t> counts(unique, 0);
  uint64_t chk = 0;
  for (uint64_t i = 0; i < size; ++i) {
    uint64_t j = rng.below(unique);
    input[i] = keys[j];
    counts[j]++;
    chk ^= keys[j];
    uint64_t tmp = kTableBase + residues[j] * 8ull;  // bucket address
    apply_pad(pad_ops, tmp, chk, keys[j]);
  }

  // Oracle: final node bytes and the checksum slot.
  std::vector<uint8_t> nodes_expect = nodes;
  for (uint64_t j = 0; j < unique; ++j)
    put_u64(nodes_expect, j * kNodeSize + 0, counts[j]);
  std::vector<uint8_t> out_expect(8);
  put_u64(out_expect, 0, chk);

  // Register map: r0 input cursor, r1 input end, r2 heads base, r3 key,
  // r4 hash/companion/flag (staged reuse), r5 bucket addr + pad temp,
  // r6 node ptr, r7 count, r8 checksum. r9..r14 stay untouched for the
  // prefetcher transformation.
  ProgramBuilder b;
  b.li(0, kInputBase);
  b.li(1, kInputBase + size * 8);
  b.li(2, kTableBase);
  b.li(8, 0);
  auto top = b.here();
  uint64_t ip_feeder = b.load(3, {.base = 0});
  b.mod(4, 3, Operand::i(kTableEntries));
  b.shl(5, 4, Operand::i(3));
  b.add(5, 5, Operand::r(2));
  uint64_t ip_head = b.load(6, {.base = 5});
  uint64_t ip_count = b.load(7, {.base = 6});
  b.add(7, 7, Operand::i(1));
  b.store(7, {.base = 6});
  uint64_t ip_key = b.load(4, {.base = 6, .disp = 64});
  b.xor_(8, 8, Operand::r(4));
  emit_pad(b, pad_ops, 5, 8, 3);
  b.add(0, 0, Operand::i(8));
  b.cmp(4, Operand::r(0), Operand::r(1));
  b.br(BranchCond::Lt, 4, top);
  b.li(5, kOutBase);
  b.store(8, {.base = 5});
  b.halt();
  b.set_stack(kStackBase, kStackSize);
  b.data_segment("input", kInputBase, u64_bytes(input));
  b.data_segment("heads", kTableBase, u64_bytes(heads));
  b.data_segment("nodes", kNodesBase, nodes);
  b.data_segment("out", kOutBase, std::vector<uint8_t>(8, 0));

  Workload w;
  w.program = b.build();
  w.hot_loop_header = ip_feeder;
  w.outputs.push_back({"nodes", kNodesBase, std::move(nodes_expect)});
  w.outputs.push_back({"out", kOutBase, std::move(out_expect)});
  w.labels = {
      {"feeder", ip_feeder, LoadClass::Striding, false, false, false, false,
       RejectReason::None},
      {"head", ip_head, LoadClass::Irregular, true, true, true, true,
       RejectReason::None},
      {"count", ip_count, LoadClass::Irregular, true, true, true, true,
       RejectReason::None},
      {"key", ip_key, LoadClass::Irregular, true, true, true, false,
       RejectReason::OffsetDuplicate},
  };
  w.expected_instructions = size * 60 + 16;
  return w;
}

Workload make_pointer_chase(uint64_t steps, uint64_t seed) {
  constexpr uint64_t kNodes = 1 << 18;  // 4 MiB of 16-byte nodes
  constexpr uint64_t kNodeSize = 16;
  Xorshift64Star rng(seed * 0x2545f4914f6cdd1dull + 7);

  // One full permutation cycle (Sattolo) so a walk never revisits a node
  // before exhausting all of them.
  std::vector<uint64_t> perm(kNodes);
  std::iota(perm.begin(), perm.end(), 0);
  for (uint64_t i = kNodes - 1; i > 0; --i) {
    uint64_t j = rng.below(i);
    std::swap(perm[i], perm[j]);
  }
  std::vector<uint8_t> nodes(kNodes * kNodeSize, 0);
  for (uint64_t i = 0; i < kNodes; ++i)
    put_u64(nodes, perm[i] * kNodeSize, kNodesBase + perm[(i + 1) % kNodes] * kNodeSize);

  Xorshift64Star pad_rng(seed ^ 0x77777777u);
  auto pad_ops = make_pad_ops(6, pad_rng);

  uint64_t p = kNodesBase + perm[0] * kNodeSize;
  uint64_t chk = 0, tmp = 0;
  for (uint64_t s = 0; s < steps; ++s) {
    uint64_t next;
    std::memcpy(&next, nodes.data() + (p - kNodesBase), 8);
    p = next;
    chk += p;
    apply_pad(pad_ops, tmp, chk, p);
  }
  std::vector<uint8_t> out_expect(16);
  put_u64(out_expect, 0, chk);
  put_u64(out_expect, 8, p);

  // r0 chase pointer, r1 step counter, r2 step limit, r3 checksum, r4 flag
  // + pad temp r5.
  ProgramBuilder b;
  b.li(0, kNodesBase + perm[0] * kNodeSize);
  b.li(1, 0);
  b.li(2, steps);
  b.li(3, 0);
  auto top = b.here();
  uint64_t ip_chase = b.load(0, {.base = 0});
  b.add(3, 3, Operand::r(0));
  emit_pad(b, pad_ops, 5, 3, 0);
  b.add(1, 1, Operand::i(1));
  b.cmp(4, Operand::r(1), Operand::r(2));
  b.br(BranchCond::Lt, 4, top);
  b.li(5, kOutBase);
  b.store(3, {.base = 5});
  b.store(0, {.base = 5, .disp = 8});
  b.halt();
  b.set_stack(kStackBase, kStackSize);
  b.data_segment("nodes", kNodesBase, std::move(nodes));
  b.data_segment("out", kOutBase, std::vector<uint8_t>(16, 0));

  Workload w;
  w.program = b.build();
  w.hot_loop_header = ip_chase;
  w.outputs.push_back({"out", kOutBase, std::move(out_expect)});
  w.labels = {
      {"chase", ip_chase, LoadClass::Irregular, true, false, true, false,
       RejectReason::ChasingCycle},
  };
  w.expected_instructions = steps * 14 + 16;
  return w;
}

Workload indirect_common(uint64_t size, uint64_t seed, int n_dils, bool nonlinear) {
  constexpr uint64_t kElems = 1 << 18;  // each target array 2 MiB
  Xorshift64Star rng(seed * 0x100000001b3ull + 3);

  std::vector<uint64_t> feed(size);
  for (auto& x : feed)
    x = nonlinear ? rng.next() : rng.below(kElems) * 8;  // pre-scaled offsets

  auto f = [&](uint64_t x) -> uint64_t {
    if (!nonlinear) return x;  // already a byte offset
    uint64_t t = x * 2654435761ull;
    t ^= x;
    t <<= 3;
    return t & ((kElems - 1) << 3);
  };

  std::vector<std::vector<uint64_t>> targets(n_dils);
  for (int d = 0; d < n_dils; ++d) {
    targets[d].resize(kElems);
    for (auto& v : targets[d]) v = rng.next();
  }

  Xorshift64Star pad_rng(seed ^ 0x5150f00du);
  auto pad_ops = make_pad_ops(nonlinear ? 18 : 22, pad_rng);
  const uint64_t base0 = kTableBase;
  const uint64_t base1 = kTableBase + ((1ull << 18) * 8 + (1 << 20));

  uint64_t chk = 0;
  std::vector<uint64_t> c(size, 0);
  for (uint64_t i = 0; i < size; ++i) {
    uint64_t last_addr = 0;
    for (int d = 0; d < n_dils; ++d) {
      uint64_t v = targets[d][f(feed[i]) / 8];
      chk ^= v;
      if (d == 0) c[i] = v;
      last_addr = (d == 0 ? base0 : base1) + f(feed[i]);
    }
    apply_pad(pad_ops, last_addr, chk, feed[i]);
  }
  std::vector<uint8_t> out_expect(8);
  put_u64(out_expect, 0, chk);

  // r0 cursor, r1 end, r2/r8 target bases, r3 feed value, r4 target addr,
  // r5 loaded value, r6 checksum, r7 flag.
  const uint64_t c_delta = kNodesBase - kInputBase;  // c[] parallel to feed
  ProgramBuilder b;
  b.li(0, kInputBase);
  b.li(1, kInputBase + size * 8);
  b.li(2, base0);
  if (n_dils > 1) b.li(8, base1);
  b.li(6, 0);
  auto top = b.here();
  uint64_t ip_feeder = b.load(3, {.base = 0});
  std::vector<uint64_t> leaf_ips;
  for (int d = 0; d < n_dils; ++d) {
    uint8_t base_reg = d == 0 ? 2 : 8;
    if (nonlinear) {
      b.mul(4, 3, Operand::i(2654435761ull));
      b.xor_(4, 4, Operand::r(3));
      b.shl(4, 4, Operand::i(3));
      b.and_(4, 4, Operand::i((kElems - 1) << 3));
      b.add(4, 4, Operand::r(base_reg));
    } else {
      b.add(4, 3, Operand::r(base_reg));
    }
    leaf_ips.push_back(b.load(5, {.base = 4}));
    b.xor_(6, 6, Operand::r(5));
    if (d == 0) b.store(5, {.base = 0, .disp = static_cast<int64_t>(c_delta)});
  }
  emit_pad(b, pad_ops, 4, 6, 3);
  b.add(0, 0, Operand::i(8));
  b.cmp(7, Operand::r(0), Operand::r(1));
  b.br(BranchCond::Lt, 7, top);
  b.li(4, kOutBase);
  b.store(6, {.base = 4});
  b.halt();
  b.set_stack(kStackBase, kStackSize);
  b.data_segment("feed", kInputBase, u64_bytes(feed));
  b.data_segment("c", kInputBase + c_delta, std::vector<uint8_t>(size * 8, 0));
  b.data_segment("a0", base0, u64_bytes(targets[0]));
  if (n_dils > 1) b.data_segment("a1", base1, u64_bytes(targets[1]));
  b.data_segment("out", kOutBase, std::vector<uint8_t>(8, 0));

  Workload w;
  w.program = b.build();
  w.hot_loop_header = ip_feeder;
  w.outputs.push_back({"out", kOutBase, std::move(out_expect)});
  w.outputs.push_back({"c", kInputBase + c_delta, u64_bytes(c)});
  w.labels.push_back({"feeder", ip_feeder, LoadClass::Striding, false, false,
                      false, false, RejectReason::None});
  for (int d = 0; d < n_dils; ++d)
    w.labels.push_back({"leaf" + std::to_string(d), leaf_ips[d],
                        LoadClass::Irregular, true, true, true, true,
                        RejectReason::None});
  w.expected_instructions = size * (nonlinear ? 40 : 40) + 16;
  return w;
}

Workload make_tree_search(uint64_t queries, uint64_t seed) {
  constexpr int kDepth = 17;
  constexpr uint64_t kNodes = (1ull << kDepth) - 1;  // 2 MiB of 16-byte nodes
  constexpr uint64_t kNodeSize = 16;
  Xorshift64Star rng(seed * 0x9e3779b97f4a7c15ull + 11);

  // Heap-ordered balanced BST: key strictly increasing in in-order rank.
  std::vector<uint64_t> node_key(kNodes);
  {
    uint64_t rank = 0;
    // iterative in-order over heap indices
    std::vector<uint64_t> stack;
    uint64_t cur = 0;
    constexpr uint64_t kNil = ~0ull;
    uint64_t node = 0;
    (void)cur;
    while (node != kNil || !stack.empty()) {
      while (node != kNil) {
        stack.push_back(node);
        uint64_t l = 2 * node + 1;
        node = l < kNodes ? l : kNil;
      }
      node = stack.back();
      stack.pop_back();
      node_key[node] = rank * 97 + rng.below(61);
      ++rank;
      uint64_t r = 2 * node + 2;
      node = r < kNodes ? r : kNil;
    }
  }
  std::vector<uint8_t> tree(kNodes * kNodeSize, 0);
  for (uint64_t i = 0; i < kNodes; ++i) put_u64(tree, i * kNodeSize, node_key[i]);

  std::vector<uint64_t> q(queries);
  for (auto& k : q) k = rng.below(kNodes * 97);

  // Host descent: fixed depth, offset arithmetic mirrors the program.
  std::vector<uint64_t> final_off(queries);
  for (uint64_t i = 0; i < queries; ++i) {
    uint64_t off = 0;
    for (int l = 0; l < kDepth; ++l) {
      uint64_t key;
      std::memcpy(&key, tree.data() + off, 8);
      bool left = static_cast<int64_t>(q[i]) < static_cast<int64_t>(key);
      off = 2 * off + (left ? 16 : 32);
    }
    final_off[i] = off;
  }

  // r0 query cursor, r1 query end, r2 tree base, r3 query key, r4 node
  // offset, r5 node key, r6 level, r7 depth, r8 flag.
  const uint64_t out_delta = kNodesBase - kInputBase;
  ProgramBuilder b;
  b.li(0, kInputBase);
  b.li(1, kInputBase + queries * 8);
  b.li(2, kTableBase);
  b.li(7, kDepth);
  auto outer = b.here();
  uint64_t ip_query = b.load(3, {.base = 0});
  b.li(4, 0);
  b.li(6, 0);
  auto inner = b.new_label();
  auto go_left = b.new_label();
  auto cont = b.new_label();
  b.bind(inner);
  uint64_t ip_node = b.load(5, {.base = 2, .index = 4, .scale = 1});
  b.cmp(8, Operand::r(3), Operand::r(5));
  b.br(BranchCond::Lt, 8, go_left);
  uint64_t ip_shr = b.shl(4, 4, Operand::i(1));
  b.add(4, 4, Operand::i(32));
  b.jmp(cont);
  b.bind(go_left);
  uint64_t ip_shl = b.shl(4, 4, Operand::i(1));
  b.add(4, 4, Operand::i(16));
  b.bind(cont);
  b.add(6, 6, Operand::i(1));
  b.cmp(8, Operand::r(6), Operand::r(7));
  b.br(BranchCond::Lt, 8, inner);
  b.store(4, {.base = 0, .disp = static_cast<int64_t>(out_delta)});
  b.add(0, 0, Operand::i(8));
  b.cmp(8, Operand::r(0), Operand::r(1));
  b.br(BranchCond::Lt, 8, outer);
  b.halt();
  (void)ip_shr;
  (void)ip_shl;
  b.set_stack(kStackBase, kStackSize);
  b.data_segment("queries", kInputBase, u64_bytes(q));
  b.data_segment("found", kInputBase + out_delta,
                 std::vector<uint8_t>(queries * 8, 0));
  b.data_segment("tree", kTableBase, std::move(tree));

  Workload w;
  w.program = b.build();
  w.hot_loop_header = ip_query;
  w.inner_loop_header = ip_node;
  w.outputs.push_back({"found", kInputBase + out_delta, u64_bytes(final_off)});
  w.labels = {
      {"query", ip_query, LoadClass::Striding, false, false, false, false,
       RejectReason::None},
      {"node", ip_node, LoadClass::Irregular, true, true, false, false,
       RejectReason::ControlDependent},
  };
  w.expected_instructions = queries * (kDepth * 9 + 10) + 8;
  return w;
}

Workload make_dense_stride(uint64_t size, uint64_t seed) {
  Xorshift64Star rng(seed * 0x100000001b3ull + 17);
  std::vector<uint64_t> a(size), bb(size);
  for (auto& x : a) x = rng.next();
  for (auto& x : bb) x = rng.next();
  std::vector<uint64_t> c(size);
  for (uint64_t i = 0; i < size; ++i) c[i] = a[i] * 3 + bb[i];

  const uint64_t b_delta = size * 8 + (1 << 16);
  const uint64_t c_delta = 2 * b_delta;
  ProgramBuilder b;
  b.li(0, kInputBase);
  b.li(1, kInputBase + size * 8);
  auto top = b.here();
  uint64_t ip_a = b.load(3, {.base = 0});
  uint64_t ip_b = b.load(4, {.base = 0, .disp = static_cast<int64_t>(b_delta)});
  b.mul(3, 3, Operand::i(3));
  b.add(3, 3, Operand::r(4));
  b.store(3, {.base = 0, .disp = static_cast<int64_t>(c_delta)});
  b.add(0, 0, Operand::i(8));
  b.cmp(5, Operand::r(0), Operand::r(1));
  b.br(BranchCond::Lt, 5, top);
  b.halt();
  b.set_stack(kStackBase, kStackSize);
  b.data_segment("a", kInputBase, u64_bytes(a));
  b.data_segment("b", kInputBase + b_delta, u64_bytes(bb));
  b.data_segment("c", kInputBase + c_delta, std::vector<uint8_t>(size * 8, 0));

  Workload w;
  w.program = b.build();
  w.hot_loop_header = ip_a;
  w.outputs.push_back({"c", kInputBase + c_delta, u64_bytes(c)});
  w.labels = {
      {"a", ip_a, LoadClass::Striding, false, false, false, false,
       RejectReason::None},
      {"b", ip_b, LoadClass::Striding, false, false, false, false,
       RejectReason::None},
  };
  w.expected_instructions = size * 9 + 8;
  return w;
}

Workload make_csr_gather(uint64_t rows, uint64_t seed) {
  constexpr uint64_t kRankElems = 400000;  // ~3 MiB
  Xorshift64Star rng(seed * 0x2545f4914f6cdd1dull + 23);

  // Mean degree ~6 with a sparse heavy-ish tail; inner loops are entered
  // once per row so the lookahead bounds check is exercised per entry.
  std::vector<uint64_t> degree(rows);
  for (uint64_t i = 0; i < rows; ++i)
    degree[i] = (i % 64 == 0) ? 20 + rng.below(80) : 1 + rng.below(10);

  std::vector<uint64_t> rowptr(rows + 1, 0);
  for (uint64_t i = 0; i < rows; ++i) rowptr[i + 1] = rowptr[i] + degree[i];
  uint64_t nnz = rowptr[rows];
  std::vector<uint64_t> col(nnz);
  for (auto& x : col) x = rng.below(kRankElems) * 8;  // pre-scaled
  std::vector<uint64_t> rank(kRankElems);
  for (auto& x : rank) x = rng.next();

  std::vector<uint64_t> rowptr_bytes(rows + 1);
  for (uint64_t i = 0; i <= rows; ++i) rowptr_bytes[i] = rowptr[i] * 8;

  Xorshift64Star pad_rng(seed ^ 0xc5f00aaebbu);
  auto pad_ops = make_pad_ops(18, pad_rng);

  std::vector<uint64_t> out(rows, 0);
  for (uint64_t i = 0; i < rows; ++i) {
    uint64_t sum = 0;
    for (uint64_t t = rowptr[i]; t < rowptr[i + 1]; ++t) {
      uint64_t elem_addr = kNodesBase + col[t];
      uint64_t value = rank[col[t] / 8];
      sum += value;
      apply_pad(pad_ops, value, sum, elem_addr);
    }
    out[i] = sum;
  }

  // r0 row cursor (byte offset), r1 row cursor end, r2 rowptr base,
  // r3 col base, r4 rank base, r5 col addr, r6 col addr end, r7 row sum,
  // r8 col value / rank addr, r9 rank value + pad temp, r10 flag,
  // r11 inner step (register-held stride: the lookahead advance for this
  // loop is emitted as unrolled step copies rather than one closed-form
  // add).
  const uint64_t col_base = kTableBase;
  const uint64_t rank_base = kNodesBase;
  const uint64_t out_delta = (1 << 20);  // out[] parallel to rowptr
  ProgramBuilder b;
  b.li(0, 0);
  b.li(1, rows * 8);
  b.li(2, kInputBase);
  b.li(3, col_base);
  b.li(4, rank_base);
  b.li(11, 8);
  auto outer = b.here();
  uint64_t ip_lo = b.load(5, {.base = 2, .index = 0, .scale = 1});
  uint64_t ip_hi = b.load(6, {.base = 2, .index = 0, .scale = 1, .disp = 8});
  b.add(5, 5, Operand::r(3));
  b.add(6, 6, Operand::r(3));
  b.li(7, 0);
  auto inner = b.here();
  uint64_t ip_col = b.load(8, {.base = 5});
  b.add(8, 8, Operand::r(4));
  uint64_t ip_rank = b.load(9, {.base = 8});
  b.add(7, 7, Operand::r(9));
  emit_pad(b, 18, 9, 7, 8, pad_rng);
  b.add(5, 5, Operand::r(11));
  b.cmp(10, Operand::r(5), Operand::r(6));
  b.br(BranchCond::Lt, 10, inner);
  b.store(7, {.base = 2, .index = 0, .scale = 1,
              .disp = static_cast<int64_t>(out_delta)});
  b.add(0, 0, Operand::i(8));
  b.cmp(10, Operand::r(0), Operand::r(1));
  b.br(BranchCond::Lt, 10, outer);
  b.halt();
  b.set_stack(kStackBase, kStackSize);
  b.data_segment("rowptr", kInputBase, u64_bytes(rowptr_bytes));
  b.data_segment("out", kInputBase + out_delta,
                 std::vector<uint8_t>(rows * 8, 0));
  b.data_segment("col", col_base, u64_bytes(col));
  b.data_segment("rank", rank_base, u64_bytes(rank));

  Workload w;
  w.program = b.build();
  w.hot_loop_header = ip_lo;
  w.inner_loop_header = ip_col;
  w.outputs.push_back({"out", kInputBase + out_delta, u64_bytes(out)});
  w.labels = {
      {"rowlo", ip_lo, LoadClass::Striding, false, false, false, false,
       RejectReason::None},
      {"rowhi", ip_hi, LoadClass::Striding, false, false, false, false,
       RejectReason::None},
      {"col", ip_col, LoadClass::Striding, false, false, false, false,
       RejectReason::None},
      {"rank", ip_rank, LoadClass::Irregular, true, true, true, true,
       RejectReason::None},
  };
  w.expected_instructions = nnz * 26 + rows * 10 + 16;
  return w;
}

}  // namespace

const char* workload_kind_name(WorkloadKind k) {
  switch (k) {
    case WorkloadKind::HashHistogram: return "hash-histogram";
    case WorkloadKind::PointerChase: return "pointer-chase";
    case WorkloadKind::IndirectSimple: return "indirect-simple";
    case WorkloadKind::IndirectNonlinear: return "indirect-nonlinear";
    case WorkloadKind::TreeSearch: return "tree-search";
    case WorkloadKind::DenseStride: return "dense-stride";
    case WorkloadKind::CsrGather: return "csr-gather";
  }
  return "?";
}

std::optional<WorkloadKind> workload_kind_from_name(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(WorkloadKind::CsrGather); ++i)
    if (s == workload_kind_name(static_cast<WorkloadKind>(i)))
      return static_cast<WorkloadKind>(i);
  return std::nullopt;
}

const PlantedLoad* Workload::label(const std::string& name) const {
  for (const auto& l : labels)
    if (l.name == name) return &l;
  return nullptr;
}

Workload generate_indirect_simple(uint64_t size, uint64_t seed, int n_dils) {
  if (size < 1) throw std::invalid_argument("size must be >= 1");
  Workload w = indirect_common(size, seed, n_dils, false);
  w.spec = {WorkloadKind::IndirectSimple, size, 0, seed};
  return w;
}

Workload generate(const WorkloadSpec& spec) {
  WorkloadSpec s = spec;
  // Per-kind defaults sized so the hot working set exceeds the default
  // 1 MiB LLC while full traces stay around a million records.
  if (s.size == 0) {
    switch (s.kind) {
      case WorkloadKind::HashHistogram: s.size = 16000; break;
      case WorkloadKind::PointerChase: s.size = 25000; break;
      case WorkloadKind::IndirectSimple: s.size = 22000; break;
      case WorkloadKind::IndirectNonlinear: s.size = 20000; break;
      case WorkloadKind::TreeSearch: s.size = 3000; break;
      case WorkloadKind::DenseStride: s.size = 40000; break;
      case WorkloadKind::CsrGather: s.size = 6000; break;
    }
  }
  if (s.kind == WorkloadKind::HashHistogram && s.unique_keys == 0)
    s.unique_keys = std::min<uint64_t>(12288, s.size);
  if (s.size < 1) throw std::invalid_argument("size must be >= 1");
  if (s.kind == WorkloadKind::HashHistogram && s.unique_keys > s.size)
    throw std::invalid_argument("unique-keys must be <= size");

  Workload w;
  switch (s.kind) {
    case WorkloadKind::HashHistogram:
      w = make_hash_histogram(s.size, s.unique_keys, s.seed);
      break;
    case WorkloadKind::PointerChase:
      w = make_pointer_chase(s.size, s.seed);
      break;
    case WorkloadKind::IndirectSimple:
      w = indirect_common(s.size, s.seed, 1, false);
      break;
    case WorkloadKind::IndirectNonlinear:
      w = indirect_common(s.size, s.seed, 1, true);
      break;
    case WorkloadKind::TreeSearch:
      w = make_tree_search(s.size, s.seed);
      break;
    case WorkloadKind::DenseStride:
      w = make_dense_stride(s.size, s.seed);
      break;
    case WorkloadKind::CsrGather:
      w = make_csr_gather(s.size, s.seed);
      break;
  }
  w.spec = s;
  return w;
}

}  // namespace dilforge
