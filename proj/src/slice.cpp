#include "dilforge/slice.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "dilforge/cycles.hpp"

namespace dilforge {

namespace {

// Register reads of the record that feed the target's address (for the
// target itself) or its whole computation (for slice members). For loads
// the address registers are exactly the recorded reads; for stores the
// first read is the stored value.
struct WalkItem {
  uint64_t seq;
  bool is_root;
};

}  // namespace

DependenceGraph backward_slice(const Trace& trace, const DependenceLinks& links,
                               const DynCFG& cfg, const Loop& loop,
                               const LoopIterations& iters, uint64_t target_ip) {
  DependenceGraph g;
  g.target_ip = target_ip;

  // Collect target instances inside the loop.
  std::vector<uint64_t> instances;
  std::unordered_set<uint32_t> instance_iters;
  for (const auto& r : trace)
    if (r.ip == target_ip &&
        iters.iter_of[r.seq] != LoopIterations::kNoIter) {
      instances.push_back(r.seq);
      instance_iters.insert(iters.iter_of[r.seq]);
    }
  if (instance_iters.size() < 2)
    throw std::invalid_argument(
        "slice target must execute in at least two loop iterations");

  auto in_loop = [&](uint64_t seq) {
    return iters.iter_of[seq] != LoopIterations::kNoIter;
  };
  auto ip_in_loop_body = [&](uint64_t ip) {
    auto it = cfg.block_of_ip.find(ip);
    return it != cfg.block_of_ip.end() && loop.body.count(it->second) > 0;
  };

  std::unordered_set<uint64_t> node_set;
  std::unordered_set<uint64_t> walked;  // dynamic instances expanded
  std::unordered_map<uint32_t, std::set<uint64_t>> per_iter_nodes;

  // Per-instance walk; memoization on dynamic instances keeps the total
  // work linear in the trace.
  std::vector<WalkItem> work;
  for (uint64_t s : instances) work.push_back({s, true});

  auto add_edge = [&](uint64_t prod_seq, uint64_t cons_seq, DepKind kind) {
    const TraceRecord& p = trace[prod_seq];
    const TraceRecord& c = trace[cons_seq];
    DepDir dir = iters.iter_of[prod_seq] == iters.iter_of[cons_seq]
                     ? DepDir::Intra
                     : DepDir::LoopCarried;
    g.edges.insert({p.ip, c.ip, kind, dir});
  };

  while (!work.empty()) {
    auto [seq, is_root] = work.back();
    work.pop_back();
    const TraceRecord& r = trace[seq];
    if (!is_root) {
      node_set.insert(r.ip);
      uint32_t it = iters.iter_of[seq];
      if (it != LoopIterations::kNoIter) per_iter_nodes[it].insert(r.ip);
      if (r.op == Opcode::Call || r.op == Opcode::Ret) g.call_crossing = true;
    }
    if (walked.count(seq) && !is_root) continue;
    if (!is_root) walked.insert(seq);
    g.instances_walked++;

    // Register dependences. For the target (root) only the address
    // registers matter, which for a load are exactly its reads.
    for (unsigned i = 0; i < r.n_reads; ++i) {
      uint64_t prod = links.reg_producer(seq, i);
      if (prod == DependenceLinks::kNone) {
        g.live_in_regs.insert(r.reads[i].reg);
        continue;
      }
      if (!in_loop(prod) || !ip_in_loop_body(trace[prod].ip)) {
        g.live_in_regs.insert(r.reads[i].reg);
        continue;
      }
      add_edge(prod, seq, DepKind::Register);
      work.push_back({prod, false});
    }
    // Memory dependences: followed for slice-member loads (their value
    // feeds the chain) but not for the target's own load.
    if (!is_root && r.op == Opcode::Load) {
      uint64_t prod = links.mem_producer(seq);
      if (prod != DependenceLinks::kNone && in_loop(prod) &&
          ip_in_loop_body(trace[prod].ip)) {
        add_edge(prod, seq, DepKind::Memory);
        work.push_back({prod, false});
      }
    }
  }

  g.nodes.assign(node_set.begin(), node_set.end());
  std::sort(g.nodes.begin(), g.nodes.end());

  // Per-path static projections for the control-independence decision.
  for (const auto& [iter, nodes] : per_iter_nodes) {
    uint32_t path = iter < iters.path_of.size() ? iters.path_of[iter]
                                                : LoopIterations::kNoIter;
    if (path == LoopIterations::kNoIter) continue;  // exiting iteration
    auto& dst = g.nodes_by_path[path];
    dst.insert(nodes.begin(), nodes.end());
  }
  return g;
}

void enumerate_slice_cycles(DependenceGraph& g,
                            const std::set<uint64_t>& irregular_ips,
                            size_t bound) {
  std::unordered_map<uint64_t, int> index;
  for (size_t i = 0; i < g.nodes.size(); ++i)
    index[g.nodes[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> adj(g.nodes.size());
  for (const auto& e : g.edges) {
    auto pi = index.find(e.producer_ip);
    auto ci = index.find(e.consumer_ip);
    if (pi == index.end() || ci == index.end()) continue;  // target edge
    adj[pi->second].push_back(ci->second);
  }
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  auto raw = simple_cycles(adj, bound);
  g.cycles.clear();
  g.cycle_has_irregular_memory.clear();
  for (const auto& c : raw) {
    std::vector<uint64_t> ips;
    bool irregular = false;
    for (int n : c) {
      ips.push_back(g.nodes[n]);
      if (irregular_ips.count(g.nodes[n])) irregular = true;
    }
    g.cycles.push_back(std::move(ips));
    g.cycle_has_irregular_memory.push_back(irregular);
  }
}

uint64_t replay_slice_address(const Trace& trace, const DependenceLinks& links,
                              const DependenceGraph& g, const Program& prog,
                              const LoopIterations& iters, uint64_t target_seq,
                              uint64_t exclude_ip) {
  uint32_t iter = iters.iter_of[target_seq];
  if (iter == LoopIterations::kNoIter)
    throw std::invalid_argument("target instance outside the loop");
  uint64_t start = iters.start_seq[iter];

  std::unordered_map<uint64_t, const Instruction*> static_of;
  for (const auto& in : prog.instructions) static_of[in.ip] = &in;

  // Values produced by replayed slice instances this iteration.
  std::unordered_map<uint8_t, uint64_t> regs;
  std::unordered_map<uint8_t, bool> defined;

  // A read is a live-in (seeded from the record) only when its trace
  // producer is not an in-slice instance of this same iteration; reads
  // produced in-slice must flow through the replay, so an excluded node
  // leaves garbage behind instead of being silently patched.
  auto read_value = [&](const TraceRecord& r, uint64_t seq,
                        uint8_t reg) -> uint64_t {
    int slot = -1;
    for (unsigned i = 0; i < r.n_reads; ++i)
      if (r.reads[i].reg == reg) {
        slot = static_cast<int>(i);
        break;
      }
    if (slot < 0) return defined.count(reg) && defined[reg] ? regs[reg] : 0;
    uint64_t prod = links.reg_producer(seq, slot);
    bool in_slice_iter = prod != DependenceLinks::kNone &&
                         iters.iter_of[prod] == iter &&
                         g.has_node(trace[prod].ip);
    if (in_slice_iter)
      return defined.count(reg) && defined[reg] ? regs[reg] : 0;
    return r.reads[slot].value;  // live-in seed
  };

  auto eval = [&](const TraceRecord& r, uint64_t seq,
                  const Instruction& in) -> uint64_t {
    auto opval = [&](const Operand& o) {
      return o.is_imm ? o.imm : read_value(r, seq, o.reg);
    };
    uint64_t a = in.srcs.empty() ? 0 : opval(in.srcs[0]);
    uint64_t b = in.srcs.size() > 1 ? opval(in.srcs[1]) : 0;
    switch (in.op) {
      case Opcode::Li: return in.srcs[0].imm;
      case Opcode::Mov: return a;
      case Opcode::Add: return a + b;
      case Opcode::Sub: return a - b;
      case Opcode::Mul: return a * b;
      case Opcode::Div: return b ? a / b : 0;
      case Opcode::Mod: return b ? a % b : 0;
      case Opcode::Shl: return a << (b & 63);
      case Opcode::And: return a & b;
      case Opcode::Or: return a | b;
      case Opcode::Xor: return a ^ b;
      case Opcode::Cmp: {
        int64_t sa = static_cast<int64_t>(a), sb = static_cast<int64_t>(b);
        return sa < sb ? static_cast<uint64_t>(-1) : (sa > sb ? 1 : 0);
      }
      default: return 0;
    }
  };

  for (uint64_t s = start; s < target_seq; ++s) {
    if (iters.iter_of[s] != iter) continue;
    const TraceRecord& r = trace[s];
    if (!g.has_node(r.ip) || r.ip == exclude_ip) continue;
    const Instruction* in = static_of.count(r.ip) ? static_of[r.ip] : nullptr;
    if (!in || !in->dest) continue;
    uint64_t v;
    if (in->op == Opcode::Load) {
      // A slice load contributes its recorded value, but only if its
      // replayed address agrees with the record; otherwise a broken
      // address chain would be papered over.
      uint64_t addr = read_value(r, s, in->addr->base) +
                      static_cast<uint64_t>(in->addr->disp);
      if (in->addr->index)
        addr += read_value(r, s, *in->addr->index) * in->addr->scale;
      v = addr == r.mem_read.addr ? r.mem_read.value : 0;
    } else {
      v = eval(r, s, *in);
    }
    regs[*in->dest] = v;
    defined[*in->dest] = true;
  }

  // Recompute the target's address from the replay state.
  const TraceRecord& t = trace[target_seq];
  const Instruction* tin = static_of.at(t.ip);
  uint64_t addr = read_value(t, target_seq, tin->addr->base) +
                  static_cast<uint64_t>(tin->addr->disp);
  if (tin->addr->index)
    addr += read_value(t, target_seq, *tin->addr->index) * tin->addr->scale;
  return addr;
}

}  // namespace dilforge
