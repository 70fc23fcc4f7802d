#include "dilforge/screen.hpp"

#include <algorithm>
#include <unordered_map>

namespace dilforge {

namespace {

// Registers written by any static instruction inside the loop body
// (address bases outside this set are loop-invariant).
std::set<uint8_t> regs_written_in_loop(const Program& prog, const DynCFG& cfg,
                                       const Loop& loop) {
  std::set<uint8_t> written;
  for (const auto& in : prog.instructions) {
    auto it = cfg.block_of_ip.find(in.ip);
    if (it == cfg.block_of_ip.end() || !loop.body.count(it->second)) continue;
    if (in.dest) written.insert(*in.dest);
    if (in.op == Opcode::Call || in.op == Opcode::Ret) written.insert(kSpReg);
  }
  return written;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) {
    for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  }
  int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

ScreenResult screen_dils(const Trace& trace, const DependenceLinks& links,
                         const Program& prog, const DynCFG& cfg,
                         const std::vector<Loop>& loops,
                         const DelinquencyReport& report,
                         const ProfileResult& profile,
                         const CacheConfig& cache_cfg) {
  ScreenResult res;
  std::set<uint64_t> irregular_ips;
  for (const auto& [ip, s] : profile.loads)
    if (s.cls == LoadClass::Irregular) irregular_ips.insert(ip);

  std::unordered_map<uint64_t, const Instruction*> static_of;
  for (const auto& in : prog.instructions) static_of[in.ip] = &in;

  std::unordered_map<int, LoopIterations> iters_cache;
  auto iters_for = [&](int li) -> const LoopIterations& {
    auto it = iters_cache.find(li);
    if (it == iters_cache.end())
      it = iters_cache.emplace(li, loop_iterations(trace, cfg, loops[li])).first;
    return it->second;
  };

  for (uint64_t ip : report.dil_candidates) {
    DilVerdict v;
    v.ip = ip;
    const LoadStats& st = profile.loads.at(ip);
    v.cls = st.cls;
    v.dram_bound = st.dram_bound;
    v.offset_group = {ip};

    int li = innermost_loop_of(loops, cfg, ip);
    v.loop_index = li;
    if (li < 0) {
      v.reason = RejectReason::ColdLoop;
      res.verdicts.push_back(v);
      continue;
    }
    const Loop& loop = loops[li];
    const LoopIterations& iters = iters_for(li);
    v.paths_observed = loop.paths.size();

    DependenceGraph g;
    try {
      g = backward_slice(trace, links, cfg, loop, iters, ip);
    } catch (const std::invalid_argument&) {
      v.reason = RejectReason::ColdLoop;
      res.verdicts.push_back(v);
      continue;
    }
    enumerate_slice_cycles(g, irregular_ips);
    v.call_crossing = g.call_crossing;

    v.runnable = true;
    for (bool flag : g.cycle_has_irregular_memory)
      if (flag) v.runnable = false;

    // Control independence over observed paths: the static projection
    // must exist and be identical on every looping path.
    v.control_independent = true;
    if (g.nodes_by_path.empty()) {
      v.control_independent = false;
    } else {
      const auto& ref = g.nodes_by_path.begin()->second;
      for (uint32_t p = 0; p < loop.paths.size(); ++p) {
        auto it = g.nodes_by_path.find(p);
        if (it == g.nodes_by_path.end() || it->second != ref) {
          v.control_independent = false;
          break;
        }
      }
    }

    // Static-store screen: stores in the slice must have statically
    // inferable addresses (loop-invariant or sp-relative base, constant
    // displacement, no index).
    bool stores_ok = true;
    auto written = regs_written_in_loop(prog, cfg, loop);
    for (uint64_t nip : g.nodes) {
      const Instruction* in = static_of.count(nip) ? static_of[nip] : nullptr;
      if (!in || in->op != Opcode::Store) continue;
      bool base_ok = in->addr->base == kSpReg || !written.count(in->addr->base);
      if (!base_ok || in->addr->index) stores_ok = false;
    }

    if (!v.runnable)
      v.reason = RejectReason::ChasingCycle;
    else if (!v.control_independent)
      v.reason = RejectReason::ControlDependent;
    else if (!stores_ok)
      v.reason = RejectReason::StoreAliasUnresolved;
    v.prefetchable = v.runnable && v.control_independent && stores_ok;
    res.graphs.emplace(ip, std::move(g));
    res.verdicts.push_back(v);
  }

  // Offset grouping among prefetchable DILs sharing a loop.
  std::vector<size_t> pf;
  for (size_t i = 0; i < res.verdicts.size(); ++i)
    if (res.verdicts[i].prefetchable) pf.push_back(i);

  // Per-iteration address of the first instance per iteration.
  auto iter_addrs = [&](const DilVerdict& v) {
    std::unordered_map<uint32_t, uint64_t> m;
    const LoopIterations& iters = iters_for(v.loop_index);
    for (const auto& r : trace) {
      if (r.ip != v.ip) continue;
      uint32_t it = iters.iter_of[r.seq];
      if (it != LoopIterations::kNoIter) m.emplace(it, r.mem_read.addr);
    }
    return m;
  };
  std::unordered_map<uint64_t, std::unordered_map<uint32_t, uint64_t>> addrs;
  for (size_t i : pf) addrs[res.verdicts[i].ip] = iter_addrs(res.verdicts[i]);

  UnionFind uf(pf.size());
  const int64_t line = static_cast<int64_t>(cache_cfg.l1.line);
  for (size_t a = 0; a < pf.size(); ++a) {
    for (size_t b = a + 1; b < pf.size(); ++b) {
      DilVerdict& va = res.verdicts[pf[a]];
      DilVerdict& vb = res.verdicts[pf[b]];
      if (va.loop_index != vb.loop_index) continue;
      const auto& ma = addrs[va.ip];
      const auto& mb = addrs[vb.ip];
      std::map<int64_t, uint64_t> deltas;
      uint64_t common = 0;
      for (const auto& [it, addr] : ma) {
        auto f = mb.find(it);
        if (f == mb.end()) continue;
        ++common;
        deltas[static_cast<int64_t>(addr) - static_cast<int64_t>(f->second)]++;
      }
      if (common == 0) continue;
      auto mode = std::max_element(
          deltas.begin(), deltas.end(),
          [](const auto& x, const auto& y) { return x.second < y.second; });
      if (std::abs(mode->first) <= line &&
          static_cast<double>(mode->second) >= 0.99 * common)
        uf.unite(static_cast<int>(a), static_cast<int>(b));
    }
  }

  std::unordered_map<int, std::vector<size_t>> groups;
  for (size_t a = 0; a < pf.size(); ++a)
    groups[uf.find(static_cast<int>(a))].push_back(pf[a]);
  for (auto& [root, members] : groups) {
    std::vector<uint64_t> ips;
    for (size_t m : members) ips.push_back(res.verdicts[m].ip);
    std::sort(ips.begin(), ips.end());
    size_t crit = members[0];
    for (size_t m : members) {
      double lm = profile.loads.at(res.verdicts[m].ip).avg_latency();
      double lc = profile.loads.at(res.verdicts[crit].ip).avg_latency();
      if (lm > lc || (lm == lc && res.verdicts[m].ip < res.verdicts[crit].ip))
        crit = m;
    }
    for (size_t m : members) {
      res.verdicts[m].offset_group = ips;
      res.verdicts[m].critical = m == crit;
      if (m != crit) {
        res.verdicts[m].prefetchable = false;
        res.verdicts[m].reason = RejectReason::OffsetDuplicate;
      }
    }
  }
  return res;
}

}  // namespace dilforge
