#include "dilforge/dcfg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace dilforge {

namespace {

bool ends_block(Opcode op) {
  return op == Opcode::Br || op == Opcode::Jmp || op == Opcode::Call ||
         op == Opcode::Ret || op == Opcode::Halt;
}

}  // namespace

std::vector<std::vector<uint32_t>> DynCFG::successors() const {
  std::vector<std::vector<uint32_t>> succ(blocks.size());
  for (const auto& e : edges) succ[e.src].push_back(e.dst);
  return succ;
}

std::vector<std::vector<uint32_t>> DynCFG::predecessors() const {
  std::vector<std::vector<uint32_t>> pred(blocks.size());
  for (const auto& e : edges) pred[e.dst].push_back(e.src);
  return pred;
}

DynCFG build_dcfg(const Trace& trace) {
  if (trace.empty()) throw std::invalid_argument("empty trace");

  std::unordered_map<uint64_t, Opcode> op_of;
  std::unordered_map<uint64_t, uint64_t> next_ip;  // fall-through successor
  std::unordered_set<uint64_t> leaders;
  leaders.insert(trace[0].ip);
  for (size_t i = 0; i + 1 < trace.size(); ++i) {
    op_of.emplace(trace[i].ip, trace[i].op);
    if (ends_block(trace[i].op))
      leaders.insert(trace[i + 1].ip);
    else
      next_ip.emplace(trace[i].ip, trace[i + 1].ip);
  }
  op_of.emplace(trace.back().ip, trace.back().op);

  DynCFG cfg;
  for (const auto& r : trace) {
    if (!leaders.count(r.ip) || cfg.block_of_ip.count(r.ip)) continue;
    BasicBlock b;
    b.id = static_cast<uint32_t>(cfg.blocks.size());
    uint64_t cur = r.ip;
    while (true) {
      b.ips.push_back(cur);
      cfg.block_of_ip.emplace(cur, b.id);
      if (ends_block(op_of.at(cur))) break;
      auto it = next_ip.find(cur);
      if (it == next_ip.end() || leaders.count(it->second)) break;
      cur = it->second;
    }
    cfg.blocks.push_back(std::move(b));
  }
  cfg.entry = cfg.block_of_ip.at(trace[0].ip);

  std::map<std::pair<uint32_t, uint32_t>, uint64_t> edge_count;
  for (size_t i = 0; i + 1 < trace.size(); ++i) {
    uint32_t b1 = cfg.block_of_ip.at(trace[i].ip);
    uint32_t b2 = cfg.block_of_ip.at(trace[i + 1].ip);
    if (trace[i].ip == cfg.blocks[b1].ips.back() &&
        trace[i + 1].ip == cfg.blocks[b2].ips.front())
      edge_count[{b1, b2}]++;
  }
  for (const auto& [key, n] : edge_count)
    cfg.edges.push_back({key.first, key.second, n});
  return cfg;
}

namespace {

// Iterative dominator sets over the observed graph (graphs are small).
std::vector<std::vector<bool>> dominators(const DynCFG& cfg) {
  size_t n = cfg.blocks.size();
  auto pred = cfg.predecessors();
  std::vector<std::vector<bool>> dom(n, std::vector<bool>(n, true));
  dom[cfg.entry].assign(n, false);
  dom[cfg.entry][cfg.entry] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t b = 0; b < n; ++b) {
      if (b == cfg.entry) continue;
      std::vector<bool> nd(n, true);
      if (pred[b].empty()) nd.assign(n, false);
      for (uint32_t p : pred[b])
        for (size_t i = 0; i < n; ++i) nd[i] = nd[i] && dom[p][i];
      nd[b] = true;
      if (nd != dom[b]) {
        dom[b] = std::move(nd);
        changed = true;
      }
    }
  }
  return dom;
}

}  // namespace

std::vector<Loop> find_loops(const DynCFG& cfg, const Trace& trace) {
  auto dom = dominators(cfg);
  auto pred = cfg.predecessors();

  // Retreating edges from a deterministic DFS (sorted successor order):
  // natural back edges when the target dominates the source, irreducible
  // region markers otherwise.
  std::set<std::pair<uint32_t, uint32_t>> retreating;
  {
    auto succ = cfg.successors();
    for (auto& s : succ) std::sort(s.begin(), s.end());
    enum Color : uint8_t { White, Grey, Black };
    std::vector<uint8_t> color(cfg.blocks.size(), White);
    struct Frame { uint32_t node; size_t next; };
    std::vector<Frame> stack{{cfg.entry, 0}};
    color[cfg.entry] = Grey;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < succ[f.node].size()) {
        uint32_t s = succ[f.node][f.next++];
        if (color[s] == White) {
          color[s] = Grey;
          stack.push_back({s, 0});
        } else if (color[s] == Grey) {
          retreating.insert({f.node, s});
        }
      } else {
        color[f.node] = Black;
        stack.pop_back();
      }
    }
  }

  std::map<uint32_t, Loop> by_header;
  std::vector<Loop> irreducibles;
  for (const auto& e : cfg.edges) {
    if (!dom[e.src][e.dst]) {
      if (retreating.count({e.src, e.dst})) {
        Loop l;
        l.header = e.dst;
        l.body = {e.dst, e.src};
        l.back_edges.push_back(e);
        l.irreducible = true;
        irreducibles.push_back(std::move(l));
      }
      continue;
    }
    Loop& l = by_header[e.dst];
    l.header = e.dst;
    l.back_edges.push_back(e);
    l.body.insert(e.dst);
    // Backward closure from the back-edge source.
    std::vector<uint32_t> work{e.src};
    l.body.insert(e.src);
    while (!work.empty()) {
      uint32_t b = work.back();
      work.pop_back();
      if (b == e.dst) continue;
      for (uint32_t p : pred[b])
        if (l.body.insert(p).second) work.push_back(p);
    }
  }

  std::vector<Loop> loops;
  for (auto& [h, l] : by_header) loops.push_back(std::move(l));
  std::sort(loops.begin(), loops.end(), [](const Loop& a, const Loop& b) {
    if (a.body.size() != b.body.size()) return a.body.size() < b.body.size();
    return a.header < b.header;
  });
  for (auto& l : irreducibles) loops.push_back(std::move(l));
  for (size_t i = 0; i < loops.size(); ++i)
    loops[i].id = static_cast<uint32_t>(i);

  // Nesting: the smallest strictly-containing loop.
  for (size_t i = 0; i < loops.size(); ++i) {
    for (size_t j = 0; j < loops.size(); ++j) {
      if (i == j || loops[j].body.size() <= loops[i].body.size()) continue;
      bool contains = true;
      for (uint32_t b : loops[i].body)
        if (!loops[j].body.count(b)) {
          contains = false;
          break;
        }
      if (contains) {
        loops[i].parent = static_cast<int>(j);
        break;
      }
    }
  }

  // Exits.
  for (auto& l : loops)
    for (const auto& e : cfg.edges)
      if (l.body.count(e.src) && !l.body.count(e.dst)) l.exits.push_back(e);

  // Dynamic statistics and observed iteration paths, one block-level walk
  // per loop. A path records each block at its first occurrence within
  // the iteration, which keeps paths acyclic when the body nests loops.
  for (auto& l : loops) {
    if (l.irreducible) continue;
    uint64_t header_ip = cfg.blocks[l.header].ips.front();
    bool inside = false;
    uint64_t header_count = 0;
    std::vector<uint64_t> trips;
    std::map<std::vector<uint32_t>, uint64_t> path_count;
    std::vector<uint32_t> cur_path;
    std::unordered_set<uint32_t> seen_blocks;
    bool have_iter = false;

    auto flush_iteration = [&](bool looped_back) {
      if (have_iter && looped_back) path_count[cur_path]++;
      cur_path.clear();
      seen_blocks.clear();
      have_iter = false;
    };
    auto leave = [&]() {
      flush_iteration(false);
      if (inside) trips.push_back(header_count);
      inside = false;
      header_count = 0;
    };

    for (const auto& r : trace) {
      uint32_t b = cfg.block_of_ip.at(r.ip);
      if (r.ip != cfg.blocks[b].ips.front()) continue;  // block starts only
      if (l.body.count(b)) {
        if (!inside) {
          inside = true;
          header_count = 0;
        }
        if (r.ip == header_ip) {
          flush_iteration(true);
          header_count++;
          have_iter = true;
        }
        if (have_iter && seen_blocks.insert(b).second) cur_path.push_back(b);
      } else if (inside) {
        leave();
      }
    }
    leave();

    l.entries = trips.size();
    l.iterations = 0;
    l.trip_min = UINT64_MAX;
    for (uint64_t t : trips) {
      l.iterations += t;
      l.trip_min = std::min(l.trip_min, t);
      l.trip_max = std::max(l.trip_max, t);
    }
    if (trips.empty()) l.trip_min = 0;
    l.trip_mean = trips.empty() ? 0.0
                                : static_cast<double>(l.iterations) /
                                      static_cast<double>(trips.size());
    for (const auto& [blocks, n] : path_count) l.paths.push_back({blocks, n});
  }
  return loops;
}

int innermost_loop_of(const std::vector<Loop>& loops, const DynCFG& cfg,
                      uint64_t ip) {
  auto it = cfg.block_of_ip.find(ip);
  if (it == cfg.block_of_ip.end()) return -1;
  int best = -1;
  size_t best_size = SIZE_MAX;
  for (size_t i = 0; i < loops.size(); ++i) {
    if (loops[i].irreducible) continue;
    if (loops[i].body.count(it->second) && loops[i].body.size() < best_size) {
      best = static_cast<int>(i);
      best_size = loops[i].body.size();
    }
  }
  return best;
}

LoopIterations loop_iterations(const Trace& trace, const DynCFG& cfg,
                               const Loop& loop) {
  LoopIterations out;
  out.iter_of.assign(trace.size(), LoopIterations::kNoIter);

  // Path identity lookup.
  std::map<std::vector<uint32_t>, uint32_t> path_index;
  for (uint32_t i = 0; i < loop.paths.size(); ++i)
    path_index[loop.paths[i].blocks] = i;

  uint64_t header_ip = cfg.blocks[loop.header].ips.front();
  int32_t cur_iter = -1;
  std::vector<uint32_t> cur_path;
  std::unordered_set<uint32_t> seen_blocks;

  auto close_iter = [&](bool looped) {
    if (cur_iter < 0) return;
    auto it = looped ? path_index.find(cur_path) : path_index.end();
    out.path_of.push_back(it == path_index.end() ? LoopIterations::kNoIter
                                                 : it->second);
    cur_path.clear();
    seen_blocks.clear();
  };

  for (const auto& r : trace) {
    uint32_t b = cfg.block_of_ip.at(r.ip);
    if (loop.body.count(b)) {
      if (r.ip == header_ip) {
        close_iter(true);
        cur_iter = static_cast<int32_t>(out.start_seq.size());
        out.start_seq.push_back(r.seq);
      }
      if (cur_iter >= 0) {
        out.iter_of[r.seq] = static_cast<uint32_t>(cur_iter);
        if (r.ip == cfg.blocks[b].ips.front() && seen_blocks.insert(b).second)
          cur_path.push_back(b);
      }
    } else if (cur_iter >= 0) {
      close_iter(false);
      cur_iter = -1;
    }
  }
  close_iter(false);
  return out;
}

}  // namespace dilforge
