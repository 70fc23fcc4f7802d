// Dynamic control-flow graph and natural-loop detection over a trace.
// Blocks are maximal straight-line ip runs split at observed branch
// sources and targets; edge counts are exact dynamic transition counts.
//
// Loop conventions: trip count = header executions per loop entry
// episode; back-edge traversals are therefore trip-1 for bottom-test
// loops. Paths are the observed acyclic header->back-edge block
// sequences, counted per dynamic iteration.
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dilforge/trace.hpp"

namespace dilforge {

struct BasicBlock {
  uint32_t id = 0;
  std::vector<uint64_t> ips;  // in execution order
};

struct CfgEdge {
  uint32_t src = 0;
  uint32_t dst = 0;
  uint64_t count = 0;
};

struct DynCFG {
  std::vector<BasicBlock> blocks;
  std::vector<CfgEdge> edges;
  uint32_t entry = 0;
  std::unordered_map<uint64_t, uint32_t> block_of_ip;

  const BasicBlock& block(uint32_t id) const { return blocks[id]; }
  std::vector<std::vector<uint32_t>> successors() const;
  std::vector<std::vector<uint32_t>> predecessors() const;
};

DynCFG build_dcfg(const Trace& trace);

struct LoopPath {
  std::vector<uint32_t> blocks;  // header ... back-edge source
  uint64_t count = 0;
};

struct Loop {
  uint32_t id = 0;
  uint32_t header = 0;
  std::unordered_set<uint32_t> body;  // includes header
  std::vector<CfgEdge> back_edges;
  std::vector<CfgEdge> exits;
  std::vector<LoopPath> paths;
  uint64_t entries = 0;      // loop entry episodes
  uint64_t iterations = 0;   // total header executions
  double trip_mean = 0.0;
  uint64_t trip_min = 0, trip_max = 0;
  int parent = -1;           // index of the innermost enclosing loop
  bool irreducible = false;  // retreating edge without dominance

  uint64_t header_ip(const DynCFG& cfg) const {
    return cfg.blocks[header].ips.front();
  }
  bool contains_ip(const DynCFG& cfg, uint64_t ip) const {
    auto it = cfg.block_of_ip.find(ip);
    return it != cfg.block_of_ip.end() && body.count(it->second) > 0;
  }
};

// Natural loops from back-edges (target dominates source), innermost
// first by body size. Retreating edges whose targets do not dominate are
// reported as irreducible marker loops with empty paths.
std::vector<Loop> find_loops(const DynCFG& cfg, const Trace& trace);

// Index into `loops` of the smallest loop whose body contains ip, or -1.
int innermost_loop_of(const std::vector<Loop>& loops, const DynCFG& cfg,
                      uint64_t ip);

// Per-record loop iteration ids for one loop: result[seq] == iteration
// ordinal (global across entry episodes) or kNoIter when outside.
struct LoopIterations {
  static constexpr uint32_t kNoIter = 0xffffffffu;
  std::vector<uint32_t> iter_of;         // per seq
  std::vector<uint32_t> path_of;         // per iteration -> path index or kNoIter
  std::vector<uint64_t> start_seq;       // per iteration -> first seq
};
LoopIterations loop_iterations(const Trace& trace, const DynCFG& cfg,
                               const Loop& loop);

}  // namespace dilforge
