// Dynamic backward slicing: the transitive closure of a DIL's address
// computation over exact trace dependences, bounded to the enclosing
// loop. Producers outside the loop become recorded live-ins.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "dilforge/dcfg.hpp"
#include "dilforge/isa.hpp"
#include "dilforge/trace.hpp"

namespace dilforge {

enum class DepKind : uint8_t { Register, Memory };
enum class DepDir : uint8_t { Intra, LoopCarried };

struct SliceEdge {
  uint64_t producer_ip = 0;
  uint64_t consumer_ip = 0;
  DepKind kind = DepKind::Register;
  DepDir dir = DepDir::Intra;

  auto operator<=>(const SliceEdge&) const = default;
};

struct DependenceGraph {
  uint64_t target_ip = 0;
  std::vector<uint64_t> nodes;  // static ips in the slice, sorted
  std::set<SliceEdge> edges;
  std::vector<std::vector<uint64_t>> cycles;  // elementary, as ip lists
  std::vector<bool> cycle_has_irregular_memory;
  bool call_crossing = false;
  uint64_t instances_walked = 0;
  std::set<uint8_t> live_in_regs;  // registers read from outside the slice
  // Static slice projection per observed loop path (path index ->
  // node-ip set); the control-independence decision compares these.
  std::map<uint32_t, std::set<uint64_t>> nodes_by_path;

  bool has_node(uint64_t ip) const {
    return std::binary_search(nodes.begin(), nodes.end(), ip);
  }
};

// Precondition: target executes in >= 2 iterations of `loop` (throws
// std::invalid_argument otherwise). `iters` must come from
// loop_iterations(trace, cfg, loop).
DependenceGraph backward_slice(const Trace& trace, const DependenceLinks& links,
                               const DynCFG& cfg, const Loop& loop,
                               const LoopIterations& iters, uint64_t target_ip);

// Populates graph.cycles via Johnson enumeration and flags each cycle
// that contains a load classified irregular (per `irregular_ips`).
void enumerate_slice_cycles(DependenceGraph& g,
                            const std::set<uint64_t>& irregular_ips,
                            size_t bound = 10000);

// Re-executes the slice instructions of the iteration containing
// `target_seq`, seeded with recorded live-in values (reads whose producer
// is not an in-slice instance of the same iteration), and returns the
// recomputed target address (to compare against the recorded one).
// Loads inside the slice contribute their recorded values; arithmetic is
// recomputed. `exclude_ip` (optional) drops one node, for minimality
// spot-checks; a read produced by a dropped node yields zero instead of
// being patched from the record.
uint64_t replay_slice_address(const Trace& trace, const DependenceLinks& links,
                              const DependenceGraph& g, const Program& prog,
                              const LoopIterations& iters, uint64_t target_seq,
                              uint64_t exclude_ip = ~0ull);

}  // namespace dilforge
