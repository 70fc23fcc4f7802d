// The prefetchability screen: runnable, control-independent,
// static-store-safe, offset-deduplicated.
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dilforge/dcfg.hpp"
#include "dilforge/memprofile.hpp"
#include "dilforge/slice.hpp"
#include "dilforge/verdict_types.hpp"

namespace dilforge {

struct DilVerdict {
  uint64_t ip = 0;
  int loop_index = -1;
  LoadClass cls = LoadClass::Irregular;
  bool dram_bound = false;
  bool runnable = false;
  bool control_independent = false;
  bool prefetchable = false;
  bool critical = false;  // max avg latency within its offset group
  bool call_crossing = false;
  uint64_t paths_observed = 0;
  std::vector<uint64_t> offset_group;  // all member ips incl. self
  RejectReason reason = RejectReason::None;
};

struct ScreenResult {
  std::vector<DilVerdict> verdicts;              // candidate order
  std::map<uint64_t, DependenceGraph> graphs;    // per candidate ip
};

// Applies the full screen to `report.dil_candidates`. Offset grouping
// pairs DILs in the same loop whose per-iteration address difference is
// one constant <= line size for >= 99% of iterations; only the group
// member with the highest average latency (ties: lowest ip) stays
// critical, the rest are rejected as offset duplicates.
ScreenResult screen_dils(const Trace& trace, const DependenceLinks& links,
                         const Program& prog, const DynCFG& cfg,
                         const std::vector<Loop>& loops,
                         const DelinquencyReport& report,
                         const ProfileResult& profile,
                         const CacheConfig& cache_cfg);

}  // namespace dilforge
