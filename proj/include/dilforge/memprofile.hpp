// Functional cache profiling: per-ip load statistics, address-delta
// classification (constant / striding / irregular), and the delinquency
// screen that yields DIL candidates.
#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "dilforge/cache.hpp"
#include "dilforge/trace.hpp"
#include "dilforge/verdict_types.hpp"

namespace dilforge {

struct LoadStats {
  uint64_t ip = 0;
  uint64_t executions = 0;
  uint64_t l1_misses = 0;
  uint64_t l2_misses = 0;
  uint64_t llc_misses = 0;
  uint64_t latency_sum = 0;
  uint64_t prefetch_covered = 0;  // accesses served from prefetched lines
  std::map<int64_t, uint64_t> delta_histogram;
  LoadClass cls = LoadClass::Unclassifiable;
  bool dram_bound = false;

  double avg_latency() const {
    return executions ? static_cast<double>(latency_sum) / executions : 0.0;
  }
};

struct ProfileResult {
  std::unordered_map<uint64_t, LoadStats> loads;
  uint64_t total_l1_load_misses = 0;
  uint64_t hw_prefetch_fills = 0;
};

// One functional pass over the trace; stores probe and allocate but only
// loads are reported. Throws on an empty trace.
ProfileResult simulate_caches(const Trace& trace, const CacheConfig& cfg);

// Histogram of consecutive-execution address deltas for one load ip.
// Throws std::out_of_range for an unknown ip; a load with fewer than two
// executions yields an empty histogram.
std::map<int64_t, uint64_t> delta_histogram(const Trace& trace, uint64_t ip);

// Minimal delta set covering 90% of executions decides the class:
// {0} alone -> constant, >= 10 members -> irregular, otherwise striding.
// Fewer than 10 executions -> Unclassifiable.
LoadClass classify_load(const std::map<int64_t, uint64_t>& hist);

struct DelinquencyReport {
  std::vector<LoadStats> loads;           // by L1-miss share, descending
  std::vector<uint64_t> selected;         // minimal >=99% miss-share prefix
  std::vector<uint64_t> dil_candidates;   // selected ∩ irregular ∩ dram-bound
  double coverage_threshold = 0.99;
};

DelinquencyReport screen_delinquent(const ProfileResult& profile,
                                    const CacheConfig& cfg);

// Convenience: profile + classify + screen.
DelinquencyReport profile_and_screen(const Trace& trace, const CacheConfig& cfg);

}  // namespace dilforge
