#include "dilforge/memprofile.hpp"

#include <algorithm>
#include <stdexcept>

namespace dilforge {

const char* load_class_name(LoadClass c) {
  switch (c) {
    case LoadClass::Constant: return "constant";
    case LoadClass::Striding: return "striding";
    case LoadClass::Irregular: return "irregular";
    case LoadClass::Unclassifiable: return "unclassifiable";
  }
  return "?";
}

const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::None: return "none";
    case RejectReason::ChasingCycle: return "chasing-cycle";
    case RejectReason::ControlDependent: return "control-dependent";
    case RejectReason::StoreAliasUnresolved: return "store-alias-unresolved";
    case RejectReason::OffsetDuplicate: return "offset-duplicate";
    case RejectReason::ColdLoop: return "cold-loop";
  }
  return "?";
}

ProfileResult simulate_caches(const Trace& trace, const CacheConfig& cfg) {
  if (trace.empty()) throw std::invalid_argument("empty trace");
  CacheHierarchy caches(cfg, /*timing_mode=*/false);
  ProfileResult res;
  std::unordered_map<uint64_t, uint64_t> last_addr;

  for (const auto& r : trace) {
    if (r.op == Opcode::Load || r.op == Opcode::Ret) {
      auto a = caches.access(r.mem_read.addr, r.ip, false, 0);
      LoadStats& s = res.loads[r.ip];
      s.ip = r.ip;
      s.executions++;
      s.latency_sum += a.latency;
      if (a.hit_level >= 1) {
        s.l1_misses++;
        res.total_l1_load_misses++;
      }
      if (a.hit_level >= 2) s.l2_misses++;
      if (a.hit_level >= 3) s.llc_misses++;
      if (a.hit_prefetched_line) s.prefetch_covered++;
      auto it = last_addr.find(r.ip);
      if (it != last_addr.end())
        s.delta_histogram[static_cast<int64_t>(r.mem_read.addr) -
                          static_cast<int64_t>(it->second)]++;
      last_addr[r.ip] = r.mem_read.addr;
    } else if (r.op == Opcode::Store || r.op == Opcode::Call) {
      caches.access(r.mem_write.addr, r.ip, true, 0);
    }
    // Prefetch records do not occur in untransformed traces profiled here;
    // if present they are treated as hints and fill the hierarchy.
    else if (r.op == Opcode::Prefetch) {
      caches.sw_prefetch(r.mem_read.addr, 0);
    }
  }
  for (auto& [ip, s] : res.loads) s.cls = classify_load(s.delta_histogram);
  res.hw_prefetch_fills = caches.hw_prefetch_fills();
  return res;
}

std::map<int64_t, uint64_t> delta_histogram(const Trace& trace, uint64_t ip) {
  std::map<int64_t, uint64_t> hist;
  bool seen = false, found = false;
  uint64_t prev = 0;
  for (const auto& r : trace) {
    if (r.ip != ip) continue;
    found = true;
    if (r.op != Opcode::Load || !r.has_mem_read) continue;
    if (seen)
      hist[static_cast<int64_t>(r.mem_read.addr) - static_cast<int64_t>(prev)]++;
    prev = r.mem_read.addr;
    seen = true;
  }
  if (!found) throw std::out_of_range("ip never executes in trace");
  return hist;
}

LoadClass classify_load(const std::map<int64_t, uint64_t>& hist) {
  uint64_t total = 0;
  for (const auto& [d, n] : hist) total += n;
  if (total + 1 < 10) return LoadClass::Unclassifiable;  // deltas = execs - 1

  // Minimal set of deltas covering 90% of executions: biggest counts
  // first, ties toward the smaller delta for determinism.
  std::vector<std::pair<int64_t, uint64_t>> sorted(hist.begin(), hist.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  uint64_t need = (total * 9 + 9) / 10;  // ceil(0.9 * total)
  uint64_t covered = 0;
  size_t members = 0;
  bool only_zero = true;
  for (const auto& [d, n] : sorted) {
    covered += n;
    ++members;
    if (d != 0) only_zero = false;
    if (covered >= need) break;
  }
  if (only_zero) return LoadClass::Constant;
  if (members >= 10) return LoadClass::Irregular;
  return LoadClass::Striding;
}

DelinquencyReport screen_delinquent(const ProfileResult& profile,
                                    const CacheConfig& cfg) {
  DelinquencyReport rep;
  rep.loads.reserve(profile.loads.size());
  for (const auto& [ip, s] : profile.loads) rep.loads.push_back(s);
  std::sort(rep.loads.begin(), rep.loads.end(),
            [](const LoadStats& a, const LoadStats& b) {
              if (a.l1_misses != b.l1_misses) return a.l1_misses > b.l1_misses;
              return a.ip < b.ip;
            });

  uint64_t total = profile.total_l1_load_misses;
  uint64_t covered = 0;
  for (auto& s : rep.loads) {
    s.dram_bound = s.avg_latency() > static_cast<double>(cfg.llc.hit_latency);
    if (total > 0 &&
        static_cast<double>(covered) < rep.coverage_threshold * total) {
      rep.selected.push_back(s.ip);
      covered += s.l1_misses;
    }
  }
  for (uint64_t ip : rep.selected) {
    auto it = std::find_if(rep.loads.begin(), rep.loads.end(),
                           [&](const LoadStats& s) { return s.ip == ip; });
    if (it->cls == LoadClass::Irregular && it->dram_bound)
      rep.dil_candidates.push_back(ip);
  }
  return rep;
}

DelinquencyReport profile_and_screen(const Trace& trace,
                                     const CacheConfig& cfg) {
  return screen_delinquent(simulate_caches(trace, cfg), cfg);
}

}  // namespace dilforge
