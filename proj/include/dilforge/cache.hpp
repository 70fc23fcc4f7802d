// Three-level set-associative LRU hierarchy with an optional per-ip
// stride prefetcher (fills into L2). One object serves both the
// functional profiling pass (now == 0 everywhere) and the timing model
// (real access times, in-flight fills, MSHR throttling).
#pragma once

#include <cstdint>
#include <queue>
#include <vector>

namespace dilforge {

struct CacheLevelConfig {
  uint64_t size = 0;
  uint32_t assoc = 0;
  uint32_t line = 64;
  uint64_t hit_latency = 0;
};

struct StridePrefetcherConfig {
  bool enabled = true;
  uint32_t degree = 1;      // lines of lead per trigger
  uint32_t table_size = 256;
};

struct CacheConfig {
  CacheLevelConfig l1{32 * 1024, 8, 64, 4};
  CacheLevelConfig l2{256 * 1024, 8, 64, 14};
  CacheLevelConfig llc{1024 * 1024, 16, 64, 40};
  uint64_t dram_latency = 200;
  StridePrefetcherConfig prefetcher;
  uint32_t mshrs_per_level = 10;  // timing mode only

  bool valid_shape() const;
};

enum class FillSource : uint8_t { Demand, HwPrefetch, SwPrefetch };

struct AccessResult {
  uint8_t hit_level = 0;     // 0=L1,1=L2,2=LLC,3=DRAM
  uint64_t latency = 0;      // service latency relative to `now`
  uint64_t ready_at = 0;     // absolute cycle the data is usable
  bool hit_prefetched_line = false;  // line was installed by a prefetch
  bool prefetched_line_arrived = false;  // ...and had fully arrived
};

class CacheHierarchy {
 public:
  explicit CacheHierarchy(const CacheConfig& cfg, bool timing_mode = false);

  // Demand access (load or store, write-allocate). Trains the stride
  // prefetcher on loads. Deterministic for a fixed access sequence.
  AccessResult access(uint64_t addr, uint64_t ip, bool is_store, uint64_t now);

  // Software prefetch: fills all levels, occupies MSHRs, never stalls the
  // issuer. Returns the fill completion time.
  uint64_t sw_prefetch(uint64_t addr, uint64_t now);

  uint64_t hw_prefetch_fills() const { return hw_fills_; }
  uint64_t sw_prefetch_fills() const { return sw_fills_; }

 private:
  struct Line {
    uint64_t tag = 0;
    bool valid = false;
    uint64_t lru = 0;
    uint64_t ready_at = 0;
    FillSource source = FillSource::Demand;
  };
  struct Level {
    CacheLevelConfig cfg;
    uint32_t sets = 0;
    std::vector<Line> lines;  // sets * assoc
    std::priority_queue<uint64_t, std::vector<uint64_t>, std::greater<>> mshr;

    Line* find(uint64_t addr);
    Line* victim(uint64_t addr);
    uint64_t set_of(uint64_t addr) const;
  };
  struct PredictorEntry {
    uint64_t ip = 0;
    uint64_t last_addr = 0;
    int64_t last_delta = 0;
    uint32_t confirmations = 0;
  };

  uint64_t mshr_admit(Level& lv, uint64_t start, uint64_t fill_latency);
  void install(int level, uint64_t addr, uint64_t ready, FillSource src);
  void train_prefetcher(uint64_t addr, uint64_t ip, uint64_t now);

  CacheConfig cfg_;
  bool timing_;
  uint64_t tick_ = 0;
  std::vector<Level> levels_;
  std::vector<PredictorEntry> table_;
  uint64_t hw_fills_ = 0;
  uint64_t sw_fills_ = 0;
};

}  // namespace dilforge
