#include "dilforge/cache.hpp"

namespace dilforge {

bool CacheConfig::valid_shape() const {
  auto pow2 = [](uint64_t v) { return v && (v & (v - 1)) == 0; };
  if (l1.line != l2.line || l2.line != llc.line) return false;
  for (const auto* lv : {&l1, &l2, &llc})
    if (!pow2(lv->size) || !pow2(lv->line) || lv->assoc == 0) return false;
  return true;
}

CacheHierarchy::CacheHierarchy(const CacheConfig& cfg, bool timing_mode)
    : cfg_(cfg), timing_(timing_mode) {
  for (const auto& lc : {cfg.l1, cfg.l2, cfg.llc}) {
    Level lv;
    lv.cfg = lc;
    lv.sets = static_cast<uint32_t>(lc.size / (lc.line * lc.assoc));
    lv.lines.resize(static_cast<size_t>(lv.sets) * lc.assoc);
    levels_.push_back(std::move(lv));
  }
  table_.resize(cfg.prefetcher.table_size);
}

uint64_t CacheHierarchy::Level::set_of(uint64_t addr) const {
  return (addr / cfg.line) & (sets - 1);
}

CacheHierarchy::Line* CacheHierarchy::Level::find(uint64_t addr) {
  uint64_t tag = addr / cfg.line;
  Line* base = &lines[set_of(addr) * cfg.assoc];
  for (uint32_t w = 0; w < cfg.assoc; ++w)
    if (base[w].valid && base[w].tag == tag) return &base[w];
  return nullptr;
}

CacheHierarchy::Line* CacheHierarchy::Level::victim(uint64_t addr) {
  Line* base = &lines[set_of(addr) * cfg.assoc];
  Line* v = base;
  for (uint32_t w = 0; w < cfg.assoc; ++w) {
    if (!base[w].valid) return &base[w];
    if (base[w].lru < v->lru) v = &base[w];
  }
  return v;
}

uint64_t CacheHierarchy::mshr_admit(Level& lv, uint64_t start,
                                    uint64_t fill_latency) {
  if (!timing_) return start + fill_latency;
  while (!lv.mshr.empty() && lv.mshr.top() <= start) lv.mshr.pop();
  if (lv.mshr.size() >= cfg_.mshrs_per_level) {
    start = lv.mshr.top();
    while (!lv.mshr.empty() && lv.mshr.top() <= start) lv.mshr.pop();
  }
  uint64_t done = start + fill_latency;
  lv.mshr.push(done);
  return done;
}

void CacheHierarchy::install(int level, uint64_t addr, uint64_t ready,
                             FillSource src) {
  Level& lv = levels_[level];
  Line* ln = lv.find(addr);
  if (!ln) ln = lv.victim(addr);
  ln->valid = true;
  ln->tag = addr / lv.cfg.line;
  ln->lru = ++tick_;
  ln->ready_at = ready;
  ln->source = src;
}

void CacheHierarchy::train_prefetcher(uint64_t addr, uint64_t ip,
                                      uint64_t now) {
  const auto& pf = cfg_.prefetcher;
  if (!pf.enabled || table_.empty()) return;
  PredictorEntry& e = table_[ip % table_.size()];
  if (e.ip != ip) {
    e = {ip, addr, 0, 0};
    return;
  }
  int64_t delta = static_cast<int64_t>(addr) - static_cast<int64_t>(e.last_addr);
  if (delta != 0 && delta == e.last_delta) {
    if (e.confirmations < 2) ++e.confirmations;
  } else {
    e.confirmations = delta != 0 ? 1 : 0;
  }
  e.last_delta = delta != 0 ? delta : e.last_delta;
  e.last_addr = addr;
  if (e.confirmations < 2) return;

  uint64_t line = cfg_.l2.line;
  int64_t lead = static_cast<int64_t>(line) * pf.degree * (delta < 0 ? -1 : 1);
  uint64_t target = addr + static_cast<uint64_t>(lead);
  // Fill into L2 (and LLC) only; the L1 stays demand-managed.
  if (levels_[1].find(target)) return;
  uint64_t done = mshr_admit(levels_[1], now, cfg_.dram_latency);
  install(1, target, done, FillSource::HwPrefetch);
  install(2, target, done, FillSource::HwPrefetch);
  ++hw_fills_;
}

AccessResult CacheHierarchy::access(uint64_t addr, uint64_t ip, bool is_store,
                                    uint64_t now) {
  AccessResult res;
  int hit = -1;
  Line* line = nullptr;
  for (int i = 0; i < 3; ++i) {
    if ((line = levels_[i].find(addr))) {
      hit = i;
      break;
    }
  }
  if (hit >= 0) {
    res.hit_level = static_cast<uint8_t>(hit);
    res.hit_prefetched_line = line->source != FillSource::Demand;
    uint64_t hit_lat = levels_[hit].cfg.hit_latency;
    if (timing_ && line->ready_at > now + hit_lat) {
      // In-flight fill: wait out the remainder.
      res.ready_at = line->ready_at;
      res.latency = line->ready_at - now;
      res.prefetched_line_arrived = false;
    } else {
      res.ready_at = now + hit_lat;
      res.latency = hit_lat;
      res.prefetched_line_arrived = true;
    }
    line->lru = ++tick_;
    // Promote into the levels above the hit.
    for (int i = 0; i < hit; ++i)
      install(i, addr, res.ready_at, FillSource::Demand);
  } else {
    res.hit_level = 3;
    uint64_t done = mshr_admit(levels_[2], now, cfg_.dram_latency);
    res.ready_at = done;
    res.latency = done - now;
    for (int i = 0; i < 3; ++i) install(i, addr, done, FillSource::Demand);
  }
  if (!is_store) train_prefetcher(addr, ip, now);
  return res;
}

uint64_t CacheHierarchy::sw_prefetch(uint64_t addr, uint64_t now) {
  for (int i = 0; i < 3; ++i) {
    if (Line* ln = levels_[i].find(addr)) {
      ln->lru = ++tick_;
      if (i > 0) {
        // Pull an in-cache line up to L1, keeping its arrival time.
        uint64_t ready = timing_ ? std::max(ln->ready_at, now + levels_[i].cfg.hit_latency)
                                 : now;
        for (int j = 0; j < i; ++j) install(j, addr, ready, FillSource::SwPrefetch);
      }
      return ln->ready_at;
    }
  }
  uint64_t done = mshr_admit(levels_[2], now, cfg_.dram_latency);
  for (int i = 0; i < 3; ++i) install(i, addr, done, FillSource::SwPrefetch);
  ++sw_fills_;
  return done;
}

}  // namespace dilforge
