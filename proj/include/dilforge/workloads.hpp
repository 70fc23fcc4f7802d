// Deterministic workload generators. Each generator emits a Program plus
// pre-built data segments exhibiting one memory-access archetype, the
// intended classification of every interesting load it plants (the
// analysis pipeline must reproduce these labels), and host-computed
// expected output bytes for the final memory check.
//
// The PRNG is xorshift64* (shifts 12/25/27, multiplier
// 0x2545f4914f6cdd1d); identical specs produce identical programs and
// data byte-for-byte.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dilforge/isa.hpp"
#include "dilforge/verdict_types.hpp"

namespace dilforge {

enum class WorkloadKind : uint8_t {
  HashHistogram,   // striding feeder -> mod -> two dependent irregular loads
  PointerChase,    // p = load(p): the load sits in its own slice cycle
  IndirectSimple,  // a[b[i]]
  IndirectNonlinear,  // a[f(b[i])], f a mul/xor/mask mix
  TreeSearch,      // array BST descent: slice differs per branch direction
  DenseStride,     // striding loads only
  CsrGather,       // outer rows / short inner gather loop (mean trip ~6)
};

const char* workload_kind_name(WorkloadKind k);
std::optional<WorkloadKind> workload_kind_from_name(const std::string& s);

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::HashHistogram;
  uint64_t size = 0;         // 0 -> per-kind default
  uint64_t unique_keys = 0;  // 0 -> per-kind default
  uint64_t seed = 1;
};

// Ground truth for one planted load.
struct PlantedLoad {
  std::string name;
  uint64_t ip = 0;
  LoadClass cls = LoadClass::Striding;
  bool expect_candidate = false;  // delinquent ∧ irregular after screening
  // Meaningful only when expect_candidate:
  bool runnable = false;
  bool control_independent = false;
  bool prefetchable = false;
  RejectReason reason = RejectReason::None;
};

struct OutputRegion {
  std::string name;
  uint64_t base = 0;
  std::vector<uint8_t> expected;  // host-computed oracle bytes
};

struct Workload {
  WorkloadSpec spec;
  Program program;
  std::vector<PlantedLoad> labels;
  std::vector<OutputRegion> outputs;
  uint64_t hot_loop_header = 0;   // ip of the analysed loop's header
  uint64_t inner_loop_header = 0; // nested kinds only
  uint64_t expected_instructions = 0;  // rough budget hint

  const PlantedLoad* label(const std::string& name) const;
};

// Throws std::invalid_argument on bad spec fields (size < 1,
// unique_keys > size where applicable).
Workload generate(const WorkloadSpec& spec);

// The number of planted prefetchable DILs in indirect-simple; tests use
// n_dils=2 to exercise merged plans in one loop.
Workload generate_indirect_simple(uint64_t size, uint64_t seed, int n_dils);

struct Xorshift64Star {
  uint64_t state;
  explicit Xorshift64Star(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  uint64_t next() {
    uint64_t x = state;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state = x;
    return x * 0x2545f4914f6cdd1dull;
  }
  // Unbiased-enough for workload shaping; not for cryptography.
  uint64_t below(uint64_t n) { return next() % n; }
};

}  // namespace dilforge
