// Elementary cycle enumeration for small directed graphs (Johnson's
// algorithm with self-loop support).
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dilforge {

struct CycleBoundExceeded : std::runtime_error {
  explicit CycleBoundExceeded(size_t bound)
      : std::runtime_error("simple-cycle enumeration exceeded bound of " +
                           std::to_string(bound)),
        bound(bound) {}
  size_t bound;
};

// All elementary cycles of the graph given as adjacency lists. Each cycle
// is a node sequence without the closing repeat; self-loops come out as
// single-node cycles. Cycles are canonicalized (rotated so the smallest
// node leads) and sorted. Throws CycleBoundExceeded past `bound` cycles.
std::vector<std::vector<int>> simple_cycles(
    const std::vector<std::vector<int>>& adj, size_t bound = 10000);

}  // namespace dilforge
