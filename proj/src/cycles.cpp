#include "dilforge/cycles.hpp"

#include <algorithm>

namespace dilforge {

namespace {

// Johnson (1975), with self-loops reported as length-1 cycles. Operates
// on the subgraph induced by nodes >= s each round, as in the original.
struct JohnsonState {
  const std::vector<std::vector<int>>& adj;
  size_t bound;
  int s = 0;
  std::vector<bool> blocked;
  std::vector<std::vector<int>> blist;
  std::vector<int> stack;
  std::vector<std::vector<int>>& out;

  JohnsonState(const std::vector<std::vector<int>>& a, size_t b,
               std::vector<std::vector<int>>& o)
      : adj(a), bound(b), blocked(a.size()), blist(a.size()), out(o) {}

  void unblock(int u) {
    blocked[u] = false;
    for (int w : blist[u])
      if (blocked[w]) unblock(w);
    blist[u].clear();
  }

  bool circuit(int v) {
    bool found = false;
    stack.push_back(v);
    blocked[v] = true;
    for (int w : adj[v]) {
      if (w < s) continue;
      if (w == s) {
        if (out.size() >= bound) throw CycleBoundExceeded(bound);
        out.push_back(stack);
        found = true;
      } else if (!blocked[w]) {
        if (circuit(w)) found = true;
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (int w : adj[v]) {
        if (w < s) continue;
        auto& bl = blist[w];
        if (std::find(bl.begin(), bl.end(), v) == bl.end()) bl.push_back(v);
      }
    }
    stack.pop_back();
    return found;
  }
};

}  // namespace

std::vector<std::vector<int>> simple_cycles(
    const std::vector<std::vector<int>>& adj, size_t bound) {
  std::vector<std::vector<int>> out;
  int n = static_cast<int>(adj.size());
  JohnsonState js(adj, bound, out);
  for (int s = 0; s < n; ++s) {
    js.s = s;
    std::fill(js.blocked.begin(), js.blocked.end(), false);
    for (auto& b : js.blist) b.clear();
    js.circuit(s);
  }
  // Canonical form: rotation already starts at the smallest node since
  // rounds go s = 0..n-1 and only touch nodes >= s.
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dilforge
