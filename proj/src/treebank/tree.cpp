#include "cspipe/treebank/tree.hpp"

#include <algorithm>

namespace cspipe {

std::vector<Violation> validate_heads(const std::vector<int>& heads) {
  std::vector<Violation> out;
  const int n = static_cast<int>(heads.size()) - 1;
  int roots = 0;
  bool ranges_ok = true;
  for (int i = 1; i <= n; ++i) {
    int h = heads[i];
    if (h < 0) {
      out.push_back({"missing head", i, "token " + std::to_string(i) + " has no head"});
      ranges_ok = false;
    } else if (h > n) {
      out.push_back({"head out of range", i, "token " + std::to_string(i) + " has head " + std::to_string(h)});
      ranges_ok = false;
    } else if (h == i) {
      out.push_back({"self loop", i, "token " + std::to_string(i) + " is its own head"});
      ranges_ok = false;
    } else if (h == 0) {
      ++roots;
    }
  }
  if (n > 0 && roots == 0) out.push_back({"no root", 0, "no token is attached to ROOT"});
  if (roots > 1) out.push_back({"multiple roots", 0, std::to_string(roots) + " tokens are attached to ROOT"});
  if (!ranges_ok) return out;

  // 0 = unvisited, 1 = on current path, 2 = known to reach ROOT.
  std::vector<int> state(n + 1, 0);
  state[0] = 2;
  for (int i = 1; i <= n; ++i) {
    std::vector<int> path;
    int cur = i;
    while (state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = heads[cur];
    }
    if (state[cur] == 1) {
      out.push_back({"cycle", cur, "cycle through token " + std::to_string(cur)});
    }
    // Resolved either way; a cycle is reported once.
    for (int p : path) state[p] = 2;
  }
  return out;
}

std::vector<Violation> validate_tree(const Sentence& s) {
  auto out = validate_heads(head_vector(s));
  for (const auto& t : s.tokens) {
    if (t.head && t.deprel.empty()) {
      out.push_back({"missing deprel", t.index, "token " + std::to_string(t.index) + " has a head but no label"});
    }
  }
  return out;
}

bool dominates(const std::vector<int>& heads, int ancestor, int node) {
  const int n = static_cast<int>(heads.size()) - 1;
  if (ancestor == 0) return true;
  int cur = node;
  for (int steps = 0; steps <= n && cur > 0; ++steps) {
    if (cur == ancestor) return true;
    cur = heads[cur];
  }
  return false;
}

bool is_projective_arc(const std::vector<int>& heads, int dep) {
  int h = heads[dep];
  int lo = std::min(h, dep), hi = std::max(h, dep);
  for (int k = lo + 1; k < hi; ++k) {
    if (!dominates(heads, h, k)) return false;
  }
  return true;
}

std::vector<int> non_projective_arcs(const std::vector<int>& heads) {
  std::vector<int> out;
  for (int d = 1; d < static_cast<int>(heads.size()); ++d) {
    if (!is_projective_arc(heads, d)) out.push_back(d);
  }
  return out;
}

bool is_projective(const std::vector<int>& heads) { return non_projective_arcs(heads).empty(); }

}  // namespace cspipe
