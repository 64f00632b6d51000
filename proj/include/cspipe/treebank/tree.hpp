#pragma once

#include <string>
#include <vector>

#include "cspipe/treebank/sentence.hpp"

namespace cspipe {

struct Violation {
  std::string kind;  // "missing head", "head out of range", "self loop", "missing deprel",
                     // "no root", "multiple roots", "cycle"
  int token = 0;     // offending token index, 0 when sentence-level
  std::string message;
};

// Empty iff every token has an in-range head and a label, exactly one token
// hangs off ROOT, and the head relation is acyclic.
std::vector<Violation> validate_tree(const Sentence& s);

// Same checks on a bare head vector (heads[0] unused).
std::vector<Violation> validate_heads(const std::vector<int>& heads);

// Arc (heads[dep] -> dep) is projective when every token strictly between
// head and dependent is dominated by the head. Requires a valid tree.
bool is_projective_arc(const std::vector<int>& heads, int dep);
bool is_projective(const std::vector<int>& heads);

std::vector<int> non_projective_arcs(const std::vector<int>& heads);

// True when `ancestor` dominates `node` (reflexive). ROOT (0) dominates all.
bool dominates(const std::vector<int>& heads, int ancestor, int node);

}  // namespace cspipe
