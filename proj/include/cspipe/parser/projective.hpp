#pragma once

#include <string>
#include <vector>

#include "cspipe/treebank/sentence.hpp"

namespace cspipe::parser {

// Head+Path label encoding. A lifted dependent carries "label↑headlabel",
// where headlabel is the plain label of its original head; every arc the
// dependent was lifted over carries a trailing "↓".
inline constexpr const char* kLiftMark = "\xE2\x86\x91";  // U+2191
inline constexpr const char* kPathMark = "\xE2\x86\x93";  // U+2193

struct EncodedLabel {
  std::string base;
  std::string head_label;  // empty unless lifted
  bool lifted = false;
  bool on_path = false;
};

EncodedLabel decode_label(const std::string& label);
std::string encode_label(const EncodedLabel& l);

struct ProjectivizeResult {
  Sentence sentence;
  int lifts = 0;          // single-step lifts performed
  int lifted_tokens = 0;  // tokens whose label became encoded
};

// Lifts the shortest non-projective arc (leftmost dependent on ties) to the
// grandparent until the tree is projective. Requires a valid tree; throws
// ArgumentError otherwise.
ProjectivizeResult projectivize(const Sentence& s);

struct DeprojectivizeResult {
  Sentence sentence;
  int warnings = 0;  // encoded arcs left in place for lack of a matching head
};

// For each lifted token, in index order, searches breadth-first from its
// current head through path-marked arcs for a node whose plain label equals
// the encoded head label, preferring nodes without path-marked children;
// the token is re-attached there. All markers are stripped afterwards.
DeprojectivizeResult deprojectivize(const Sentence& s);

}  // namespace cspipe::parser
