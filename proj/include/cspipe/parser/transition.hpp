#pragma once

#include <string>
#include <vector>

#include "cspipe/treebank/sentence.hpp"

namespace cspipe::parser {

enum class Move { shift, reduce, left_arc, right_arc };

struct Transition {
  Move move = Move::shift;
  int label = -1;  // label index for arcs, -1 otherwise
  friend bool operator==(const Transition&, const Transition&) = default;
};

// Dependency label inventory, frozen from training data.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<std::string> labels);
  // Sorted unique deprels of every token in `sentences`.
  static LabelSet from_sentences(const std::vector<Sentence>& sentences);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& name(int i) const { return labels_[i]; }
  const std::vector<std::string>& names() const { return labels_; }
  // -1 when absent.
  int index(const std::string& label) const;

  // Output layer layout: shift, reduce, left_arc(l)..., right_arc(l)...
  int num_outputs() const { return 2 + 2 * size(); }
  int encode(const Transition& t) const;
  Transition decode(int output) const;

 private:
  std::vector<std::string> labels_;
};

std::string to_string(const Transition& t, const LabelSet* labels = nullptr);

// Arc-eager configuration over tokens 1..n with ROOT = 0. The buffer is
// always a suffix of the sentence, so it is stored as its first index.
struct Config {
  std::vector<int> stack;   // bottom first; stack[0] == 0
  int next = 1;             // buffer = next..n
  int n = 0;
  std::vector<int> heads;   // heads[d], -1 when unattached; heads[0] unused
  std::vector<int> labels;  // label index per token, -1 when unattached
  bool root_has_dependent = false;

  static Config initial(int n);
  bool buffer_empty() const { return next > n; }
  int top() const { return stack.back(); }
  int front() const { return next; }
  bool terminal() const { return buffer_empty() && stack.size() == 1; }
  std::string summary() const;
};

// Shift iff the buffer is nonempty. LeftArc iff the buffer is nonempty and
// the stack top is a headless non-ROOT token. RightArc iff the buffer is
// nonempty, except that ROOT takes at most one dependent. Reduce iff the
// stack top is a headed token, or the buffer is empty and the top is not
// ROOT (a headless token popped at the end stays headless).
bool is_legal(const Config& c, const Transition& t);
// Arc transitions are expanded over all `num_labels` labels.
std::vector<Transition> legal_transitions(const Config& c, int num_labels);
// Throws ArgumentError naming the transition and the configuration.
void apply(Config& c, const Transition& t);

// Gold tree in index form; heads[0] and labels[0] unused.
struct GoldTree {
  std::vector<int> heads;
  std::vector<int> labels;
};

// Throws ArgumentError for an unknown label or unset head.
GoldTree gold_tree(const Sentence& s, const LabelSet& labels);

// The canonical transition for projective gold trees: LeftArc, RightArc,
// Reduce once the top has collected all its dependents, Shift otherwise.
Transition static_oracle(const Config& c, const GoldTree& gold);
// Full static-oracle derivation; throws ArgumentError if the tree is not
// projective (the derivation would not rebuild it).
std::vector<Transition> static_derivation(const GoldTree& gold);

// Number of gold arcs that can still be built from `c`: the dependent is
// unattached, neither end has been popped, the two ends are not both on the
// stack, and an arc from ROOT needs ROOT free and the dependent in the buffer.
int reachable_gold_arcs(const Config& c, const GoldTree& gold);
int correct_arcs(const Config& c, const GoldTree& gold);
// Loss in best achievable labeled attachment caused by taking `t`.
int transition_cost(const Config& c, const Transition& t, const GoldTree& gold);

}  // namespace cspipe::parser
