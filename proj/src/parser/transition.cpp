#include "cspipe/parser/transition.hpp"

#include <algorithm>
#include <set>

#include "cspipe/error.hpp"
#include "cspipe/treebank/tree.hpp"

namespace cspipe::parser {

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {}

LabelSet LabelSet::from_sentences(const std::vector<Sentence>& sentences) {
  std::set<std::string> all;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      if (!t.deprel.empty()) all.insert(t.deprel);
    }
  }
  return LabelSet({all.begin(), all.end()});
}

int LabelSet::index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

int LabelSet::encode(const Transition& t) const {
  switch (t.move) {
    case Move::shift:
      return 0;
    case Move::reduce:
      return 1;
    case Move::left_arc:
      return 2 + t.label;
    case Move::right_arc:
      return 2 + size() + t.label;
  }
  return 0;
}

Transition LabelSet::decode(int output) const {
  if (output == 0) return {Move::shift, -1};
  if (output == 1) return {Move::reduce, -1};
  if (output < 2 + size()) return {Move::left_arc, output - 2};
  return {Move::right_arc, output - 2 - size()};
}

std::string to_string(const Transition& t, const LabelSet* labels) {
  auto lab = [&] {
    return labels && t.label >= 0 && t.label < labels->size() ? labels->name(t.label) : std::to_string(t.label);
  };
  switch (t.move) {
    case Move::shift:
      return "Shift";
    case Move::reduce:
      return "Reduce";
    case Move::left_arc:
      return "LeftArc(" + lab() + ")";
    case Move::right_arc:
      return "RightArc(" + lab() + ")";
  }
  return "?";
}

Config Config::initial(int n) {
  Config c;
  c.stack = {0};
  c.next = 1;
  c.n = n;
  c.heads.assign(n + 1, -1);
  c.labels.assign(n + 1, -1);
  return c;
}

std::string Config::summary() const {
  std::string s = "stack=[";
  for (std::size_t i = 0; i < stack.size(); ++i) s += (i ? " " : "") + std::to_string(stack[i]);
  s += "] buffer=";
  s += buffer_empty() ? "[]" : "[" + std::to_string(next) + ".." + std::to_string(n) + "]";
  return s;
}

bool is_legal(const Config& c, const Transition& t) {
  const int s = c.top();
  switch (t.move) {
    case Move::shift:
      return !c.buffer_empty();
    case Move::left_arc:
      return !c.buffer_empty() && s != 0 && c.heads[s] == -1;
    case Move::right_arc:
      return !c.buffer_empty() && (s != 0 || !c.root_has_dependent);
    case Move::reduce:
      return s != 0 && (c.heads[s] != -1 || c.buffer_empty());
  }
  return false;
}

std::vector<Transition> legal_transitions(const Config& c, int num_labels) {
  std::vector<Transition> out;
  if (is_legal(c, {Move::shift, -1})) out.push_back({Move::shift, -1});
  if (is_legal(c, {Move::reduce, -1})) out.push_back({Move::reduce, -1});
  if (is_legal(c, {Move::left_arc, 0})) {
    for (int l = 0; l < num_labels; ++l) out.push_back({Move::left_arc, l});
  }
  if (is_legal(c, {Move::right_arc, 0})) {
    for (int l = 0; l < num_labels; ++l) out.push_back({Move::right_arc, l});
  }
  return out;
}

void apply(Config& c, const Transition& t) {
  if (!is_legal(c, t)) throw ArgumentError("illegal transition " + to_string(t) + " in " + c.summary());
  const int s = c.top();
  switch (t.move) {
    case Move::shift:
      c.stack.push_back(c.next++);
      break;
    case Move::reduce:
      c.stack.pop_back();
      break;
    case Move::left_arc:
      c.heads[s] = c.next;
      c.labels[s] = t.label;
      c.stack.pop_back();
      break;
    case Move::right_arc:
      c.heads[c.next] = s;
      c.labels[c.next] = t.label;
      if (s == 0) c.root_has_dependent = true;
      c.stack.push_back(c.next++);
      break;
  }
}

GoldTree gold_tree(const Sentence& s, const LabelSet& labels) {
  GoldTree g;
  const int n = static_cast<int>(s.size());
  g.heads.assign(n + 1, -1);
  g.labels.assign(n + 1, -1);
  for (int i = 1; i <= n; ++i) {
    const Token& t = s.tokens[i - 1];
    if (!t.head) throw ArgumentError("token " + std::to_string(i) + " has no head");
    g.heads[i] = *t.head;
    g.labels[i] = labels.index(t.deprel);
    if (g.labels[i] < 0) throw ArgumentError("label '" + t.deprel + "' is not in the label set");
  }
  return g;
}

Transition static_oracle(const Config& c, const GoldTree& gold) {
  const int s = c.top();
  if (c.buffer_empty()) return {Move::reduce, -1};
  const int b = c.front();
  if (s != 0 && gold.heads[s] == b) return {Move::left_arc, gold.labels[s]};
  if (gold.heads[b] == s) return {Move::right_arc, gold.labels[b]};
  if (s != 0 && c.heads[s] != -1) {
    bool pending = false;
    for (int k = b; k <= c.n && !pending; ++k) pending = gold.heads[k] == s;
    if (!pending) return {Move::reduce, -1};
  }
  return {Move::shift, -1};
}

std::vector<Transition> static_derivation(const GoldTree& gold) {
  const int n = static_cast<int>(gold.heads.size()) - 1;
  Config c = Config::initial(n);
  std::vector<Transition> out;
  while (!c.terminal()) {
    Transition t = static_oracle(c, gold);
    if (!is_legal(c, t)) throw ArgumentError("gold tree is not reachable by arc-eager derivation");
    apply(c, t);
    out.push_back(t);
  }
  for (int d = 1; d <= n; ++d) {
    if (c.heads[d] != gold.heads[d]) throw ArgumentError("gold tree is not projective");
  }
  return out;
}

int reachable_gold_arcs(const Config& c, const GoldTree& gold) {
  std::vector<char> on_stack(c.n + 1, 0);
  for (int x : c.stack) on_stack[x] = 1;
  auto in_buffer = [&](int x) { return x >= c.next; };
  auto popped = [&](int x) { return x != 0 && !on_stack[x] && !in_buffer(x); };
  int count = 0;
  for (int d = 1; d <= c.n; ++d) {
    if (c.heads[d] != -1) continue;
    const int h = gold.heads[d];
    if (popped(h) || popped(d)) continue;
    if (on_stack[h] && on_stack[d]) continue;
    if (h == 0 && (c.root_has_dependent || !in_buffer(d))) continue;
    ++count;
  }
  return count;
}

int correct_arcs(const Config& c, const GoldTree& gold) {
  int count = 0;
  for (int d = 1; d <= c.n; ++d) count += c.heads[d] == gold.heads[d] && c.labels[d] == gold.labels[d];
  return count;
}

int transition_cost(const Config& c, const Transition& t, const GoldTree& gold) {
  Config next = c;
  apply(next, t);
  return (correct_arcs(c, gold) + reachable_gold_arcs(c, gold)) -
         (correct_arcs(next, gold) + reachable_gold_arcs(next, gold));
}

}  // namespace cspipe::parser
