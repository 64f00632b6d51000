#include "cspipe/parser/projective.hpp"

#include <deque>

#include "cspipe/error.hpp"
#include "cspipe/treebank/tree.hpp"

namespace cspipe::parser {

EncodedLabel decode_label(const std::string& label) {
  EncodedLabel out;
  std::string s = label;
  const std::string path = kPathMark, lift = kLiftMark;
  if (s.size() >= path.size() && s.compare(s.size() - path.size(), path.size(), path) == 0) {
    out.on_path = true;
    s.resize(s.size() - path.size());
  }
  auto pos = s.find(lift);
  if (pos != std::string::npos) {
    out.lifted = true;
    out.head_label = s.substr(pos + lift.size());
    s.resize(pos);
  }
  out.base = s;
  return out;
}

std::string encode_label(const EncodedLabel& l) {
  std::string s = l.base;
  if (l.lifted) s += kLiftMark + l.head_label;
  if (l.on_path) s += kPathMark;
  return s;
}

ProjectivizeResult projectivize(const Sentence& s) {
  if (auto v = validate_tree(s); !v.empty()) throw ArgumentError("cannot projectivize: " + v[0].message);
  ProjectivizeResult r{s, 0, 0};
  std::vector<int> heads = head_vector(s);
  std::vector<EncodedLabel> labels;
  for (const auto& t : s.tokens) labels.push_back(decode_label(t.deprel));
  while (true) {
    auto bad = non_projective_arcs(heads);
    if (bad.empty()) break;
    int pick = bad[0];
    for (int d : bad) {
      if (std::abs(heads[d] - d) < std::abs(heads[pick] - pick)) pick = d;
    }
    const int h = heads[pick];
    EncodedLabel& dl = labels[pick - 1];
    if (!dl.lifted) {
      dl.lifted = true;
      dl.head_label = labels[h - 1].base;
      ++r.lifted_tokens;
    }
    labels[h - 1].on_path = true;
    heads[pick] = heads[h];
    ++r.lifts;
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    r.sentence.tokens[i].head = heads[i + 1];
    r.sentence.tokens[i].deprel = encode_label(labels[i]);
  }
  return r;
}

DeprojectivizeResult deprojectivize(const Sentence& s) {
  DeprojectivizeResult r{s, 0};
  const int n = static_cast<int>(s.size());
  std::vector<int> heads = head_vector(s);
  std::vector<EncodedLabel> labels;
  for (const auto& t : s.tokens) labels.push_back(decode_label(t.deprel));
  std::vector<std::vector<int>> children(n + 1);
  auto rebuild = [&] {
    for (auto& c : children) c.clear();
    for (int d = 1; d <= n; ++d) {
      if (heads[d] >= 0 && heads[d] <= n) children[heads[d]].push_back(d);
    }
  };
  rebuild();
  auto has_path_child = [&](int x) {
    for (int c : children[x]) {
      if (labels[c - 1].on_path) return true;
    }
    return false;
  };
  for (int d = 1; d <= n; ++d) {
    EncodedLabel& dl = labels[d - 1];
    if (!dl.lifted || heads[d] < 0) continue;
    int first = -1, end = -1;
    std::deque<int> queue;
    for (int c : children[heads[d]]) {
      if (c != d && labels[c - 1].on_path) queue.push_back(c);
    }
    while (!queue.empty() && end < 0) {
      int x = queue.front();
      queue.pop_front();
      if (labels[x - 1].base == dl.head_label) {
        if (first < 0) first = x;
        if (!has_path_child(x)) end = x;
      }
      for (int c : children[x]) {
        if (c != d && labels[c - 1].on_path) queue.push_back(c);
      }
    }
    int target = end >= 0 ? end : first;
    if (target < 0) {
      ++r.warnings;
    } else {
      heads[d] = target;
      rebuild();
    }
    dl.lifted = false;
    dl.head_label.clear();
  }
  for (int d = 1; d <= n; ++d) {
    r.sentence.tokens[d - 1].head = heads[d] >= 0 ? std::optional<int>(heads[d]) : std::nullopt;
    r.sentence.tokens[d - 1].deprel = labels[d - 1].base;
  }
  return r;
}

}  // namespace cspipe::parser
