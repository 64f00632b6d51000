#include "cspipe/treebank/eval.hpp"

#include <set>

#include "cspipe/error.hpp"

namespace cspipe {

namespace {

void check_shapes(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred) {
  if (gold.size() != pred.size()) {
    throw ArgumentError("sentence count mismatch: gold " + std::to_string(gold.size()) + ", predicted " +
                        std::to_string(pred.size()));
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != pred[i].size()) {
      throw ArgumentError("token count mismatch in sentence " + std::to_string(i) + ": gold " +
                          std::to_string(gold[i].size()) + ", predicted " + std::to_string(pred[i].size()));
    }
  }
}

double pct(std::size_t num, std::size_t den) { return den ? 100.0 * static_cast<double>(num) / den : 0.0; }

}  // namespace

EvalReport attachment_scores(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred) {
  check_shapes(gold, pred);
  std::size_t total = 0, heads = 0, labeled = 0, pos = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (std::size_t j = 0; j < gold[i].size(); ++j) {
      const Token& g = gold[i].tokens[j];
      const Token& p = pred[i].tokens[j];
      ++total;
      if (g.head && p.head && *g.head == *p.head) {
        ++heads;
        if (g.deprel == p.deprel) ++labeled;
      }
      if (g.upos == p.upos) ++pos;
    }
  }
  EvalReport r;
  r.tokens = total;
  r.uas = pct(heads, total);
  r.las = pct(labeled, total);
  r.pos_acc = pct(pos, total);
  return r;
}

EvalReport label_prf(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
  if (gold.size() != pred.size()) {
    throw ArgumentError("label sequence length mismatch: gold " + std::to_string(gold.size()) + ", predicted " +
                        std::to_string(pred.size()));
  }
  std::map<std::string, std::size_t> tp, gold_n, pred_n;
  std::set<std::string> labels;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    labels.insert(gold[i]);
    labels.insert(pred[i]);
    ++gold_n[gold[i]];
    ++pred_n[pred[i]];
    if (gold[i] == pred[i]) {
      ++tp[gold[i]];
      ++correct;
    }
  }
  EvalReport r;
  r.tokens = gold.size();
  r.pos_acc = pct(correct, gold.size());
  double wp = 0, wr = 0, wf = 0;
  for (const auto& l : labels) {
    LabelScore s;
    s.count = gold_n[l];
    s.precision = pct(tp[l], pred_n[l]);
    s.recall = pct(tp[l], gold_n[l]);
    s.f1 = (s.precision + s.recall) > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    wp += s.precision * s.count;
    wr += s.recall * s.count;
    wf += s.f1 * s.count;
    r.per_label[l] = s;
  }
  if (!gold.empty()) {
    double n = static_cast<double>(gold.size());
    r.average = {wp / n, wr / n, wf / n, gold.size()};
  }
  return r;
}

EvalReport label_prf(const std::vector<LangTag>& gold, const std::vector<LangTag>& pred) {
  std::vector<std::string> g, p;
  for (auto t : gold) g.emplace_back(to_string(t));
  for (auto t : pred) p.emplace_back(to_string(t));
  return label_prf(g, p);
}

NormAccuracy normalization_accuracy(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred,
                                    LangTag lang) {
  check_shapes(gold, pred);
  NormAccuracy acc;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (std::size_t j = 0; j < gold[i].size(); ++j) {
      const Token& g = gold[i].tokens[j];
      if (g.lang != lang || !g.norm) continue;
      bool ok = pred[i].tokens[j].surface() == *g.norm;
      ++acc.tokens;
      acc.correct += ok;
      if (*g.norm != g.form) {
        ++acc.noisy_tokens;
        acc.noisy_correct += ok;
      }
    }
  }
  return acc;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["uas"] = r.uas;
  j["las"] = r.las;
  j["pos_acc"] = r.pos_acc;
  j["tokens"] = r.tokens;
  auto score = [](const LabelScore& s) {
    return nlohmann::json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"count", s.count}};
  };
  if (!r.per_label.empty()) {
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [k, v] : r.per_label) labels[k] = score(v);
    j["per_label"] = labels;
    j["average"] = score(r.average);
  }
  return j;
}

nlohmann::json to_json(const std::vector<Violation>& v) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : v) j.push_back({{"kind", x.kind}, {"token", x.token}, {"message", x.message}});
  return j;
}

nlohmann::json to_json(const NormAccuracy& a) {
  return {{"tokens", a.tokens},
          {"correct", a.correct},
          {"accuracy", a.accuracy()},
          {"noisy_tokens", a.noisy_tokens},
          {"noisy_correct", a.noisy_correct},
          {"noisy_accuracy", a.noisy_accuracy()}};
}

}  // namespace cspipe
