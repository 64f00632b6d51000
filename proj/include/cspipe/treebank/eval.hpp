#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspipe/treebank/sentence.hpp"
#include "cspipe/treebank/tree.hpp"

namespace cspipe {

struct LabelScore {
  double precision = 0.0;  // percent
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t count = 0;  // gold occurrences
};

struct EvalReport {
  double uas = 0.0;  // percent
  double las = 0.0;
  double pos_acc = 0.0;
  std::size_t tokens = 0;
  std::map<std::string, LabelScore> per_label;
  LabelScore average;  // count-weighted over per_label
};

// Punctuation is scored like every other token. Throws ArgumentError naming
// the first sentence whose token count differs.
EvalReport attachment_scores(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred);

EvalReport label_prf(const std::vector<LangTag>& gold, const std::vector<LangTag>& pred);
EvalReport label_prf(const std::vector<std::string>& gold, const std::vector<std::string>& pred);

struct NormAccuracy {
  std::size_t tokens = 0;
  std::size_t correct = 0;
  std::size_t noisy_tokens = 0;  // gold norm differs from the surface form
  std::size_t noisy_correct = 0;
  double accuracy() const { return tokens ? 100.0 * correct / tokens : 0.0; }
  double noisy_accuracy() const { return noisy_tokens ? 100.0 * noisy_correct / noisy_tokens : 0.0; }
};

// Compares predicted token norms against gold norms over tokens whose gold
// language tag is `lang`. Tokens without a gold norm are skipped.
NormAccuracy normalization_accuracy(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred,
                                    LangTag lang);

nlohmann::json to_json(const EvalReport& r);
nlohmann::json to_json(const std::vector<Violation>& v);
nlohmann::json to_json(const NormAccuracy& a);

}  // namespace cspipe
