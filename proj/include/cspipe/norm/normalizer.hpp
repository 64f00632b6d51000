#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cspipe/norm/seq2seq.hpp"
#include "cspipe/treebank/sentence.hpp"

namespace cspipe::norm {

// Ranked normalizations of one token: distinct, log-probabilities
// non-increasing, at most b entries.
struct CandidateSet {
  std::string word;
  std::vector<Hypothesis> candidates;
  int unknown_chars = 0;
};

// Beam search on the lowercased word. A candidate equal to the input modulo
// case takes the input's original casing.
CandidateSet normalize_word(const CharSeq2Seq& model, const std::string& word, int b);

// Routes tokens by language tag: hi to the back-transliteration model, en to
// the English model. ne, acro and univ tokens, and tokens whose model is not
// loaded, come back unchanged with log-probability 0.
class Normalizer {
 public:
  Normalizer(std::shared_ptr<const CharSeq2Seq> hindi, std::shared_ptr<const CharSeq2Seq> english)
      : hindi_(std::move(hindi)), english_(std::move(english)) {}

  const CharSeq2Seq* hindi() const { return hindi_.get(); }
  const CharSeq2Seq* english() const { return english_.get(); }
  CandidateSet candidates(const std::string& word, LangTag tag, int b) const;
  // First-best back-transliteration (identity without a Hindi model).
  std::string transliterate(const std::string& word) const;

 private:
  std::shared_ptr<const CharSeq2Seq> hindi_;
  std::shared_ptr<const CharSeq2Seq> english_;
};

}  // namespace cspipe::norm
