#pragma once

#include <string>
#include <vector>

#include "cspipe/decode/lattice.hpp"
#include "cspipe/decode/lm.hpp"
#include "cspipe/embed/lexicon.hpp"
#include "cspipe/treebank/sentence.hpp"

namespace cspipe::decode {

// Per-token input to the selection strategies. `candidates[i]` is the ranked
// model output for token i: English normalizations for an en token, Hindi
// back-transliterations for a hi token, ignored for other tags.
struct CsSentence {
  std::vector<std::string> forms;
  std::vector<LangTag> tags;
  std::vector<std::vector<std::string>> candidates;

  // Throws ArgumentError when the three vectors differ in length.
  void validate() const;
};

struct DecodeOptions {
  std::size_t top_k = 5;            // model candidates per position
  std::size_t max_equivalents = 3;  // lexicon translations per position
};

// Each hi/en token takes its first candidate (the original when none).
std::vector<std::string> first_best(const CsSentence& s);

// Viterbi over each maximal run of hi or en tokens with that run's LM; other
// tokens break runs and pass through unchanged.
std::vector<std::string> fragment_decode(const CsSentence& s, const TrigramLM& lm_hi, const TrigramLM& lm_en,
                                         const DecodeOptions& opts = {});

struct ThreeStepResult {
  Lattice english_lattice;
  Decoded english;
  Lattice hindi_lattice;
  Decoded hindi;
  std::vector<std::string> words;
};

// Step 1 decodes an English rendering (hi tokens replaced by translations of
// their first-best back-transliteration), step 2 a Hindi rendering (en tokens
// replaced by translations of their step-1 choice), step 3 keeps each token's
// choice from the step matching its own language.
ThreeStepResult three_step_decode(const CsSentence& s, const embed::BilingualLexicon& lex, const TrigramLM& lm_en,
                                  const TrigramLM& lm_hi, const DecodeOptions& opts = {});

nlohmann::json to_json(const ThreeStepResult& r);

}  // namespace cspipe::decode
