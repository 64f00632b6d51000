#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspipe/decode/lm.hpp"
#include "cspipe/treebank/sentence.hpp"

namespace cspipe::decode {

struct Candidate {
  std::string word;
  double score = 0.0;  // model score where one exists; decoding uses the LM only
};

struct LatticePosition {
  std::string original;
  std::optional<LangTag> tag;
  std::vector<Candidate> candidates;
};

struct Lattice {
  std::vector<LatticePosition> positions;

  std::size_t size() const { return positions.size(); }
  // Appends a position; the original word is always added as the last
  // candidate unless already present.
  void add(std::string original, std::optional<LangTag> tag, const std::vector<std::string>& words,
           const std::vector<double>& scores = {});
  // Throws ArgumentError for an empty position.
  void validate() const;
};

struct Decoded {
  std::vector<int> choice;  // candidate index per position
  std::vector<std::string> words;
  double score = 0.0;       // total LM log-probability, </s> included
};

// Exact argmax of the LM score over every candidate combination. Among equal
// scores the earliest candidate index at the latest differing position wins.
Decoded viterbi_decode(const Lattice& lattice, const TrigramLM& lm);

nlohmann::json to_json(const Lattice& lattice);
nlohmann::json to_json(const Decoded& d);

}  // namespace cspipe::decode
