#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspipe/nn/layers.hpp"

namespace cspipe::nn {

// Character inventory over UTF-8 code points. Reserved symbols come first in
// the order given; the first one is the unknown-character symbol.
class CharVocab {
 public:
  CharVocab() = default;
  // Characters of `words` are added in first-seen order after `reserved`.
  CharVocab(std::vector<std::string> reserved, const std::vector<std::string>& words);

  int size() const { return static_cast<int>(symbols_.size()); }
  // 0 (the unknown symbol) when absent.
  int id(std::string_view ch) const;
  bool contains(std::string_view ch) const { return ids_.count(std::string(ch)) > 0; }
  const std::string& symbol(int id) const { return symbols_.at(id); }
  // One id per code point; `unknown` counts characters mapped to 0.
  std::vector<int> encode(std::string_view word, int* unknown = nullptr) const;

  nlohmann::json to_json() const;
  static CharVocab from_json(const nlohmann::json& j);

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> ids_;
};

// Word representation from its characters: the final states of a character
// BiLSTM, [forward last ; backward first].
class CharEncoder {
 public:
  CharEncoder() = default;
  CharEncoder(ParameterSet& ps, const std::string& name, CharVocab vocab, int char_dim, int hidden, Rng& rng);

  const CharVocab& vocab() const { return vocab_; }
  int output_dim() const { return lstm_.output_dim(); }
  // An empty word is read as a single unknown character.
  Expr encode(Graph& g, std::string_view word) const;

 private:
  CharVocab vocab_;
  Embedding emb_;
  BiLstm lstm_;
};

}  // namespace cspipe::nn
