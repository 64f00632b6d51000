#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cspipe::decode {

// Modified Kneser-Ney discounts for one order: D(1), D(2), D(3+).
using Discounts = std::array<double, 3>;

struct LmTrainOptions {
  // Used for an order whose counts-of-counts cannot produce valid discounts
  // (typical on tiny corpora).
  Discounts fallback = {0.5, 1.0, 1.5};
};

// Interpolated modified Kneser-Ney trigram model held in ARPA backoff form.
// Sentences are padded with one <s> and terminated by </s>; the vocabulary
// always contains <unk>, <s> and </s>. P(<s>) is zero: <s> is context only.
// All public log-probabilities are natural logs.
class TrigramLM {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kNone = -1;  // "no word": history shorter than two

  // Throws ArgumentError when the corpus has no nonempty sentence.
  static TrigramLM train(const std::vector<std::vector<std::string>>& corpus, const LmTrainOptions& opts = {});
  // Throws DataError on malformed ARPA text. Orders above 3 are rejected.
  static TrigramLM from_arpa(std::string_view text);
  static TrigramLM load_arpa(const std::string& path);
  std::string to_arpa() const;
  void save_arpa(const std::string& path) const;

  // Word id, kUnk for out-of-vocabulary words.
  int id(std::string_view word) const;
  const std::string& word(int id) const { return words_[id]; }
  // Vocabulary size including <unk>, <s> and </s>.
  std::size_t vocab_size() const { return words_.size(); }
  int order() const { return order_; }

  // ln P(w | u v). Use u = kNone for the first word after <s> (v = kBos).
  double log_prob(int u, int v, int w) const;
  // Sum of ln P(w_i | w_{i-2} w_{i-1}) over the padded sentence; includes
  // the </s> term when `eos`.
  double score(const std::vector<std::string>& words, bool eos = true) const;
  // exp(-total log-prob / predicted tokens), </s> counted once per sentence.
  double perplexity(const std::vector<std::vector<std::string>>& sentences) const;

  // Discounts used per order (index 0 = unigram); empty for an ARPA-loaded model.
  const std::vector<Discounts>& discounts() const { return discounts_; }
  const std::vector<bool>& used_fallback() const { return fallback_; }

 private:
  struct Entry {
    double log10_p = 0.0;
    double log10_bo = 0.0;
  };

  int intern(const std::string& w);
  static std::uint64_t key(int v, int w) { return (std::uint64_t(v) << 21) | std::uint64_t(w); }
  static std::uint64_t key(int u, int v, int w) {
    return (std::uint64_t(u) << 42) | (std::uint64_t(v) << 21) | std::uint64_t(w);
  }
  double log10_prob(int u, int v, int w) const;

  int order_ = 3;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
  std::vector<Entry> unigrams_;
  std::unordered_map<std::uint64_t, Entry> bigrams_;
  std::unordered_map<std::uint64_t, Entry> trigrams_;
  std::vector<Discounts> discounts_;
  std::vector<bool> fallback_;
};

}  // namespace cspipe::decode
