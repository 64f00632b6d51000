#include "cspipe/norm/normalizer.hpp"

#include "cspipe/util/text.hpp"

namespace cspipe::norm {

CandidateSet normalize_word(const CharSeq2Seq& model, const std::string& word, int b) {
  const std::string low = text::lower(word);
  CandidateSet out{word, model.beam(low, b), model.unknown_chars(low)};
  for (auto& h : out.candidates) {
    if (h.text == low) h.text = word;
  }
  return out;
}

CandidateSet Normalizer::candidates(const std::string& word, LangTag tag, int b) const {
  const CharSeq2Seq* model = tag == LangTag::hi ? hindi_.get() : tag == LangTag::en ? english_.get() : nullptr;
  if (!model || word.empty()) return {word, {{word, 0.0}}, 0};
  return normalize_word(*model, word, b);
}

std::string Normalizer::transliterate(const std::string& word) const {
  if (!hindi_ || word.empty()) return word;
  return normalize_word(*hindi_, word, 1).candidates.front().text;
}

}  // namespace cspipe::norm
