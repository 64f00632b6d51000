#include "cspipe/decode/contextual.hpp"

#include "cspipe/error.hpp"

namespace cspipe::decode {

namespace {

std::vector<std::string> top(const std::vector<std::string>& v, std::size_t k) {
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(k, v.size()))};
}

}  // namespace

void CsSentence::validate() const {
  if (tags.size() != forms.size() || candidates.size() != forms.size()) {
    throw ArgumentError("sentence has " + std::to_string(forms.size()) + " forms, " + std::to_string(tags.size()) +
                        " tags and " + std::to_string(candidates.size()) + " candidate lists");
  }
}

std::vector<std::string> first_best(const CsSentence& s) {
  s.validate();
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.forms.size(); ++i) {
    bool lang = s.tags[i] == LangTag::hi || s.tags[i] == LangTag::en;
    out.push_back(lang && !s.candidates[i].empty() ? s.candidates[i][0] : s.forms[i]);
  }
  return out;
}

std::vector<std::string> fragment_decode(const CsSentence& s, const TrigramLM& lm_hi, const TrigramLM& lm_en,
                                         const DecodeOptions& opts) {
  s.validate();
  std::vector<std::string> out = s.forms;
  std::size_t i = 0;
  while (i < s.forms.size()) {
    const LangTag tag = s.tags[i];
    if (tag != LangTag::hi && tag != LangTag::en) {
      ++i;
      continue;
    }
    std::size_t j = i;
    Lattice run;
    while (j < s.forms.size() && s.tags[j] == tag) {
      run.add(s.forms[j], tag, top(s.candidates[j], opts.top_k));
      ++j;
    }
    Decoded d = viterbi_decode(run, tag == LangTag::hi ? lm_hi : lm_en);
    for (std::size_t k = i; k < j; ++k) out[k] = d.words[k - i];
    i = j;
  }
  return out;
}

ThreeStepResult three_step_decode(const CsSentence& s, const embed::BilingualLexicon& lex, const TrigramLM& lm_en,
                                  const TrigramLM& lm_hi, const DecodeOptions& opts) {
  s.validate();
  const std::size_t n = s.forms.size();
  ThreeStepResult r;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cands = s.candidates[i];
    switch (s.tags[i]) {
      case LangTag::en:
        r.english_lattice.add(s.forms[i], s.tags[i], top(cands, opts.top_k));
        break;
      case LangTag::hi: {
        const std::string& best = cands.empty() ? s.forms[i] : cands[0];
        r.english_lattice.add(s.forms[i], s.tags[i], top(lex.english(best), opts.max_equivalents));
        break;
      }
      default:
        r.english_lattice.add(s.forms[i], s.tags[i], {});
    }
  }
  r.english = viterbi_decode(r.english_lattice, lm_en);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& cands = s.candidates[i];
    switch (s.tags[i]) {
      case LangTag::hi:
        r.hindi_lattice.add(s.forms[i], s.tags[i], top(cands, opts.top_k));
        break;
      case LangTag::en:
        r.hindi_lattice.add(s.forms[i], s.tags[i], top(lex.hindi(r.english.words[i]), opts.max_equivalents));
        break;
      default:
        r.hindi_lattice.add(s.forms[i], s.tags[i], {});
    }
  }
  r.hindi = viterbi_decode(r.hindi_lattice, lm_hi);

  r.words.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (s.tags[i] == LangTag::hi) {
      r.words[i] = r.hindi.words[i];
    } else if (s.tags[i] == LangTag::en) {
      r.words[i] = r.english.words[i];
    } else {
      r.words[i] = s.forms[i];
    }
  }
  return r;
}

nlohmann::json to_json(const ThreeStepResult& r) {
  return {{"english_lattice", to_json(r.english_lattice)},
          {"english", to_json(r.english)},
          {"hindi_lattice", to_json(r.hindi_lattice)},
          {"hindi", to_json(r.hindi)},
          {"words", r.words}};
}

}  // namespace cspipe::decode
