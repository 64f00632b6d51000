#include "cspipe/treebank/sentence.hpp"

#include "cspipe/error.hpp"

namespace cspipe {

std::string_view to_string(LangTag tag) {
  switch (tag) {
    case LangTag::hi: return "hi";
    case LangTag::en: return "en";
    case LangTag::ne: return "ne";
    case LangTag::acro: return "acro";
    case LangTag::univ: return "univ";
  }
  return "?";
}

std::optional<LangTag> try_parse_lang_tag(std::string_view s) {
  for (LangTag t : kAllLangTags) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

LangTag parse_lang_tag(std::string_view s) {
  if (auto t = try_parse_lang_tag(s)) return *t;
  throw DataError("unknown language tag '" + std::string(s) + "'");
}

Sentence make_sentence(const std::vector<std::string>& forms) {
  Sentence s;
  s.tokens.reserve(forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    Token t;
    t.index = static_cast<int>(i + 1);
    t.form = forms[i];
    s.tokens.push_back(std::move(t));
  }
  return s;
}

std::vector<int> head_vector(const Sentence& s) {
  std::vector<int> heads(s.size() + 1, -1);
  for (std::size_t i = 0; i < s.size(); ++i) heads[i + 1] = s.tokens[i].head.value_or(-1);
  return heads;
}

}  // namespace cspipe
