#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cspipe {

// Token-level language tags of the Hindi-English code-switching tag set.
enum class LangTag { hi, en, ne, acro, univ };

inline constexpr LangTag kAllLangTags[] = {LangTag::hi, LangTag::en, LangTag::ne, LangTag::acro,
                                           LangTag::univ};
inline constexpr int kNumLangTags = 5;

std::string_view to_string(LangTag tag);

// Throws DataError naming the offending value.
LangTag parse_lang_tag(std::string_view s);

std::optional<LangTag> try_parse_lang_tag(std::string_view s);

struct Token {
  int index = 0;  // 1-based
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  std::string feats;
  std::optional<int> head;  // 0 = ROOT
  std::string deprel;
  std::string deps;
  std::optional<std::string> norm;
  std::optional<LangTag> lang;
  std::vector<std::string> misc;  // MISC items other than lang= and norm=

  // The string downstream models read: the normalization when present.
  const std::string& surface() const { return norm ? *norm : form; }

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  // Comment lines in file order; "# key = value" or "# key" (empty value).
  std::vector<std::pair<std::string, std::string>> meta;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Builds a pre-parse sentence from whitespace-separated tokens.
Sentence make_sentence(const std::vector<std::string>& forms);

// Heads as a 1-based-indexed vector: heads[0] is unused, heads[i] is the head
// of token i (-1 when unset).
std::vector<int> head_vector(const Sentence& s);

}  // namespace cspipe
