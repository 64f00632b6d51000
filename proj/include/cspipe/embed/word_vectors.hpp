#pragma once

#include <optional>

#include "cspipe/embed/space.hpp"
#include "cspipe/treebank/sentence.hpp"

namespace cspipe::embed {

// Read-only view over the two monolingual spaces used to look up token
// vectors. In crosslingual mode Hindi vectors are mapped into the English
// space with `hi_to_en`; otherwise they are used raw. Both spaces must share
// one dimensionality.
struct WordVectors {
  const EmbeddingSpace* en = nullptr;
  const EmbeddingSpace* hi = nullptr;
  const Mat* hi_to_en = nullptr;
  bool crosslingual = true;

  // Throws ArgumentError when no space is set or the dims disagree.
  int dim() const;
  // Vector for `word` read as Hindi (`hindi` true) or English; nullopt when
  // the word is out of vocabulary.
  std::optional<Vec> lookup(std::string_view word, bool hindi) const;
  // Tokens tagged hi read the Hindi space, all others the English one; an
  // untagged token tries English first. The token's surface is used.
  std::optional<Vec> lookup(const Token& t) const;
};

}  // namespace cspipe::embed
