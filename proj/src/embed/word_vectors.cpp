#include "cspipe/embed/word_vectors.hpp"

#include "cspipe/error.hpp"

namespace cspipe::embed {

int WordVectors::dim() const {
  if (!en && !hi) throw ArgumentError("no embedding space configured");
  if (en && hi && en->dim() != hi->dim()) {
    throw ArgumentError("embedding dims differ: en " + std::to_string(en->dim()) + ", hi " +
                        std::to_string(hi->dim()));
  }
  return en ? en->dim() : hi->dim();
}

std::optional<Vec> WordVectors::lookup(std::string_view word, bool hindi) const {
  const EmbeddingSpace* space = hindi ? hi : en;
  if (!space) return std::nullopt;
  int i = space->index(word);
  if (i == EmbeddingSpace::kUnk) return std::nullopt;
  if (hindi && crosslingual && hi_to_en) return Vec(*hi_to_en * space->row(i));
  return space->row(i);
}

std::optional<Vec> WordVectors::lookup(const Token& t) const {
  const std::string& w = t.surface();
  if (t.lang) return lookup(w, *t.lang == LangTag::hi);
  if (auto v = lookup(w, false)) return v;
  return lookup(w, true);
}

}  // namespace cspipe::embed
