#include "cspipe/nn/chars.hpp"

#include "cspipe/error.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::nn {

CharVocab::CharVocab(std::vector<std::string> reserved, const std::vector<std::string>& words) {
  if (reserved.empty()) throw ArgumentError("character vocabulary needs an unknown symbol");
  for (auto& r : reserved) {
    if (!ids_.emplace(r, static_cast<int>(symbols_.size())).second) {
      throw ArgumentError("duplicate reserved symbol '" + r + "'");
    }
    symbols_.push_back(std::move(r));
  }
  for (const auto& w : words) {
    for (auto& ch : text::utf8_chars(w)) {
      if (ids_.emplace(ch, static_cast<int>(symbols_.size())).second) symbols_.push_back(std::move(ch));
    }
  }
}

int CharVocab::id(std::string_view ch) const {
  auto it = ids_.find(std::string(ch));
  return it == ids_.end() ? 0 : it->second;
}

std::vector<int> CharVocab::encode(std::string_view word, int* unknown) const {
  std::vector<int> out;
  for (const auto& ch : text::utf8_chars(word)) {
    int i = id(ch);
    if (i == 0 && unknown) ++*unknown;
    out.push_back(i);
  }
  return out;
}

nlohmann::json CharVocab::to_json() const { return symbols_; }

CharVocab CharVocab::from_json(const nlohmann::json& j) {
  CharVocab v;
  for (const auto& s : j) {
    auto sym = s.get<std::string>();
    if (!v.ids_.emplace(sym, static_cast<int>(v.symbols_.size())).second) {
      throw DataError("duplicate character '" + sym + "' in vocabulary");
    }
    v.symbols_.push_back(std::move(sym));
  }
  if (v.symbols_.empty()) throw DataError("empty character vocabulary");
  return v;
}

CharEncoder::CharEncoder(ParameterSet& ps, const std::string& name, CharVocab vocab, int char_dim, int hidden,
                         Rng& rng)
    : vocab_(std::move(vocab)),
      emb_(ps, name + ".emb", vocab_.size(), char_dim, 0.1, rng),
      lstm_(ps, name + ".lstm", {char_dim}, hidden, rng) {}

Expr CharEncoder::encode(Graph& g, std::string_view word) const {
  std::vector<int> ids = vocab_.encode(word);
  if (ids.empty()) ids.push_back(0);
  std::vector<std::vector<Expr>> inputs;
  inputs.reserve(ids.size());
  for (int id : ids) inputs.push_back({emb_(g, id)});
  return lstm_.encode_final(g, inputs);
}

}  // namespace cspipe::nn
