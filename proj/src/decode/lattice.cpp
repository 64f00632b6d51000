#include "cspipe/decode/lattice.hpp"

#include <algorithm>
#include <limits>

#include "cspipe/error.hpp"

namespace cspipe::decode {

void Lattice::add(std::string original, std::optional<LangTag> tag, const std::vector<std::string>& words,
                  const std::vector<double>& scores) {
  LatticePosition p{std::move(original), tag, {}};
  auto present = [&p](const std::string& w) {
    return std::any_of(p.candidates.begin(), p.candidates.end(), [&](const Candidate& c) { return c.word == w; });
  };
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!present(words[i])) p.candidates.push_back({words[i], i < scores.size() ? scores[i] : 0.0});
  }
  if (!present(p.original)) p.candidates.push_back({p.original, 0.0});
  positions.push_back(std::move(p));
}

void Lattice::validate() const {
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i].candidates.empty()) throw ArgumentError("lattice position " + std::to_string(i) + " is empty");
  }
}

Decoded viterbi_decode(const Lattice& lattice, const TrigramLM& lm) {
  lattice.validate();
  Decoded out;
  const std::size_t n = lattice.size();
  if (n == 0) {
    out.score = lm.log_prob(TrigramLM::kNone, TrigramLM::kBos, TrigramLM::kEos);
    return out;
  }
  std::vector<std::vector<int>> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& c : lattice.positions[i].candidates) ids[i].push_back(lm.id(c.word));
  }
  constexpr double kNeg = -std::numeric_limits<double>::infinity();
  // score[i][a][b]: best prefix ending with candidate a at i-1 and b at i.
  // Position -1 is <s> with a single pseudo-candidate.
  auto width = [&](long i) { return i < 0 ? std::size_t(1) : ids[i].size(); };
  auto word_id = [&](long i, std::size_t j) { return i < 0 ? TrigramLM::kBos : ids[i][j]; };
  std::vector<std::vector<std::vector<double>>> score(n);
  std::vector<std::vector<std::vector<int>>> back(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t wa = width(long(i) - 1), wb = width(long(i));
    score[i].assign(wa, std::vector<double>(wb, kNeg));
    back[i].assign(wa, std::vector<int>(wb, -1));
    for (std::size_t a = 0; a < wa; ++a) {
      for (std::size_t b = 0; b < wb; ++b) {
        if (i == 0) {
          score[0][a][b] = lm.log_prob(TrigramLM::kNone, TrigramLM::kBos, ids[0][b]);
          continue;
        }
        const int va = word_id(long(i) - 1, a), vb = ids[i][b];
        for (std::size_t z = 0; z < width(long(i) - 2); ++z) {
          double prev = score[i - 1][z][a];
          if (prev == kNeg) continue;
          double s = prev + lm.log_prob(word_id(long(i) - 2, z), va, vb);
          if (s > score[i][a][b]) {  // strict: the smallest z wins ties
            score[i][a][b] = s;
            back[i][a][b] = static_cast<int>(z);
          }
        }
      }
    }
  }
  // Final state: maximise with </s>; ties go to the smallest last index, then
  // the smallest second-to-last.
  double best = kNeg;
  std::size_t best_a = 0, best_b = 0;
  const std::size_t wb = width(long(n) - 1);
  for (std::size_t b = 0; b < wb; ++b) {
    for (std::size_t a = 0; a < width(long(n) - 2); ++a) {
      double s = score[n - 1][a][b] + lm.log_prob(word_id(long(n) - 2, a), ids[n - 1][b], TrigramLM::kEos);
      if (s > best) {
        best = s;
        best_a = a;
        best_b = b;
      }
    }
  }
  out.score = best;
  out.choice.assign(n, 0);
  out.choice[n - 1] = static_cast<int>(best_b);
  std::size_t a = best_a, b = best_b;
  for (std::size_t i = n - 1; i > 0; --i) {
    out.choice[i - 1] = static_cast<int>(a);
    std::size_t z = static_cast<std::size_t>(back[i][a][b]);
    b = a;
    a = z;
  }
  for (std::size_t i = 0; i < n; ++i) out.words.push_back(lattice.positions[i].candidates[out.choice[i]].word);
  return out;
}

nlohmann::json to_json(const Lattice& lattice) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : lattice.positions) {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : p.candidates) cands.push_back({{"word", c.word}, {"score", c.score}});
    j.push_back({{"original", p.original},
                 {"tag", p.tag ? nlohmann::json(std::string(to_string(*p.tag))) : nlohmann::json()},
                 {"candidates", cands}});
  }
  return j;
}

nlohmann::json to_json(const Decoded& d) { return {{"choice", d.choice}, {"words", d.words}, {"score", d.score}}; }

}  // namespace cspipe::decode
