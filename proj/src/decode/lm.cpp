#include "cspipe/decode/lm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "cspipe/error.hpp"
#include "cspipe/util/io.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::decode {

namespace {

constexpr int kMaxVocab = 1 << 21;
constexpr double kLog10Zero = -99.0;  // ARPA convention for probability 0

double discount(const Discounts& d, long c) {
  if (c <= 0) return 0.0;
  return d[std::min<long>(c, 3) - 1];
}

// Counts-of-counts estimate D_k = k - (k+1) Y t_{k+1} / t_k, Y = t1 / (t1 + 2 t2).
// Returns false when the estimate is undefined or outside [0, k].
bool estimate_discounts(const std::array<long, 4>& t, Discounts& out) {
  if (t[0] == 0 || t[1] == 0 || t[2] == 0) return false;
  const double y = static_cast<double>(t[0]) / (t[0] + 2.0 * t[1]);
  for (int k = 1; k <= 3; ++k) {
    double d = k - (k + 1) * y * static_cast<double>(t[k]) / static_cast<double>(t[k - 1]);
    if (!(d >= 0.0 && d <= k)) return false;
    out[k - 1] = d;
  }
  return true;
}

template <class Counts>
std::array<long, 4> counts_of_counts(const Counts& counts) {
  std::array<long, 4> t{};
  for (const auto& [k, c] : counts) {
    if (c >= 1 && c <= 4) ++t[c - 1];
  }
  return t;
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

int TrigramLM::intern(const std::string& w) {
  auto [it, inserted] = ids_.emplace(w, static_cast<int>(words_.size()));
  if (inserted) {
    if (words_.size() >= static_cast<std::size_t>(kMaxVocab)) throw DataError("vocabulary too large");
    words_.push_back(w);
    unigrams_.push_back({kLog10Zero, 0.0});
  }
  return it->second;
}

int TrigramLM::id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnk : it->second;
}

TrigramLM TrigramLM::train(const std::vector<std::vector<std::string>>& corpus, const LmTrainOptions& opts) {
  TrigramLM lm;
  lm.intern("<unk>");
  lm.intern("<s>");
  lm.intern("</s>");

  using Tri = std::tuple<int, int, int>;
  using Bi = std::pair<int, int>;
  std::map<Tri, long> c3;
  std::map<Bi, long> bos_bigrams;
  bool any = false;
  for (const auto& sent : corpus) {
    if (sent.empty()) continue;
    any = true;
    std::vector<int> ids = {kBos};
    for (const auto& w : sent) ids.push_back(w == "<s>" || w == "</s>" ? kUnk : lm.intern(w));
    ids.push_back(kEos);
    ++bos_bigrams[{ids[0], ids[1]}];
    for (std::size_t i = 2; i < ids.size(); ++i) ++c3[{ids[i - 2], ids[i - 1], ids[i]}];
  }
  if (!any) throw ArgumentError("cannot train a language model on an empty corpus");
  const int vocab = static_cast<int>(lm.words_.size());

  // Adjusted counts: continuation counts below the top order, raw counts for
  // n-grams that start with <s>.
  std::map<Bi, long> a2 = bos_bigrams;
  for (const auto& [tri, c] : c3) {
    auto [u, v, w] = tri;
    if (v != kBos) ++a2[{v, w}];
  }
  std::vector<long> a1(vocab, 0);
  for (const auto& [bi, c] : a2) ++a1[bi.second];

  std::map<int, long> a1_map;
  for (int w = 0; w < vocab; ++w) {
    if (a1[w] > 0) a1_map[w] = a1[w];
  }
  lm.discounts_.assign(3, opts.fallback);
  lm.fallback_.assign(3, true);
  auto set_discounts = [&](int order, const std::array<long, 4>& t) {
    Discounts d;
    if (estimate_discounts(t, d)) {
      lm.discounts_[order] = d;
      lm.fallback_[order] = false;
    }
  };
  set_discounts(0, counts_of_counts(a1_map));
  set_discounts(1, counts_of_counts(a2));
  set_discounts(2, counts_of_counts(c3));
  const Discounts& d1 = lm.discounts_[0];
  const Discounts& d2 = lm.discounts_[1];
  const Discounts& d3 = lm.discounts_[2];

  // Unigrams, interpolated with the uniform distribution over every word
  // except <s>.
  double total1 = 0, mass1 = 0;
  for (const auto& [w, c] : a1_map) {
    total1 += c;
    mass1 += discount(d1, c);
  }
  const double gamma0 = mass1 / total1;
  const double uniform = 1.0 / (vocab - 1);
  std::vector<double> p1(vocab, 0.0);
  for (int w = 0; w < vocab; ++w) {
    if (w == kBos) continue;
    p1[w] = (a1[w] - discount(d1, a1[w])) / total1 + gamma0 * uniform;
    lm.unigrams_[w].log10_p = std::log10(p1[w]);
  }

  // Bigrams.
  std::map<int, std::pair<double, double>> ctx2;  // v -> (total, discounted mass)
  for (const auto& [bi, c] : a2) {
    auto& [tot, mass] = ctx2[bi.first];
    tot += c;
    mass += discount(d2, c);
  }
  std::vector<double> gamma1(vocab, 1.0);
  for (const auto& [v, tm] : ctx2) {
    gamma1[v] = tm.second / tm.first;
    lm.unigrams_[v].log10_bo = std::log10(gamma1[v]);
  }
  std::map<Bi, double> p2;
  for (const auto& [bi, c] : a2) {
    const auto& tm = ctx2[bi.first];
    double p = (c - discount(d2, c)) / tm.first + gamma1[bi.first] * p1[bi.second];
    p2[bi] = p;
    lm.bigrams_[key(bi.first, bi.second)] = {std::log10(p), 0.0};
  }

  // Trigrams.
  std::map<Bi, std::pair<double, double>> ctx3;
  for (const auto& [tri, c] : c3) {
    auto& [tot, mass] = ctx3[{std::get<0>(tri), std::get<1>(tri)}];
    tot += c;
    mass += discount(d3, c);
  }
  for (const auto& [uv, tm] : ctx3) {
    lm.bigrams_[key(uv.first, uv.second)].log10_bo = std::log10(tm.second / tm.first);
  }
  for (const auto& [tri, c] : c3) {
    auto [u, v, w] = tri;
    const auto& tm = ctx3[{u, v}];
    double lower = p2.count({v, w}) ? p2[{v, w}] : gamma1[v] * p1[w];
    double p = (c - discount(d3, c)) / tm.first + (tm.second / tm.first) * lower;
    lm.trigrams_[key(u, v, w)] = {std::log10(p), 0.0};
  }
  return lm;
}

double TrigramLM::log10_prob(int u, int v, int w) const {
  if (v == kNone) return unigrams_[w].log10_p;
  double bo = 0.0;
  if (u != kNone) {
    if (auto it = trigrams_.find(key(u, v, w)); it != trigrams_.end()) return it->second.log10_p;
    if (auto it = bigrams_.find(key(u, v)); it != bigrams_.end()) bo = it->second.log10_bo;
  }
  if (auto it = bigrams_.find(key(v, w)); it != bigrams_.end()) return bo + it->second.log10_p;
  return bo + unigrams_[v].log10_bo + unigrams_[w].log10_p;
}

double TrigramLM::log_prob(int u, int v, int w) const { return log10_prob(u, v, w) * std::numbers::ln10; }

double TrigramLM::score(const std::vector<std::string>& words, bool eos) const {
  int u = kNone, v = kBos;
  double total = 0.0;
  auto step = [&](int w) {
    total += log_prob(u, v, w);
    u = v;
    v = w;
  };
  for (const auto& w : words) step(id(w));
  if (eos) step(kEos);
  return total;
}

double TrigramLM::perplexity(const std::vector<std::vector<std::string>>& sentences) const {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& s : sentences) {
    total += score(s);
    n += s.size() + 1;
  }
  if (n == 0) throw ArgumentError("perplexity over no tokens");
  return std::exp(-total / static_cast<double>(n));
}

std::string TrigramLM::to_arpa() const {
  std::vector<std::pair<std::vector<int>, Entry>> bi, tri;
  for (const auto& [k, e] : bigrams_) bi.push_back({{int(k >> 21), int(k & (kMaxVocab - 1))}, e});
  for (const auto& [k, e] : trigrams_) {
    tri.push_back({{int(k >> 42), int((k >> 21) & (kMaxVocab - 1)), int(k & (kMaxVocab - 1))}, e});
  }
  std::sort(bi.begin(), bi.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::sort(tri.begin(), tri.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::string out = "\n\\data\\\n";
  out += "ngram 1=" + std::to_string(words_.size()) + "\n";
  if (order_ >= 2) out += "ngram 2=" + std::to_string(bi.size()) + "\n";
  if (order_ >= 3) out += "ngram 3=" + std::to_string(tri.size()) + "\n";
  auto line = [&](const Entry& e, const std::vector<int>& ids, bool with_bo) {
    out += io::format_double(e.log10_p);
    for (int id : ids) out += "\t" + words_[id];
    if (with_bo && e.log10_bo != 0.0) out += "\t" + io::format_double(e.log10_bo);
    out += "\n";
  };
  out += "\n\\1-grams:\n";
  for (int w = 0; w < static_cast<int>(words_.size()); ++w) line(unigrams_[w], {w}, order_ > 1);
  if (order_ >= 2) {
    out += "\n\\2-grams:\n";
    for (const auto& [ids, e] : bi) line(e, ids, order_ > 2);
  }
  if (order_ >= 3) {
    out += "\n\\3-grams:\n";
    for (const auto& [ids, e] : tri) line(e, ids, false);
  }
  out += "\n\\end\\\n";
  return out;
}

TrigramLM TrigramLM::from_arpa(std::string_view text) {
  TrigramLM lm;
  lm.intern("<unk>");
  lm.intern("<s>");
  lm.intern("</s>");
  lm.order_ = 0;
  bool seen_unk = false;
  int section = -1;  // -1 before \data\, 0 inside \data\, n inside \n-grams:
  std::vector<long> declared(4, 0), found(4, 0);
  std::size_t lineno = 0, start = 0;
  bool ended = false;
  while (start < text.size() && !ended) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text::trim(text.substr(start, end - start));
    start = end + 1;
    ++lineno;
    if (line.empty()) continue;
    if (line == "\\data\\") {
      section = 0;
      continue;
    }
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (line.front() == '\\') {
      if (line.size() != 9 || line.substr(2) != "-grams:" || line[1] < '1' || line[1] > '9') {
        throw ParseError(lineno, "unexpected section '" + std::string(line) + "'");
      }
      section = line[1] - '0';
      if (section > 3) throw ParseError(lineno, "orders above 3 are not supported");
      lm.order_ = std::max(lm.order_, section);
      continue;
    }
    if (section == -1) continue;  // free text before \data\ is allowed
    if (section == 0) {
      if (!text::starts_with(line, "ngram ")) throw ParseError(lineno, "expected 'ngram N=count'");
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(lineno, "expected 'ngram N=count'");
      int n = static_cast<int>(parse_double(text::trim(line.substr(6, eq - 6)), lineno));
      if (n < 1 || n > 3) throw ParseError(lineno, "orders above 3 are not supported");
      declared[n] = static_cast<long>(parse_double(text::trim(line.substr(eq + 1)), lineno));
      continue;
    }
    auto fields = text::split_ws(line);
    const int n = section;
    if (fields.size() != static_cast<std::size_t>(n + 1) && fields.size() != static_cast<std::size_t>(n + 2)) {
      throw ParseError(lineno, "expected " + std::to_string(n + 1) + " or " + std::to_string(n + 2) + " fields");
    }
    Entry e{parse_double(fields[0], lineno), fields.size() == static_cast<std::size_t>(n + 2)
                                                  ? parse_double(fields.back(), lineno)
                                                  : 0.0};
    std::vector<int> ids;
    for (int k = 1; k <= n; ++k) {
      if (n == 1) {
        ids.push_back(lm.intern(fields[k]));
      } else {
        int id = lm.id(fields[k]);
        if (id == kUnk && fields[k] != "<unk>") throw ParseError(lineno, "'" + fields[k] + "' is not a unigram");
        ids.push_back(id);
      }
    }
    ++found[n];
    if (n == 1) {
      lm.unigrams_[ids[0]] = e;
      if (ids[0] == kUnk) seen_unk = true;
    } else if (n == 2) {
      lm.bigrams_[key(ids[0], ids[1])] = e;
    } else {
      lm.trigrams_[key(ids[0], ids[1], ids[2])] = e;
    }
  }
  if (!ended) throw DataError("ARPA text has no \\end\\ marker");
  if (lm.order_ == 0) throw DataError("ARPA text has no n-gram sections");
  for (int n = 1; n <= 3; ++n) {
    if (declared[n] != found[n]) {
      throw DataError("ARPA header declares " + std::to_string(declared[n]) + " " + std::to_string(n) +
                      "-grams, found " + std::to_string(found[n]));
    }
  }
  if (!seen_unk) lm.unigrams_[kUnk].log10_p = kLog10Zero;
  return lm;
}

TrigramLM TrigramLM::load_arpa(const std::string& path) { return from_arpa(io::read_text(path)); }

void TrigramLM::save_arpa(const std::string& path) const { io::write_text(path, to_arpa()); }

}  // namespace cspipe::decode
