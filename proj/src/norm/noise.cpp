#include "cspipe/norm/noise.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "cspipe/error.hpp"
#include "cspipe/util/io.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::norm {

NoiseRuleSet NoiseRuleSet::defaults() {
  NoiseRuleSet r;
  r.substitutions = {{"s", "z"},  {"c", "k"},  {"f", "ph"}, {"i", "ee"}, {"u", "oo"}, {"v", "w"},
                     {"ck", "k"}, {"th", "t"}, {"x", "ks"}, {"q", "k"},  {"y", "i"},  {"ou", "u"}};
  return r;
}

NoiseRuleSet NoiseRuleSet::from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != 1) {
      throw DataError("unsupported noise rule schema_version " + j.at("schema_version").dump());
    }
    NoiseRuleSet r;
    r.vowels = j.at("vowels").get<std::string>();
    r.substitutions.clear();
    for (const auto& p : j.at("substitutions")) {
      if (!p.is_array() || p.size() != 2) throw DataError("substitution entries must be [from, to] pairs");
      r.substitutions.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
    r.collapse_doubles = j.value("collapse_doubles", true);
    r.max_applications = j.value("max_applications", 2);
    if (r.max_applications < 1) throw DataError("max_applications must be at least 1");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad noise rules: ") + e.what());
  }
}

nlohmann::json NoiseRuleSet::to_json() const {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& [a, b] : substitutions) subs.push_back({a, b});
  return {{"schema_version", 1},
          {"vowels", vowels},
          {"substitutions", subs},
          {"collapse_doubles", collapse_doubles},
          {"max_applications", max_applications}};
}

NoiseRuleSet load_noise_rules(const std::string& path) {
  std::string text = io::read_text(path);
  try {
    return NoiseRuleSet::from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<std::string> one_step_variants(const std::string& word, const NoiseRuleSet& rules) {
  std::vector<std::string> out;
  auto push = [&](std::string v) {
    if (v != word && !v.empty() && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
  };
  if (word.size() > 1) {
    std::string elided(1, word[0]);
    for (std::size_t i = 1; i < word.size(); ++i) {
      if (rules.vowels.find(word[i]) == std::string::npos) elided += word[i];
    }
    push(elided);
  }
  for (const auto& [a, b] : rules.substitutions) {
    for (const auto& [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
      if (from.empty()) continue;
      for (std::size_t pos = word.find(from); pos != std::string::npos; pos = word.find(from, pos + 1)) {
        push(word.substr(0, pos) + to + word.substr(pos + from.size()));
      }
    }
  }
  if (rules.collapse_doubles) {
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      if (word[i] == word[i + 1]) push(word.substr(0, i) + word.substr(i + 1));
    }
  }
  return out;
}

std::vector<std::string> noisy_variants(const std::string& word, const NoiseRuleSet& rules) {
  std::vector<std::string> out;
  std::set<std::string> seen{word};
  std::vector<std::string> frontier{word};
  for (int step = 0; step < rules.max_applications; ++step) {
    std::vector<std::string> next;
    for (const auto& w : frontier) {
      for (auto& v : one_step_variants(w, rules)) {
        if (seen.insert(v).second) {
          out.push_back(v);
          next.push_back(std::move(v));
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

std::vector<NoisyPair> gen_synthetic_pairs(const std::vector<std::string>& vocab, const NoiseRuleSet& rules,
                                           std::uint64_t seed, int per_word) {
  std::mt19937_64 rng(seed);
  std::vector<NoisyPair> out;
  for (const auto& raw : vocab) {
    std::string w = text::lower(raw);
    if (w.empty() || !std::all_of(w.begin(), w.end(), [](unsigned char c) { return c >= 'a' && c <= 'z'; })) {
      continue;
    }
    std::vector<std::string> variants = noisy_variants(w, rules);
    if (variants.empty()) {
      out.push_back({w, w});
      continue;
    }
    std::shuffle(variants.begin(), variants.end(), rng);
    const std::size_t k = std::min<std::size_t>(variants.size(), static_cast<std::size_t>(std::max(per_word, 1)));
    for (std::size_t i = 0; i < k; ++i) out.push_back({variants[i], w});
  }
  return out;
}

std::vector<NoisyPair> parse_pairs(const std::string& text) {
  std::vector<NoisyPair> out;
  std::size_t line_no = 0;
  for (const auto& line : text::split(text, '\n')) {
    ++line_no;
    std::string_view l = text::trim(line);
    if (l.empty() || l[0] == '#') continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 2 || text::trim(cols[0]).empty() || text::trim(cols[1]).empty()) {
      throw ParseError(line_no, "expected \"noisy<TAB>clean\"");
    }
    out.push_back({std::string(text::trim(cols[0])), std::string(text::trim(cols[1]))});
  }
  return out;
}

std::vector<NoisyPair> read_pairs(const std::string& path) {
  try {
    return parse_pairs(io::read_text(path));
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string format_pairs(const std::vector<NoisyPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) out += p.noisy + "\t" + p.clean + "\n";
  return out;
}

}  // namespace cspipe::norm
