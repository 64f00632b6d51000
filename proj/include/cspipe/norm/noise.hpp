#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace cspipe::norm {

// Hand-written noise rules for Romanized words. One application is one of:
// dropping every non-initial vowel, one substitution at one site (either
// direction of a pair), or collapsing one doubled letter.
struct NoiseRuleSet {
  std::string vowels = "aeiou";
  std::vector<std::pair<std::string, std::string>> substitutions;
  bool collapse_doubles = true;
  int max_applications = 2;

  // The rules shipped in data/noise_rules.json.
  static NoiseRuleSet defaults();
  // Throws DataError on a missing field or a wrong schema_version.
  static NoiseRuleSet from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

NoiseRuleSet load_noise_rules(const std::string& path);

// Forms exactly one application away, in rule order, without duplicates and
// without `word` itself.
std::vector<std::string> one_step_variants(const std::string& word, const NoiseRuleSet& rules);

// Forms reachable in 1..max_applications steps, nearest first, excluding
// `word`.
std::vector<std::string> noisy_variants(const std::string& word, const NoiseRuleSet& rules);

struct NoisyPair {
  std::string noisy;
  std::string clean;
  friend bool operator==(const NoisyPair&, const NoisyPair&) = default;
};

// Up to `per_word` distinct variants per vocabulary word, sampled with a
// seeded generator. A word no rule applies to yields (word, word). Words are
// lowercased; entries with non-letters are skipped.
std::vector<NoisyPair> gen_synthetic_pairs(const std::vector<std::string>& vocab, const NoiseRuleSet& rules,
                                           std::uint64_t seed, int per_word = 2);

// TSV "noisy<TAB>clean"; throws ParseError naming the line.
std::vector<NoisyPair> parse_pairs(const std::string& text);
std::vector<NoisyPair> read_pairs(const std::string& path);
std::string format_pairs(const std::vector<NoisyPair>& pairs);

}  // namespace cspipe::norm
