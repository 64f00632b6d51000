#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cspipe::embed {

// Hindi word -> English translations, with the reverse index. Lookups fold
// ASCII case on the queried side; translation order follows the file.
class BilingualLexicon {
 public:
  void add(std::string_view hindi, std::string_view english);

  const std::vector<std::string>& english(std::string_view hindi) const;
  const std::vector<std::string>& hindi(std::string_view english) const;
  std::size_t size() const { return entries_; }
  bool empty() const { return entries_ == 0; }

  // Every (hindi, english) pair, one per translation.
  std::vector<std::pair<std::string, std::string>> pairs() const;

 private:
  std::map<std::string, std::vector<std::string>> forward_;
  std::map<std::string, std::vector<std::string>> reverse_;
  std::vector<std::pair<std::string, std::string>> order_;
  std::size_t entries_ = 0;
};

// Two-column TSV (hindi<TAB>english); blank lines and '#' comments skipped.
// A line without exactly two non-empty columns throws ParseError.
BilingualLexicon parse_lexicon(std::string_view text);
BilingualLexicon load_lexicon(const std::string& path);

}  // namespace cspipe::embed
