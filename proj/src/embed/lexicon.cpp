#include "cspipe/embed/lexicon.hpp"

#include <algorithm>

#include "cspipe/error.hpp"
#include "cspipe/util/io.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::embed {

namespace {

const std::vector<std::string>& find_or_empty(const std::map<std::string, std::vector<std::string>>& m,
                                              std::string_view key) {
  static const std::vector<std::string> none;
  auto it = m.find(text::lower(key));
  return it == m.end() ? none : it->second;
}

void push_unique(std::vector<std::string>& v, std::string_view s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.emplace_back(s);
}

}  // namespace

void BilingualLexicon::add(std::string_view hindi, std::string_view english) {
  auto& fwd = forward_[text::lower(hindi)];
  if (std::find(fwd.begin(), fwd.end(), english) != fwd.end()) return;
  fwd.emplace_back(english);
  push_unique(reverse_[text::lower(english)], hindi);
  order_.emplace_back(hindi, english);
  ++entries_;
}

const std::vector<std::string>& BilingualLexicon::english(std::string_view hindi) const {
  return find_or_empty(forward_, hindi);
}

const std::vector<std::string>& BilingualLexicon::hindi(std::string_view english) const {
  return find_or_empty(reverse_, english);
}

std::vector<std::pair<std::string, std::string>> BilingualLexicon::pairs() const { return order_; }

BilingualLexicon parse_lexicon(std::string_view text) {
  BilingualLexicon lex;
  std::size_t lineno = 0, start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 2 || text::trim(cols[0]).empty() || text::trim(cols[1]).empty()) {
      throw ParseError(lineno, "expected hindi<TAB>english");
    }
    lex.add(text::trim(cols[0]), text::trim(cols[1]));
  }
  return lex;
}

BilingualLexicon load_lexicon(const std::string& path) { return parse_lexicon(io::read_text(path)); }

}  // namespace cspipe::embed
