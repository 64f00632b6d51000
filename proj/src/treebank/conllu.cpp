#include "cspipe/treebank/conllu.hpp"

#include <charconv>
#include <sstream>

#include "cspipe/error.hpp"
#include "cspipe/util/io.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::conllu {

namespace {

std::string field(std::string_view s) {
  return s == "_" ? std::string() : std::string(s);
}

const std::string& or_blank(const std::string& s) {
  static const std::string blank = "_";
  return s.empty() ? blank : s;
}

int parse_int(std::string_view s, std::size_t line, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

Token parse_token_line(std::string_view line, std::size_t lineno) {
  auto cols = text::split(line, '\t');
  if (cols.size() != 10) {
    throw ParseError(lineno, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
  }
  if (cols[0].find('-') != std::string::npos) throw ParseError(lineno, "multiword token ranges are not supported");
  if (cols[0].find('.') != std::string::npos) throw ParseError(lineno, "empty nodes are not supported");

  Token t;
  t.index = parse_int(cols[0], lineno, "token id");
  t.form = cols[1];
  t.lemma = field(cols[2]);
  t.upos = field(cols[3]);
  t.xpos = field(cols[4]);
  t.feats = field(cols[5]);
  if (cols[6] != "_") t.head = parse_int(cols[6], lineno, "head");
  t.deprel = field(cols[7]);
  t.deps = field(cols[8]);
  if (cols[9] != "_") {
    for (auto& item : text::split(cols[9], '|')) {
      if (text::starts_with(item, "lang=")) {
        try {
          t.lang = parse_lang_tag(std::string_view(item).substr(5));
        } catch (const DataError& e) {
          throw ParseError(lineno, e.what());
        }
      } else if (text::starts_with(item, "norm=")) {
        t.norm = item.substr(5);
      } else {
        t.misc.push_back(std::move(item));
      }
    }
  }
  if (t.index < 1) throw ParseError(lineno, "token id must be >= 1");
  if (t.head && *t.head < 0) throw ParseError(lineno, "head must be >= 0");
  return t;
}

}  // namespace

std::vector<Sentence> parse(std::string_view text) {
  std::vector<Sentence> out;
  Sentence current;
  bool open = false;
  std::size_t lineno = 0;
  std::size_t start = 0;

  auto flush = [&] {
    if (open) out.push_back(std::move(current));
    current = Sentence{};
    open = false;
  };

  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      flush();
      continue;
    }
    open = true;
    if (line.front() == '#') {
      std::string_view body = text::trim(line.substr(1));
      auto eq = body.find(" = ");
      if (eq == std::string_view::npos) {
        current.meta.emplace_back(std::string(body), std::string());
      } else {
        current.meta.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 3)));
      }
      continue;
    }
    Token t = parse_token_line(line, lineno);
    if (t.index != static_cast<int>(current.tokens.size()) + 1) {
      throw ParseError(lineno, "token ids must be contiguous from 1");
    }
    current.tokens.push_back(std::move(t));
  }
  flush();
  return out;
}

std::string write(const std::vector<Sentence>& sentences) {
  std::ostringstream os;
  for (const auto& s : sentences) {
    for (const auto& [k, v] : s.meta) {
      os << "# " << k;
      if (!v.empty()) os << " = " << v;
      os << '\n';
    }
    for (const auto& t : s.tokens) {
      std::vector<std::string> misc;
      if (t.lang) misc.emplace_back("lang=" + std::string(to_string(*t.lang)));
      if (t.norm) misc.emplace_back("norm=" + *t.norm);
      misc.insert(misc.end(), t.misc.begin(), t.misc.end());

      os << t.index << '\t' << t.form << '\t' << or_blank(t.lemma) << '\t' << or_blank(t.upos) << '\t'
         << or_blank(t.xpos) << '\t' << or_blank(t.feats) << '\t';
      if (t.head) {
        os << *t.head;
      } else {
        os << '_';
      }
      os << '\t' << or_blank(t.deprel) << '\t' << or_blank(t.deps) << '\t'
         << (misc.empty() ? std::string("_") : text::join(misc, "|")) << '\n';
    }
    os << '\n';
  }
  return os.str();
}

std::vector<Sentence> read_file(const std::string& path) { return parse(io::read_text(path)); }

void write_file(const std::string& path, const std::vector<Sentence>& sentences) {
  io::write_text(path, write(sentences));
}

}  // namespace cspipe::conllu
