#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cspipe/treebank/sentence.hpp"

namespace cspipe::conllu {

// Parses CoNLL-U text. The language tag and normalization travel in the MISC
// column as `lang=<tag>` and `norm=<form>`. Multiword-token ranges and empty
// nodes are rejected. Throws ParseError (with line number) or DataError.
std::vector<Sentence> parse(std::string_view text);

// Writes CoNLL-U; every sentence block is followed by a blank line. Unset
// fields become `_`; MISC starts with lang= then norm= then other items.
std::string write(const std::vector<Sentence>& sentences);

std::vector<Sentence> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<Sentence>& sentences);

}  // namespace cspipe::conllu
