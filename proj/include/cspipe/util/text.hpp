#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cspipe::text {

// Splits UTF-8 text into code points, each returned as its own byte string.
// Invalid sequences are passed through one byte at a time.
std::vector<std::string> utf8_chars(std::string_view s);

std::size_t utf8_length(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

// Splits on runs of ASCII whitespace, dropping empty fields.
std::vector<std::string> split_ws(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string_view trim(std::string_view s);

// ASCII-only lowercasing; non-ASCII bytes are left untouched.
std::string lower(std::string_view s);

// Decodes a single UTF-8 code point (as produced by utf8_chars).
char32_t decode_utf8(std::string_view ch);

// True when the text contains a Latin or Devanagari letter.
bool has_alpha(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

}  // namespace cspipe::text
