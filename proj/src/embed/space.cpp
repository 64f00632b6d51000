#include "cspipe/embed/space.hpp"

#include <charconv>
#include <cmath>

#include "cspipe/error.hpp"
#include "cspipe/util/io.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::embed {

EmbeddingSpace::EmbeddingSpace(int dim) : dim_(dim), matrix_(Mat::Zero(dim, 1)) {
  if (dim <= 0) throw ArgumentError("embedding dim must be positive");
}

bool EmbeddingSpace::add(const std::string& word, const Vec& v) {
  if (v.size() != dim_) {
    throw ArgumentError("vector for '" + word + "' has " + std::to_string(v.size()) + " entries, expected " +
                        std::to_string(dim_));
  }
  if (!v.allFinite()) throw ArgumentError("vector for '" + word + "' is not finite");
  if (exact_.count(word)) return false;
  const int col = static_cast<int>(words_.size()) + 1;
  words_.push_back(word);
  exact_.emplace(word, col);
  folded_.emplace(text::lower(word), col);
  matrix_.conservativeResize(Eigen::NoChange, col + 1);
  matrix_.col(col) = v;
  return true;
}

int EmbeddingSpace::index(std::string_view word) const {
  if (auto it = exact_.find(std::string(word)); it != exact_.end()) return it->second;
  if (auto it = folded_.find(text::lower(word)); it != folded_.end()) return it->second;
  return kUnk;
}

Vec EmbeddingSpace::lookup(std::string_view word, const Mat* projection) const {
  Vec v = matrix_.col(index(word));
  if (projection) {
    if (projection->cols() != dim_) throw ArgumentError("projection does not match embedding dim");
    return *projection * v;
  }
  return v;
}

namespace {

bool parse_number(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool is_header(const std::vector<std::string>& fields) {
  if (fields.size() != 2) return false;
  for (const auto& f : fields) {
    if (f.empty() || f.find_first_not_of("0123456789") != std::string::npos) return false;
  }
  return true;
}

}  // namespace

LoadResult parse_embeddings(std::string_view text) {
  LoadResult out;
  int dim = 0;
  std::size_t lineno = 0, start = 0;
  bool first = true;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text::trim(text.substr(start, end - start));
    start = end + 1;
    ++lineno;
    if (line.empty()) continue;
    auto fields = text::split_ws(line);
    if (first) {
      first = false;
      if (is_header(fields)) {
        dim = std::stoi(fields[1]);
        if (dim <= 0) throw ParseError(lineno, "header declares dim 0");
        continue;
      }
    }
    const int len = static_cast<int>(fields.size()) - 1;
    if (len <= 0) throw ParseError(lineno, "row has no vector");
    if (dim == 0) dim = len;
    if (len != dim) {
      throw ParseError(lineno, "row for '" + fields[0] + "' has " + std::to_string(len) + " values, expected " +
                                   std::to_string(dim));
    }
    if (out.space.dim() == 0) out.space = EmbeddingSpace(dim);
    Vec v(dim);
    for (int k = 0; k < dim; ++k) {
      if (!parse_number(fields[k + 1], v(k)) || !std::isfinite(v(k))) {
        throw ParseError(lineno, "bad value '" + fields[k + 1] + "'");
      }
    }
    if (!out.space.add(fields[0], v)) {
      out.warnings.push_back("line " + std::to_string(lineno) + ": duplicate word '" + fields[0] +
                             "' ignored (first occurrence kept)");
    }
  }
  if (out.space.dim() == 0) {
    if (dim == 0) throw DataError("embedding file has no vectors");
    out.space = EmbeddingSpace(dim);
  }
  return out;
}

LoadResult load_embeddings(const std::string& path) { return parse_embeddings(io::read_text(path)); }

std::string format_embeddings(const EmbeddingSpace& space) {
  std::string out = std::to_string(space.size()) + " " + std::to_string(space.dim()) + "\n";
  for (std::size_t i = 0; i < space.size(); ++i) {
    out += space.words()[i];
    const auto col = space.matrix().col(static_cast<Eigen::Index>(i) + 1);
    for (Eigen::Index k = 0; k < col.size(); ++k) {
      out += ' ';
      out += io::format_double(col(k));
    }
    out += '\n';
  }
  return out;
}

void save_embeddings(const std::string& path, const EmbeddingSpace& space) {
  io::write_text(path, format_embeddings(space));
}

}  // namespace cspipe::embed
