#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace cspipe::embed {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Pretrained word vectors stored column-wise (dim x rows). Column 0 is the
// reserved UNK vector (all zeros); words occupy columns 1..size().
class EmbeddingSpace {
 public:
  static constexpr int kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  EmbeddingSpace() = default;
  explicit EmbeddingSpace(int dim);

  int dim() const { return dim_; }
  // Number of words, excluding UNK.
  std::size_t size() const { return words_.size(); }
  const Mat& matrix() const { return matrix_; }
  const std::vector<std::string>& words() const { return words_; }

  // Returns false (and leaves the space unchanged) for a word already present.
  // Throws ArgumentError on a length mismatch or a non-finite entry.
  bool add(const std::string& word, const Vec& v);

  // Exact match, then ASCII-lowercase match, then kUnk.
  int index(std::string_view word) const;
  bool contains(std::string_view word) const { return index(word) != kUnk; }
  // Column copy for `index(word)`; multiplied by `projection` when given.
  Vec lookup(std::string_view word, const Mat* projection = nullptr) const;
  Vec row(int index) const { return matrix_.col(index); }

 private:
  int dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> exact_;
  std::unordered_map<std::string, int> folded_;  // first word per lowercase form
  Mat matrix_;
};

struct LoadResult {
  EmbeddingSpace space;
  std::vector<std::string> warnings;
};

// word2vec text format: optional "count dim" header, then "word v1 ... vd".
// Duplicate words keep the first vector and add a warning. A row whose length
// differs from the first row throws ParseError with its line number.
LoadResult parse_embeddings(std::string_view text);
LoadResult load_embeddings(const std::string& path);
std::string format_embeddings(const EmbeddingSpace& space);
void save_embeddings(const std::string& path, const EmbeddingSpace& space);

}  // namespace cspipe::embed
