#pragma once

#include <string>

#include "cspipe/embed/lexicon.hpp"
#include "cspipe/embed/space.hpp"

namespace cspipe::embed {

enum class Direction { hi_to_en, en_to_hi };

struct ProjectionResult {
  Mat w;                  // maps source columns into the target space: z ~ W x
  std::size_t anchors = 0;
  double mean_cosine = 0.0;  // over anchors, after preprocessing
};

// Orthogonal Procrustes on length-normalized, mean-centered anchor vectors:
// W = U V^T from the SVD of Z X^T. Throws ArgumentError when fewer than
// src.dim() lexicon pairs are present in both spaces.
ProjectionResult learn_projection(const Mat& x, const Mat& z);
ProjectionResult learn_projection(const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                                  const BilingualLexicon& lex, Direction dir = Direction::hi_to_en);

// Column-wise unit-length then row-mean-centred copy.
Mat normalize_and_center(const Mat& m);

// Model-container file holding the single tensor "w"; load throws DataError
// naming the path for a missing file or a non-square matrix.
void save_projection(const std::string& path, const ProjectionResult& r, Direction dir = Direction::hi_to_en);
Mat load_projection(const std::string& path);

}  // namespace cspipe::embed
