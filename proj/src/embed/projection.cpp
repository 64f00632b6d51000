#include "cspipe/embed/projection.hpp"

#include "cspipe/error.hpp"
#include "cspipe/nn/container.hpp"

namespace cspipe::embed {

Mat normalize_and_center(const Mat& m) {
  Mat out = m;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    double n = out.col(j).norm();
    if (n > 0) out.col(j) /= n;
  }
  Vec mean = out.rowwise().mean();
  out.colwise() -= mean;
  return out;
}

ProjectionResult learn_projection(const Mat& x, const Mat& z) {
  if (x.rows() != z.rows() || x.cols() != z.cols()) throw ArgumentError("anchor matrices differ in shape");
  if (x.cols() < x.rows()) {
    throw ArgumentError("need at least " + std::to_string(x.rows()) + " anchor pairs, found " +
                        std::to_string(x.cols()));
  }
  Mat xn = normalize_and_center(x);
  Mat zn = normalize_and_center(z);
  Eigen::JacobiSVD<Mat> svd(zn * xn.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProjectionResult r;
  r.w = svd.matrixU() * svd.matrixV().transpose();
  r.anchors = static_cast<std::size_t>(x.cols());
  Mat mapped = r.w * xn;
  double total = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double den = mapped.col(j).norm() * zn.col(j).norm();
    total += den > 0 ? mapped.col(j).dot(zn.col(j)) / den : 0.0;
  }
  r.mean_cosine = total / static_cast<double>(x.cols());
  return r;
}

ProjectionResult learn_projection(const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                                  const BilingualLexicon& lex, Direction dir) {
  if (src.dim() != tgt.dim()) throw ArgumentError("source and target spaces differ in dim");
  std::vector<std::pair<int, int>> anchors;
  for (const auto& [hi, en] : lex.pairs()) {
    const std::string& s = dir == Direction::hi_to_en ? hi : en;
    const std::string& t = dir == Direction::hi_to_en ? en : hi;
    int a = src.index(s), b = tgt.index(t);
    if (a != EmbeddingSpace::kUnk && b != EmbeddingSpace::kUnk) anchors.emplace_back(a, b);
  }
  Mat x(src.dim(), anchors.size()), z(tgt.dim(), anchors.size());
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    x.col(j) = src.matrix().col(anchors[j].first);
    z.col(j) = tgt.matrix().col(anchors[j].second);
  }
  return learn_projection(x, z);
}

void save_projection(const std::string& path, const ProjectionResult& r, Direction dir) {
  nn::ParameterSet ps;
  ps.add("w", r.w.rows(), r.w.cols()).value = r.w;
  nlohmann::json meta = {{"kind", "projection"},
                         {"direction", dir == Direction::hi_to_en ? "hi_to_en" : "en_to_hi"},
                         {"anchors", r.anchors},
                         {"mean_cosine", r.mean_cosine}};
  nn::write_container(path, meta, ps);
}

Mat load_projection(const std::string& path) {
  nn::Container c = nn::read_container(path);
  auto it = c.tensors.find("w");
  if (c.meta.value("kind", "") != "projection" || it == c.tensors.end()) {
    throw DataError(path + ": not a projection file");
  }
  if (it->second.rows() != it->second.cols()) throw DataError(path + ": projection matrix is not square");
  return it->second;
}

}  // namespace cspipe::embed
