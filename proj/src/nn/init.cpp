#include "cspipe/nn/init.hpp"

#include <cmath>

#include "cspipe/error.hpp"

namespace cspipe::nn {

Mat orthonormal_init(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  if (rows <= 0 || cols <= 0) throw ArgumentError("orthonormal_init needs positive dimensions");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index big = std::max(rows, cols), small = std::min(rows, cols);
  Mat a(big, small);
  for (Eigen::Index j = 0; j < small; ++j) {
    for (Eigen::Index i = 0; i < big; ++i) a(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(big, small);
  Mat r = qr.matrixQR().topLeftCorner(small, small);
  for (Eigen::Index j = 0; j < small; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  if (rows >= cols) return q;
  return q.transpose();
}

Mat uniform_init(Eigen::Index rows, Eigen::Index cols, double range, Rng& rng) {
  std::uniform_real_distribution<double> u(-range, range);
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  }
  return m;
}

Mat glorot_init(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  return uniform_init(rows, cols, std::sqrt(6.0 / static_cast<double>(rows + cols)), rng);
}

Vec dropout_mask(Eigen::Index dim, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw ArgumentError("dropout rate must be in [0, 1)");
  Vec m = Vec::Ones(dim);
  if (rate == 0.0) return m;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < dim; ++i) m(i) = u(rng) < rate ? 0.0 : keep;
  return m;
}

Vec dropout_mask(Eigen::Index dim, double rate, std::uint64_t seed) {
  Rng rng(seed);
  return dropout_mask(dim, rate, rng);
}

}  // namespace cspipe::nn
