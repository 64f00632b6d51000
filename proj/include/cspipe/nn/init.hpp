#pragma once

#include <cstdint>
#include <random>

#include "cspipe/nn/parameter.hpp"

namespace cspipe::nn {

using Rng = std::mt19937_64;

// Random (semi-)orthonormal matrix from the QR factorization of a Gaussian
// matrix, sign-corrected so the distribution is uniform (Haar). Square
// results satisfy M^T M = I; tall ones have orthonormal columns, wide ones
// orthonormal rows. Deterministic per seed.
Mat orthonormal_init(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

Mat uniform_init(Eigen::Index rows, Eigen::Index cols, double range, Rng& rng);

// Glorot/Xavier uniform.
Mat glorot_init(Eigen::Index rows, Eigen::Index cols, Rng& rng);

// Inverted-dropout mask: each entry is 0 with probability `rate`, otherwise
// 1 / (1 - rate). Requires 0 <= rate < 1.
Vec dropout_mask(Eigen::Index dim, double rate, Rng& rng);
Vec dropout_mask(Eigen::Index dim, double rate, std::uint64_t seed);

}  // namespace cspipe::nn
