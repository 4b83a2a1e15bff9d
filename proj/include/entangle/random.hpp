#pragma once

#include "entangle/types.hpp"

#include <cstdint>
#include <random>

namespace entangle {

using Rng = std::mt19937_64;

/// SplitMix64 step; used to derive independent stream seeds from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Matrix of i.i.d. standard complex Gaussians.
ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Haar-random m x r isometry (V^dag V = I_r), m >= r.
ComplexMatrix random_isometry(Eigen::Index m, Eigen::Index r, Rng& rng);
ComplexMatrix random_unitary(Eigen::Index n, Rng& rng);

PureState random_pure_state(const BipartiteDims& dims, Rng& rng);
PureState random_product_state(const BipartiteDims& dims, Rng& rng);

/// Induced-measure density operator of the given rank (rank 0 = full).
DensityOperator random_density(const BipartiteDims& dims, Rng& rng, Eigen::Index rank = 0);

}  // namespace entangle
