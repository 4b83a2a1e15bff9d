#include "entangle/random.hpp"

#include "entangle/linalg.hpp"

namespace entangle {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Scalar(re, im);
    }
  }
  return g;
}

ComplexMatrix random_isometry(Eigen::Index m, Eigen::Index r, Rng& rng) {
  if (m < r) {
    throw InvalidParameter("random_isometry: rows must be >= cols");
  }
  return orthonormalize_columns(ginibre(m, r, rng));
}

ComplexMatrix random_unitary(Eigen::Index n, Rng& rng) { return random_isometry(n, n, rng); }

PureState random_pure_state(const BipartiteDims& dims, Rng& rng) {
  ComplexVector v = ginibre(static_cast<Eigen::Index>(dims.total()), 1, rng).col(0);
  return PureState::normalized(std::move(v), dims);
}

PureState random_product_state(const BipartiteDims& dims, Rng& rng) {
  ComplexVector a = ginibre(static_cast<Eigen::Index>(dims.dimA), 1, rng).col(0);
  ComplexVector b = ginibre(static_cast<Eigen::Index>(dims.dimB), 1, rng).col(0);
  ComplexVector v = kron(a, b);
  return PureState::normalized(std::move(v), dims);
}

DensityOperator random_density(const BipartiteDims& dims, Rng& rng, Eigen::Index rank) {
  const auto n = static_cast<Eigen::Index>(dims.total());
  const Eigen::Index k = rank <= 0 ? n : rank;
  const ComplexMatrix g = ginibre(n, k, rng);
  return DensityOperator::fromUnnormalized(g * g.adjoint(), dims);
}

}  // namespace entangle
