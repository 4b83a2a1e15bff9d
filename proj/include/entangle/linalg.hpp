#pragma once

#include "entangle/types.hpp"

#include <vector>

namespace entangle {

namespace detail {

inline void require_square_factoring(Eigen::Index rows, Eigen::Index cols, const BipartiteDims& dims) {
  const auto n = static_cast<Eigen::Index>(dims.total());
  if (rows != n || cols != n) {
    throw DimensionMismatch("matrix of size " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " is not factored by dims (" + std::to_string(dims.dimA) + "," +
                            std::to_string(dims.dimB) + ")");
  }
}

}  // namespace detail

/// Row-major reshape of a vector of length dimA*dimB into the dimA x dimB
/// coefficient matrix (rows index A, columns index B).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
reshape_to_coefficient_matrix(const Eigen::MatrixBase<Derived>& amplitudes, const BipartiteDims& dims) {
  if (amplitudes.size() != static_cast<Eigen::Index>(dims.total())) {
    throw DimensionMismatch("amplitude vector length does not equal dimA*dimB");
  }
  const auto a = static_cast<Eigen::Index>(dims.dimA);
  const auto b = static_cast<Eigen::Index>(dims.dimB);
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> c(a, b);
  for (Eigen::Index i = 0; i < a; ++i) {
    for (Eigen::Index j = 0; j < b; ++j) {
      c(i, j) = amplitudes(i * b + j);
    }
  }
  return c;
}

ComplexMatrix reshape_to_coefficient_matrix(const PureState& psi);

/// Inverse of reshape_to_coefficient_matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> flatten_row_major(const Eigen::MatrixBase<Derived>& c) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> v(c.size());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      v(i * c.cols() + j) = c(i, j);
    }
  }
  return v;
}

/// Traces out `side`, returning the operator on the remaining factor.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
partial_trace(const Eigen::MatrixBase<Derived>& m, const BipartiteDims& dims, Side side) {
  detail::require_square_factoring(m.rows(), m.cols(), dims);
  const auto a = static_cast<Eigen::Index>(dims.dimA);
  const auto b = static_cast<Eigen::Index>(dims.dimB);
  using Result = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (side == Side::A) {
    Result r = Result::Zero(b, b);
    for (Eigen::Index i = 0; i < a; ++i) {
      r += m.block(i * b, i * b, b, b);
    }
    return r;
  }
  Result r(a, a);
  for (Eigen::Index i = 0; i < a; ++i) {
    for (Eigen::Index k = 0; k < a; ++k) {
      r(i, k) = m.block(i * b, k * b, b, b).trace();
    }
  }
  return r;
}

/// Transposes the `side` tensor factor only. An involution.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
partial_transpose(const Eigen::MatrixBase<Derived>& m, const BipartiteDims& dims, Side side) {
  detail::require_square_factoring(m.rows(), m.cols(), dims);
  const auto a = static_cast<Eigen::Index>(dims.dimA);
  const auto b = static_cast<Eigen::Index>(dims.dimB);
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < a; ++i) {
    for (Eigen::Index k = 0; k < a; ++k) {
      if (side == Side::B) {
        r.block(i * b, k * b, b, b) = m.block(i * b, k * b, b, b).transpose();
      } else {
        r.block(k * b, i * b, b, b) = m.block(i * b, k * b, b, b);
      }
    }
  }
  return r;
}

ComplexMatrix partial_trace(const DensityOperator& rho, Side side);
ComplexMatrix partial_transpose(const DensityOperator& rho, Side side);

/// Kronecker product a (x) b.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>
kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> r(a.rows() * b.rows(),
                                                                            a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return r;
}

/// Lifts a local operator on `side` to K (x) I_B or I_A (x) K. The other
/// factor's dimension is `otherDim`.
ComplexMatrix lift_local(const ComplexMatrix& k, Side side, std::size_t otherDim);

struct EigenSystem {
  RealVector values;     ///< descending
  ComplexMatrix vectors; ///< orthonormal columns, matching `values`
};

/// Hermitian eigendecomposition with eigenvalues sorted descending.
/// Throws InvalidInput if `m` is not Hermitian within 1e-10.
EigenSystem eigh(const ComplexMatrix& m);

/// Eigenvalues only, descending. Same hermiticity requirement as eigh.
RealVector eigvalsh(const ComplexMatrix& m);

struct SchmidtDecomposition {
  RealVector singularValues;  ///< s_i, descending, nonzero
  RealVector lambdas;         ///< s_i^2, descending, sum to 1
  ComplexMatrix leftBasis;    ///< columns |alpha_i> on A
  ComplexMatrix rightBasis;   ///< columns |beta_i> on B

  std::size_t rank() const { return static_cast<std::size_t>(lambdas.size()); }
  /// sum_i s_i |alpha_i> (x) |beta_i>
  ComplexVector reconstruct() const;
};

SchmidtDecomposition schmidt(const PureState& psi);

/// Squared Schmidt coefficients of an arbitrary (possibly unnormalized)
/// amplitude vector, descending, padded with zeros to min(dimA, dimB).
/// Values below the rank threshold are set to exactly 0.
RealVector schmidt_spectrum(const Eigen::Ref<const ComplexVector>& amplitudes, const BipartiteDims& dims);

/// Zeroes entries below kRankRelTol * max and clamps tiny negatives.
void apply_rank_threshold(RealVector& values);

/// Number of values above kRankRelTol * max.
std::size_t numerical_rank(const RealVector& values);

bool is_hermitian(const ComplexMatrix& m, double tol);
double trace_norm(const ComplexMatrix& hermitian);

/// QR-based orthonormalization; the R factor is made to have a positive
/// real diagonal so the map is continuous.
ComplexMatrix orthonormalize_columns(const ComplexMatrix& m);

}  // namespace entangle
