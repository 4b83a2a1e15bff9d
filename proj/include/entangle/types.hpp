#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace entangle {

using Scalar = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Thrown when an input object violates a structural invariant
/// (shape, normalization, hermiticity). Maps to CLI exit code 2.
class InvalidInput : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a numeric parameter is outside its domain (p <= 1, k out of
/// range, ...). Maps to CLI exit code 3.
class InvalidParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when declared bipartite dimensions do not factor a matrix side.
class DimensionMismatch : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

enum class Side { A, B };

struct BipartiteDims {
  std::size_t dimA = 1;
  std::size_t dimB = 1;

  BipartiteDims() = default;
  BipartiteDims(std::size_t a, std::size_t b) : dimA(a), dimB(b) {
    if (a < 1 || b < 1) {
      throw DimensionMismatch("bipartite dimensions must be >= 1");
    }
  }

  std::size_t total() const { return dimA * dimB; }
  /// Schmidt-rank bound.
  std::size_t schmidtBound() const { return dimA < dimB ? dimA : dimB; }
  std::size_t of(Side side) const { return side == Side::A ? dimA : dimB; }

  friend bool operator==(const BipartiteDims&, const BipartiteDims&) = default;
};

// Tolerances shared across modules.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
/// Relative cut-off below which singular values / eigenvalues count as zero.
inline constexpr double kRankRelTol = 1e-12;

/// A normalized amplitude vector on A (x) B. Index i*dimB + j holds the
/// amplitude of |x_i>|y_j>.
class PureState {
public:
  PureState(ComplexVector amplitudes, BipartiteDims dims);

  /// Rescales to unit norm instead of rejecting. Throws on the zero vector.
  static PureState normalized(ComplexVector amplitudes, BipartiteDims dims);

  const ComplexVector& amplitudes() const { return amplitudes_; }
  const BipartiteDims& dims() const { return dims_; }

private:
  struct Unchecked {};
  PureState(ComplexVector amplitudes, BipartiteDims dims, Unchecked)
      : amplitudes_(std::move(amplitudes)), dims_(dims) {}

  ComplexVector amplitudes_;
  BipartiteDims dims_;
};

/// Hermitian, PSD, unit-trace operator on A (x) B.
class DensityOperator {
public:
  DensityOperator(ComplexMatrix matrix, BipartiteDims dims);

  static DensityOperator fromPure(const PureState& psi);
  /// Symmetrizes and renormalizes a PSD matrix with positive trace.
  static DensityOperator fromUnnormalized(const ComplexMatrix& m, BipartiteDims dims);

  const ComplexMatrix& matrix() const { return matrix_; }
  const BipartiteDims& dims() const { return dims_; }

private:
  ComplexMatrix matrix_;
  BipartiteDims dims_;
};

}  // namespace entangle
