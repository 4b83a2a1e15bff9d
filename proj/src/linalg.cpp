#include "entangle/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace entangle {

PureState::PureState(ComplexVector amplitudes, BipartiteDims dims)
    : amplitudes_(std::move(amplitudes)), dims_(dims) {
  if (amplitudes_.size() != static_cast<Eigen::Index>(dims_.total())) {
    throw DimensionMismatch("pure state: amplitude count " + std::to_string(amplitudes_.size()) +
                            " != dimA*dimB = " + std::to_string(dims_.total()));
  }
  if (!amplitudes_.allFinite()) {
    throw InvalidInput("pure state: non-finite amplitude");
  }
  const double residual = std::abs(amplitudes_.norm() - 1.0);
  if (residual > kNormTol) {
    throw InvalidInput("pure state: norm invariant violated, |norm - 1| = " + std::to_string(residual));
  }
}

PureState PureState::normalized(ComplexVector amplitudes, BipartiteDims dims) {
  if (amplitudes.size() != static_cast<Eigen::Index>(dims.total())) {
    throw DimensionMismatch("pure state: amplitude count does not match dims");
  }
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidInput("pure state: cannot normalize a zero or non-finite vector");
  }
  amplitudes /= n;
  return PureState(std::move(amplitudes), dims, Unchecked{});
}

DensityOperator::DensityOperator(ComplexMatrix matrix, BipartiteDims dims)
    : matrix_(std::move(matrix)), dims_(dims) {
  detail::require_square_factoring(matrix_.rows(), matrix_.cols(), dims_);
  if (!matrix_.allFinite()) {
    throw InvalidInput("density operator: non-finite entry");
  }
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    throw InvalidInput("density operator: hermiticity invariant violated, max |M - M^dag| = " +
                       std::to_string(herm));
  }
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw InvalidInput("density operator: trace invariant violated, |tr - 1| = " + std::to_string(std::abs(tr - 1.0)));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  const double minEig = es.eigenvalues().minCoeff();
  if (minEig < -kPsdTol) {
    throw InvalidInput("density operator: positivity invariant violated, min eigenvalue = " + std::to_string(minEig));
  }
}

DensityOperator DensityOperator::fromPure(const PureState& psi) {
  ComplexMatrix m = psi.amplitudes() * psi.amplitudes().adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityOperator(std::move(m), psi.dims());
}

DensityOperator DensityOperator::fromUnnormalized(const ComplexMatrix& m, BipartiteDims dims) {
  detail::require_square_factoring(m.rows(), m.cols(), dims);
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  const double tr = h.trace().real();
  if (!(tr > 0.0)) {
    throw InvalidInput("density operator: non-positive trace");
  }
  h /= tr;
  return DensityOperator(std::move(h), dims);
}

ComplexMatrix reshape_to_coefficient_matrix(const PureState& psi) {
  return reshape_to_coefficient_matrix(psi.amplitudes(), psi.dims());
}

ComplexMatrix partial_trace(const DensityOperator& rho, Side side) {
  return partial_trace(rho.matrix(), rho.dims(), side);
}

ComplexMatrix partial_transpose(const DensityOperator& rho, Side side) {
  return partial_transpose(rho.matrix(), rho.dims(), side);
}

ComplexMatrix lift_local(const ComplexMatrix& k, Side side, std::size_t otherDim) {
  const ComplexMatrix id = ComplexMatrix::Identity(static_cast<Eigen::Index>(otherDim),
                                                   static_cast<Eigen::Index>(otherDim));
  return side == Side::A ? kron(k, id) : kron(id, k);
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    return false;
  }
  if (m.size() == 0) {
    return true;
  }
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

EigenSystem eigh(const ComplexMatrix& m) {
  if (!is_hermitian(m, 1e-10)) {
    throw InvalidInput("eigh: matrix is not Hermitian within 1e-10");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  const Eigen::Index n = m.rows();
  // Eigen returns ascending order; reversing is a stable descending sort
  // except for exact ties, which we keep in reversed solver order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return es.eigenvalues()(x) > es.eigenvalues()(y);
  });
  EigenSystem out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

RealVector eigvalsh(const ComplexMatrix& m) {
  if (!is_hermitian(m, 1e-10)) {
    throw InvalidInput("eigvalsh: matrix is not Hermitian within 1e-10");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

void apply_rank_threshold(RealVector& values) {
  if (values.size() == 0) {
    return;
  }
  const double cut = kRankRelTol * std::max(values.maxCoeff(), 0.0);
  for (auto& v : values) {
    if (v < cut || v < 0.0) {
      v = 0.0;
    }
  }
}

std::size_t numerical_rank(const RealVector& values) {
  if (values.size() == 0) {
    return 0;
  }
  const double top = values.maxCoeff();
  if (!(top > 0.0)) {
    return 0;
  }
  const double cut = kRankRelTol * top;
  return static_cast<std::size_t>((values.array() > cut).count());
}

double trace_norm(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

ComplexVector SchmidtDecomposition::reconstruct() const {
  const Eigen::Index a = leftBasis.rows();
  const Eigen::Index b = rightBasis.rows();
  ComplexVector v = ComplexVector::Zero(a * b);
  for (Eigen::Index k = 0; k < singularValues.size(); ++k) {
    for (Eigen::Index i = 0; i < a; ++i) {
      v.segment(i * b, b) += singularValues(k) * leftBasis(i, k) * rightBasis.col(k);
    }
  }
  return v;
}

SchmidtDecomposition schmidt(const PureState& psi) {
  const ComplexMatrix c = reshape_to_coefficient_matrix(psi);
  Eigen::JacobiSVD<ComplexMatrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RealVector s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > kRankRelTol * top) {
    ++rank;
  }
  SchmidtDecomposition out;
  out.singularValues = s.head(rank);
  out.lambdas = out.singularValues.array().square();
  // C = U S V^dag = sum_k s_k u_k conj(v_k)^T, so |beta_k> = conj(v_k).
  out.leftBasis = svd.matrixU().leftCols(rank);
  out.rightBasis = svd.matrixV().leftCols(rank).conjugate();
  return out;
}

namespace {

// Eigenvalues of a 2x2 Hermitian matrix [[a, z], [conj z, c]], descending.
inline void eig2x2(double a, double c, Scalar z, double& hi, double& lo) {
  const double mean = 0.5 * (a + c);
  const double half = 0.5 * (a - c);
  const double rad = std::sqrt(half * half + std::norm(z));
  hi = mean + rad;
  lo = mean - rad;
}

}  // namespace

RealVector schmidt_spectrum(const Eigen::Ref<const ComplexVector>& amplitudes, const BipartiteDims& dims) {
  const auto a = static_cast<Eigen::Index>(dims.dimA);
  const auto b = static_cast<Eigen::Index>(dims.dimB);
  if (amplitudes.size() != a * b) {
    throw DimensionMismatch("schmidt_spectrum: amplitude length does not match dims");
  }
  const Eigen::Index d = std::min(a, b);
  RealVector out(d);
  if (d == 1) {
    out(0) = amplitudes.squaredNorm();
    return out;
  }
  // Row-major coefficient matrix viewed without copying.
  Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> c(amplitudes.data(), a, b);
  if (d == 2) {
    double g00, g11;
    Scalar g01;
    if (a == 2) {
      g00 = c.row(0).squaredNorm();
      g11 = c.row(1).squaredNorm();
      g01 = c.row(0).dot(c.row(1));  // conj(row0) . row1
    } else {
      g00 = c.col(0).squaredNorm();
      g11 = c.col(1).squaredNorm();
      g01 = c.col(0).dot(c.col(1));
    }
    double hi, lo;
    eig2x2(g00, g11, g01, hi, lo);
    out(0) = hi;
    out(1) = lo;
  } else {
    ComplexMatrix gram = (a <= b) ? ComplexMatrix(c * c.adjoint()) : ComplexMatrix(c.adjoint() * c);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
    out = es.eigenvalues().reverse();
  }
  apply_rank_threshold(out);
  return out;
}

ComplexMatrix orthonormalize_columns(const ComplexMatrix& m) {
  Eigen::HouseholderQR<ComplexMatrix> qr(m);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m.rows(), m.cols());
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const Scalar diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) {
      q.col(j) *= diag / mag;
    }
  }
  return q;
}

}  // namespace entangle
