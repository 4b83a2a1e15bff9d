#pragma once

#include "entangle/linalg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace entangle {

enum class MeasureKind {
  EntanglementNumber,
  PNumber,
  EntanglementEntropy,
  Negativity,
  Concurrence,
  GeometricMeasure,
  CironeNu,
};

enum class LogBase { Two, E };

double log_in_base(double x, LogBase base);

/// Selects a pure-state measure and carries its parameters.
///
/// `complement` turns a measure into `sup_psi m(psi) - m`, which maps
/// increasing LOCC monotones onto decreasing ones and back.
struct MeasureSpec {
  MeasureKind kind = MeasureKind::EntanglementNumber;
  std::optional<double> p;
  std::optional<int> k;
  std::vector<int> ranks;
  LogBase logBase = LogBase::Two;
  bool complement = false;

  static MeasureSpec entanglement_number() { return {}; }
  static MeasureSpec p_number(double p);
  static MeasureSpec entropy(LogBase base = LogBase::Two);
  static MeasureSpec negativity();
  static MeasureSpec concurrence(int k);
  static MeasureSpec geometric(std::vector<int> ranks);
  static MeasureSpec cirone_nu(double p);

  /// Throws InvalidParameter if parameters do not match the kind or are out
  /// of range for `dims`.
  void validate(const BipartiteDims& dims) const;

  /// Increasing LOCC monotones (geometric measure) are roof-extended by a
  /// concave roof; the rest by a convex roof.
  bool increasing() const;

  /// CLI-facing name: e, p-number, entropy, negativity, concurrence,
  /// geometric, nu.
  std::string name() const;
};

MeasureKind parse_measure_kind(const std::string& name);

// --- Building blocks ----------------------------------------------------------

/// Tr(|C|^4) = Tr((C^dag C)^2).
double trace_abs_pow4(const ComplexMatrix& c);
/// sum_{r,s} |<c_r, c_s>|^2 over the columns c_j of C.
double column_overlap_sum(const ComplexMatrix& c);

/// f(rho) = sqrt(1 - ||rho||_2^2).
double purity_deficit_root(const ComplexMatrix& rho);
/// f_p(rho) = (1 - ||rho||_p^p)^(1/p) on a density matrix, p > 1.
double schatten_deficit_root(const ComplexMatrix& rho, double p);
double von_neumann_entropy(const ComplexMatrix& rho, LogBase base);

/// sum_i lambda_i^p with 0^p := 0. Defined for any p > 0.
double power_sum(const RealVector& lambdas, double p);
/// k-th elementary symmetric polynomial, S_0 = 1.
double elementary_symmetric(const RealVector& x, int k);

// --- Pure-state measures -----------------------------------------------------

double entanglement_number_pure(const PureState& psi);
double entanglement_number_reduced_route(const PureState& psi);
double entanglement_number_schmidt_route(const PureState& psi);

double p_number_pure(const PureState& psi, double p);
double entanglement_entropy_pure(const PureState& psi, LogBase base = LogBase::Two);

/// Closed form ((sum_i sqrt(lambda_i))^2 - 1) / (d - 1).
double negativity_pure(const PureState& psi);
/// Same quantity via the trace norm of the partially transposed projector.
double negativity_trace_norm_route(const PureState& psi);

double concurrence_pure(const PureState& psi, int k);
double cirone_nu_pure(const PureState& psi, double p);

struct GeometricResult {
  double value = 0.0;
  ComplexMatrix projectorA;  ///< rank k1 orthogonal projector on A
  ComplexMatrix projectorB;  ///< rank k2 orthogonal projector on B
  int iterations = 0;
};

struct AlternatingOptions {
  int restarts = 16;
  int maxIters = 500;
  double tol = 1e-15;
  std::uint64_t seed = 0x6e0dULL;
};

/// sup ||(P (x) Q) psi||^2 by alternating maximization over the projector
/// pair. The value is attained by the returned projectors, so it is a
/// certified lower bound on the supremum.
GeometricResult geometric_measure_alternating(const PureState& psi, int rankA, int rankB,
                                              const AlternatingOptions& opts = {});
/// Sum of the top min(k1, k2) Schmidt weights.
double geometric_measure_schmidt(const PureState& psi, int rankA, int rankB);
/// Closed Schmidt route when k1 == k2, alternating maximization otherwise.
double geometric_measure_pure(const PureState& psi, const std::vector<int>& ranks);

// --- Dispatch ----------------------------------------------------------------

/// Evaluates the measure from the squared Schmidt coefficients (descending,
/// zero-padded to min(dimA, dimB), entries summing to 1). Every measure here
/// is a function of this spectrum; this is the hot path of the roof solver.
double measure_from_spectrum(const MeasureSpec& spec, const RealVector& lambdas, const BipartiteDims& dims);

double evaluate(const MeasureSpec& spec, const PureState& psi);

/// sup over pure states of the (uncomplemented) measure on `dims`.
double measure_sup(const MeasureSpec& spec, const BipartiteDims& dims);

}  // namespace entangle
