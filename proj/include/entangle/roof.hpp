#pragma once

#include "entangle/measures.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace entangle {

/// A finite pure-state decomposition {weights_i, |psi_i>} of a density
/// operator.
struct Ensemble {
  RealVector weights;
  std::vector<PureState> states;

  std::size_t size() const { return states.size(); }
  /// sum_i w_i |psi_i><psi_i|
  ComplexMatrix mixture() const;
  /// Trace-norm distance between the mixture and rho.
  double reconstruction_error(const DensityOperator& rho) const;
  /// sum_i w_i m(psi_i)
  double average(const MeasureSpec& spec) const;
};

/// Eigen-ensemble of rho mixed by an m x r isometry V:
/// chi_i = sum_j V_ij sqrt(p_j) |e_j>, weight ||chi_i||^2, state chi_i/||chi_i||.
/// Rows with ||chi_i||^2 < 1e-14 are dropped.
Ensemble ensemble_from_isometry(const DensityOperator& rho, const ComplexMatrix& v);

/// Numerical rank of rho and its nonzero spectral decomposition.
struct Eigenbasis {
  RealVector weights;   ///< p_j > 0, descending
  ComplexMatrix basis;  ///< n x r, columns |e_j>
  std::size_t rank() const { return static_cast<std::size_t>(weights.size()); }
};
Eigenbasis spectral_support(const DensityOperator& rho);

enum class Direction { Minimize, Maximize };

struct RoofOptions {
  /// Ensemble size m; defaults to rank(rho)^2.
  std::optional<int> ensembleSize;
  int restarts = 32;
  int maxIters = 2000;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  /// Worker threads for restarts; 0 = hardware concurrency. Results do not
  /// depend on this value.
  int threads = 1;
  double fdStep = 1e-6;
  /// The run stops once the objective improved by less than tol over this
  /// many iterations.
  int stallWindow = 20;
  /// Every other restart first optimizes over rank(rho)-member ensembles and
  /// then widens to m members from that point.
  bool compactWarmStart = true;
};

struct RoofProblem {
  DensityOperator rho;
  MeasureSpec measure;
  Direction direction = Direction::Minimize;
  RoofOptions options;
};

struct RestartSummary {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  int perturbations = 0;
};

struct RoofResult {
  double value = 0.0;
  Ensemble ensemble;
  /// Best-so-far objective per iteration of the winning restart; monotone.
  std::vector<double> objectiveTrace;
  bool converged = false;
  /// |best - second best| over restarts. A heuristic, not a bound.
  double gapEstimate = 0.0;
  int bestRestart = 0;
  std::size_t ensembleSize = 0;
  /// Number of 1e-10 kicks applied at stalled line searches (winning restart).
  int perturbations = 0;
  std::vector<RestartSummary> restarts;
};

/// Objective on normalized pure states of rho's dims.
using PureObjective = std::function<double(const ComplexVector& unit)>;

/// Roof of an arbitrary continuous pure-state functional.
RoofResult solve_roof_functional(const DensityOperator& rho, const PureObjective& objective, Direction direction,
                                 const RoofOptions& options);

/// Convex roof (direction minimize) or concave roof (maximize) of a measure.
RoofResult solve_roof(const RoofProblem& problem);

/// solve_roof with direction forced to maximize.
RoofResult concave_roof(RoofProblem problem);

RoofResult entanglement_number_mixed(const DensityOperator& rho, const RoofOptions& options = {});

/// Validates sum_k K_k^dag K_k = I within 1e-10; returns the residual norm.
double kraus_completeness_residual(const std::vector<ComplexMatrix>& kraus);
ComplexMatrix apply_channel(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& rho);

struct ChannelEntropyResult {
  double value = 0.0;
  double outputEntropy = 0.0;  ///< H(Phi(rho))
  RoofResult roof;             ///< inf sum_i w_i H(Phi(psi_i))
};

/// H(Phi(rho)) - inf_{CD(rho)} sum_i w_i H(Phi(psi_i)). Kraus operators act on
/// the full space of rho.
ChannelEntropyResult channel_entropy(const DensityOperator& rho, const std::vector<ComplexMatrix>& kraus,
                                     const RoofOptions& options = {}, LogBase base = LogBase::Two);

}  // namespace entangle
