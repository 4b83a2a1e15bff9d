#include "doctest.h"

#include "entangle/roof.hpp"
#include "entangle/random.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace entangle;

namespace {

const BipartiteDims kQubits(2, 2);

DensityOperator bell_plus_product() {
  ComplexVector bell = ComplexVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  ComplexVector prod = ComplexVector::Zero(4);
  prod(1) = 1.0;
  const ComplexMatrix rho = 0.5 * bell * bell.adjoint() + 0.5 * prod * prod.adjoint();
  return DensityOperator(rho, kQubits);
}

RoofOptions quick(std::uint64_t seed = 0) {
  RoofOptions o;
  o.restarts = 8;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("ensemble from isometry") {
  Rng rng(1);
  const DensityOperator rho = random_density({2, 3}, rng, 3);
  const Eigenbasis eb = spectral_support(rho);
  REQUIRE(eb.rank() == 3);

  const Ensemble eigen = ensemble_from_isometry(rho, ComplexMatrix::Identity(3, 3));
  REQUIRE(eigen.size() == 3);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(std::abs(eigen.weights(i) - eb.weights(i)) < 1e-12);
  }
  CHECK(eigen.reconstruction_error(rho) < 1e-10);

  for (int t = 0; t < 20; ++t) {
    const Ensemble e = ensemble_from_isometry(rho, random_isometry(3 + t % 7, 3, rng));
    CHECK(std::abs(e.weights.sum() - 1.0) < 1e-12);
    CHECK(e.weights.minCoeff() > 0.0);
    CHECK(e.reconstruction_error(rho) < 1e-10);
  }

  CHECK_THROWS_AS(ensemble_from_isometry(rho, ComplexMatrix::Identity(4, 2)), InvalidParameter);
  CHECK_THROWS_AS(ensemble_from_isometry(rho, 2.0 * ComplexMatrix::Identity(3, 3)), InvalidParameter);
}

TEST_CASE("pure input reduces to the pure measure") {
  Rng rng(2);
  for (int t = 0; t < 5; ++t) {
    const PureState psi = random_pure_state({2, 3}, rng);
    const DensityOperator rho = DensityOperator::fromPure(psi);
    const RoofResult r = entanglement_number_mixed(rho, quick());
    CHECK(r.ensembleSize == 1);
    CHECK(std::abs(r.value - entanglement_number_pure(psi)) < 1e-10);
  }
}

TEST_CASE("convex roof of e matches the Wootters concurrence on two qubits") {
  // For two qubits e(psi) = C(psi) / sqrt(2), so the roof is C(rho) / sqrt(2).
  Rng rng(3);
  for (int t = 0; t < 6; ++t) {
    const DensityOperator rho = random_density(kQubits, rng, 2 + t % 3);
    const RoofResult r = entanglement_number_mixed(rho, quick(static_cast<std::uint64_t>(t)));
    CHECK(std::abs(r.value - oracle::wootters_concurrence(rho.matrix()) / std::sqrt(2.0)) < 1e-6);
    CHECK(r.ensemble.reconstruction_error(rho) < 1e-10);
  }
  const DensityOperator bp = bell_plus_product();
  const RoofResult r = entanglement_number_mixed(bp, quick());
  CHECK(std::abs(r.value - oracle::wootters_concurrence(bp.matrix()) / std::sqrt(2.0)) < 1e-7);
}

TEST_CASE("entanglement of formation matches Wootters") {
  Rng rng(4);
  for (int t = 0; t < 5; ++t) {
    const DensityOperator rho(oracle::random_npt_two_qubit(rng, -0.02), kQubits);
    const RoofResult r = solve_roof({rho, MeasureSpec::entropy(), Direction::Minimize, quick()});
    CHECK(std::abs(r.value - oracle::wootters_eof(rho.matrix())) < 1e-6);
  }
}

TEST_CASE("separable states have vanishing roof") {
  Rng rng(5);
  for (int t = 0; t < 4; ++t) {
    const DensityOperator rho(oracle::random_separable(kQubits, rng, 3), kQubits);
    CHECK(entanglement_number_mixed(rho, quick()).value < 1e-6);
  }
  const DensityOperator mixed(ComplexMatrix::Identity(4, 4) / 4.0, kQubits);
  CHECK(entanglement_number_mixed(mixed, quick()).value < 1e-6);
}

TEST_CASE("upper-bound soundness against sampled ensembles") {
  Rng rng(6);
  const DensityOperator rho = random_density({2, 3}, rng, 3);
  const MeasureSpec spec = MeasureSpec::entanglement_number();
  const RoofResult r = entanglement_number_mixed(rho, quick());
  CHECK(r.value <= ensemble_from_isometry(rho, ComplexMatrix::Identity(3, 3)).average(spec) + 1e-12);
  for (int t = 0; t < 200; ++t) {
    const Ensemble e = ensemble_from_isometry(rho, random_isometry(9, 3, rng));
    CHECK(r.value <= e.average(spec) + 1e-9);
  }
  CHECK(std::abs(r.value - r.ensemble.average(spec)) < 1e-12);
  CHECK(r.ensemble.reconstruction_error(rho) < 1e-10);
}

TEST_CASE("objective trace is monotone and the run is reproducible") {
  Rng rng(7);
  const DensityOperator rho = random_density({2, 2}, rng, 3);
  RoofOptions o = quick(42);
  const RoofResult a = entanglement_number_mixed(rho, o);
  REQUIRE_FALSE(a.objectiveTrace.empty());
  for (std::size_t i = 1; i < a.objectiveTrace.size(); ++i) {
    CHECK(a.objectiveTrace[i] <= a.objectiveTrace[i - 1]);
  }
  const RoofResult b = entanglement_number_mixed(rho, o);
  CHECK(a.value == b.value);
  CHECK(a.bestRestart == b.bestRestart);
  o.threads = 3;
  const RoofResult c = entanglement_number_mixed(rho, o);
  CHECK(a.value == c.value);
  CHECK(a.gapEstimate == c.gapEstimate);
  CHECK(a.objectiveTrace == c.objectiveTrace);
  CHECK(a.ensemble.mixture() == c.ensemble.mixture());
}

TEST_CASE("convexity of the roof") {
  Rng rng(8);
  const DensityOperator r1 = random_density(kQubits, rng, 2);
  const DensityOperator r2 = random_density(kQubits, rng, 2);
  const double v1 = entanglement_number_mixed(r1, quick()).value;
  const double v2 = entanglement_number_mixed(r2, quick()).value;
  for (const double t : {0.25, 0.5, 0.75}) {
    const DensityOperator mix(t * r1.matrix() + (1.0 - t) * r2.matrix(), kQubits);
    CHECK(entanglement_number_mixed(mix, quick()).value <= t * v1 + (1.0 - t) * v2 + 1e-6);
  }
}

TEST_CASE("larger ensembles do not help beyond rank squared") {
  Rng rng(9);
  const DensityOperator rho = random_density(kQubits, rng, 2);
  RoofOptions o = quick();
  o.ensembleSize = 2;
  const double small = entanglement_number_mixed(rho, o).value;
  o.ensembleSize = 4;
  const double full = entanglement_number_mixed(rho, o).value;
  CHECK(full <= small + 1e-8);
  CHECK(std::abs(full - oracle::wootters_concurrence(rho.matrix()) / std::sqrt(2.0)) < 1e-6);
  o.ensembleSize = 5;
  CHECK_THROWS_AS(entanglement_number_mixed(rho, o), InvalidParameter);
  o.ensembleSize = 1;
  CHECK_THROWS_AS(entanglement_number_mixed(rho, o), InvalidParameter);
}

TEST_CASE("concave roof of the geometric measure") {
  Rng rng(10);
  const DensityOperator rho = random_density({2, 3}, rng, 2);
  const MeasureSpec g = MeasureSpec::geometric({1, 1});
  const RoofResult r = concave_roof({rho, g, Direction::Minimize, quick()});
  const double eigenValue = ensemble_from_isometry(rho, ComplexMatrix::Identity(2, 2)).average(g);
  CHECK(r.value >= eigenValue - 1e-12);
  for (int t = 0; t < 100; ++t) {
    CHECK(r.value >= ensemble_from_isometry(rho, random_isometry(4, 2, rng)).average(g) - 1e-9);
  }
  CHECK(r.value <= 1.0);
}

TEST_CASE("complement maps the concave roof onto a convex roof") {
  Rng rng(11);
  const DensityOperator rho = random_density({2, 2}, rng, 2);
  MeasureSpec g = MeasureSpec::geometric({1, 1});
  const double concave = concave_roof({rho, g, Direction::Maximize, quick()}).value;
  g.complement = true;
  const double convex = solve_roof({rho, g, Direction::Minimize, quick()}).value;
  CHECK(std::abs((1.0 - concave) - convex) < 1e-7);
}

TEST_CASE("channel entropy") {
  Rng rng(12);
  const std::vector<ComplexMatrix> identity = {ComplexMatrix::Identity(4, 4)};
  const PureState psi = random_pure_state(kQubits, rng);
  CHECK(std::abs(channel_entropy(DensityOperator::fromPure(psi), identity, quick()).value) < 1e-9);

  const DensityOperator rho = random_density(kQubits, rng, 3);
  const ChannelEntropyResult id = channel_entropy(rho, identity, quick());
  CHECK(std::abs(id.value - von_neumann_entropy(rho.matrix(), LogBase::Two)) < 1e-6);
  CHECK(id.roof.value < 1e-6);

  // Completely depolarizing qubit channel on a single system.
  std::vector<ComplexMatrix> dep(4, ComplexMatrix::Zero(2, 2));
  dep[0] << 1, 0, 0, 1;
  dep[1] << 0, 1, 1, 0;
  dep[2] << 0, Scalar(0, -1), Scalar(0, 1), 0;
  dep[3] << 1, 0, 0, -1;
  for (auto& k : dep) {
    k *= 0.5;
  }
  const DensityOperator q = random_density({2, 1}, rng);
  const ChannelEntropyResult d = channel_entropy(q, dep, quick());
  CHECK(std::abs(d.outputEntropy - 1.0) < 1e-10);
  CHECK(std::abs(d.value) < 1e-9);

  std::vector<ComplexMatrix> bad = {0.5 * ComplexMatrix::Identity(4, 4)};
  CHECK_THROWS_AS(channel_entropy(rho, bad, quick()), InvalidInput);
}

TEST_CASE("invalid solver options") {
  const DensityOperator rho(ComplexMatrix::Identity(4, 4) / 4.0, kQubits);
  RoofOptions o = quick();
  o.restarts = 0;
  CHECK_THROWS_AS(entanglement_number_mixed(rho, o), InvalidParameter);
  o = quick();
  o.tol = 0.0;
  CHECK_THROWS_AS(entanglement_number_mixed(rho, o), InvalidParameter);
  o = quick();
  o.threads = -1;
  CHECK_THROWS_AS(entanglement_number_mixed(rho, o), InvalidParameter);
  CHECK_THROWS_AS(solve_roof({rho, MeasureSpec::p_number(0.5), Direction::Minimize, quick()}), InvalidParameter);
}
