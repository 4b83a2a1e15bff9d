#include "entangle/roof.hpp"

#include "entangle/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace entangle {

ComplexMatrix Ensemble::mixture() const {
  if (states.empty()) {
    return {};
  }
  const auto n = states.front().amplitudes().size();
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& a = states[i].amplitudes();
    m.noalias() += weights(static_cast<Eigen::Index>(i)) * (a * a.adjoint());
  }
  return m;
}

double Ensemble::reconstruction_error(const DensityOperator& rho) const {
  const ComplexMatrix diff = mixture() - rho.matrix();
  return trace_norm(0.5 * (diff + diff.adjoint()));
}

double Ensemble::average(const MeasureSpec& spec) const {
  double total = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    total += weights(static_cast<Eigen::Index>(i)) * evaluate(spec, states[i]);
  }
  return total;
}

Eigenbasis spectral_support(const DensityOperator& rho) {
  const EigenSystem es = eigh(rho.matrix());
  const auto r = static_cast<Eigen::Index>(numerical_rank(es.values));
  return {es.values.head(r), es.vectors.leftCols(r)};
}

namespace {

constexpr double kDropWeight = 1e-14;

// Rows of V times this matrix are the unnormalized ensemble members:
// row j is sqrt(p_j) e_j^T.
ComplexMatrix member_generator(const Eigenbasis& support) {
  return support.weights.cwiseSqrt().asDiagonal() * support.basis.transpose();
}

Ensemble ensemble_from_members(const ComplexMatrix& members, const BipartiteDims& dims) {
  Ensemble e;
  std::vector<double> w;
  for (Eigen::Index i = 0; i < members.rows(); ++i) {
    const ComplexVector chi = members.row(i).transpose();
    const double n2 = chi.squaredNorm();
    if (n2 < kDropWeight) {
      continue;
    }
    w.push_back(n2);
    e.states.push_back(PureState::normalized(chi, dims));
  }
  e.weights = Eigen::Map<const RealVector>(w.data(), static_cast<Eigen::Index>(w.size()));
  // The dropped rows carry at most m * 1e-14 of the weight.
  e.weights /= e.weights.sum();
  return e;
}

void check_isometry(const ComplexMatrix& v, std::size_t rank) {
  if (static_cast<std::size_t>(v.cols()) != rank) {
    throw InvalidParameter("isometry must have rank(rho) = " + std::to_string(rank) + " columns, got " +
                           std::to_string(v.cols()));
  }
  if (v.rows() < v.cols()) {
    throw InvalidParameter("ensemble size m must be >= rank(rho)");
  }
  const double residual =
      (v.adjoint() * v - ComplexMatrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    throw InvalidParameter("matrix is not an isometry: max |V^dag V - I| = " + std::to_string(residual));
  }
}

double real_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

// Projection onto the tangent space of the complex Stiefel manifold at V
// under the metric Re tr(A^dag B).
ComplexMatrix project_tangent(const ComplexMatrix& v, const ComplexMatrix& z) {
  const ComplexMatrix vz = v.adjoint() * z;
  return z - v * (0.5 * (vz + vz.adjoint()));
}

class StiefelDescent {
public:
  StiefelDescent(const ComplexMatrix& generator, const PureObjective& objective, double sign,
                 const RoofOptions& opts)
      : gen_(generator), objective_(objective), sign_(sign), opts_(opts) {}

  struct Outcome {
    ComplexMatrix v;
    double value = 0.0;  // in minimization sign
    std::vector<double> trace;
    RestartSummary summary;
  };

  Outcome run(ComplexMatrix v, Rng& rng) const {
    Outcome out;
    double f = total(v);
    ComplexMatrix best = v;
    double bestF = f;
    out.trace.push_back(sign_ * bestF);

    ComplexMatrix xi = riemannian_gradient(v);
    ComplexMatrix dir = -xi;
    double step = 0.5;
    int stalls = 0;
    int it = 0;
    for (; it < opts_.maxIters; ++it) {
      const double g2 = real_inner(xi, xi);
      if (g2 < 1e-24) {
        out.summary.converged = true;
        break;
      }
      double slope = real_inner(xi, dir);
      if (!(slope < 0.0)) {
        dir = -xi;
        slope = -g2;
      }

      double trial = std::min(2.0 * step, 4.0);
      bool accepted = false;
      ComplexMatrix next;
      double nextF = 0.0;
      while (trial > 1e-14) {
        next = orthonormalize_columns(v + trial * dir);
        nextF = total(next);
        if (nextF <= f + 1e-4 * trial * slope) {
          accepted = true;
          break;
        }
        trial *= 0.5;
      }

      if (accepted) {
        stalls = 0;
        step = trial;
        v = std::move(next);
        f = nextF;
        const ComplexMatrix xiNew = riemannian_gradient(v);
        // Polak-Ribiere+ with transport by projection.
        const ComplexMatrix xiOld = project_tangent(v, xi);
        const double beta = std::max(0.0, real_inner(xiNew, xiNew - xiOld) / std::max(g2, 1e-300));
        dir = -xiNew + beta * project_tangent(v, dir);
        xi = xiNew;
      } else {
        // Stalled line search: typically a kink of the measure (degenerate
        // Schmidt values) or finite-difference noise. Kick and restart CG.
        ++stalls;
        ++out.summary.perturbations;
        if (stalls > 5) {
          out.summary.converged = true;
          break;
        }
        const ComplexMatrix noise = project_tangent(v, ginibre(v.rows(), v.cols(), rng));
        v = orthonormalize_columns(v + 1e-10 * noise / std::max(noise.norm(), 1e-300));
        f = total(v);
        xi = riemannian_gradient(v);
        dir = -xi;
        step = 0.5;
      }

      if (f < bestF) {
        bestF = f;
        best = v;
      }
      out.trace.push_back(sign_ * bestF);
      const auto n = static_cast<int>(out.trace.size());
      if (n > opts_.stallWindow &&
          std::abs(out.trace[static_cast<std::size_t>(n - 1 - opts_.stallWindow)] - out.trace.back()) < opts_.tol) {
        out.summary.converged = true;
        ++it;
        break;
      }
    }
    out.v = std::move(best);
    out.value = bestF;
    out.summary.iterations = it;
    out.summary.value = sign_ * bestF;
    return out;
  }

  // Signed objective of one unnormalized member.
  double term(const ComplexVector& chi) const {
    const double n2 = chi.squaredNorm();
    if (!(n2 > 0.0)) {
      return 0.0;
    }
    scratch_ = chi / std::sqrt(n2);
    return sign_ * n2 * objective_(scratch_);
  }

  double total(const ComplexMatrix& v) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      chi_.noalias() = (v.row(i) * gen_).transpose();
      s += term(chi_);
    }
    return s;
  }

  // Euclidean gradient by central differences on the real and imaginary part
  // of every entry of V, projected to the tangent space. Perturbing V_ij only
  // moves member i, so only that member is re-evaluated.
  ComplexMatrix riemannian_gradient(const ComplexMatrix& v) const {
    const double h = opts_.fdStep;
    ComplexMatrix g(v.rows(), v.cols());
    ComplexVector base(gen_.cols());
    ComplexVector shifted(gen_.cols());
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      base.noalias() = (v.row(i) * gen_).transpose();
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const auto row = gen_.row(j).transpose();
        shifted = base + h * row;
        const double rp = term(shifted);
        shifted = base - h * row;
        const double rm = term(shifted);
        shifted = base + Scalar(0.0, h) * row;
        const double ip = term(shifted);
        shifted = base - Scalar(0.0, h) * row;
        const double im = term(shifted);
        g(i, j) = Scalar((rp - rm) / (2.0 * h), (ip - im) / (2.0 * h));
      }
    }
    return project_tangent(v, g);
  }

private:
  const ComplexMatrix& gen_;
  const PureObjective& objective_;
  double sign_;
  const RoofOptions& opts_;
  mutable ComplexVector chi_;
  mutable ComplexVector scratch_;
};

void validate_options(const RoofOptions& o) {
  if (o.restarts < 1) throw InvalidParameter("restarts must be >= 1");
  if (o.maxIters < 1) throw InvalidParameter("maxIters must be >= 1");
  if (!(o.tol > 0.0)) throw InvalidParameter("tol must be > 0");
  if (!(o.fdStep > 0.0)) throw InvalidParameter("finite-difference step must be > 0");
  if (o.stallWindow < 1) throw InvalidParameter("stall window must be >= 1");
  if (o.threads < 0) throw InvalidParameter("threads must be >= 0");
}

}  // namespace

Ensemble ensemble_from_isometry(const DensityOperator& rho, const ComplexMatrix& v) {
  const Eigenbasis support = spectral_support(rho);
  check_isometry(v, support.rank());
  return ensemble_from_members(v * member_generator(support), rho.dims());
}

RoofResult solve_roof_functional(const DensityOperator& rho, const PureObjective& objective, Direction direction,
                                 const RoofOptions& options) {
  validate_options(options);
  const Eigenbasis support = spectral_support(rho);
  const auto r = static_cast<int>(support.rank());
  if (r < 1) {
    throw InvalidInput("density operator has numerical rank 0");
  }
  const int m = options.ensembleSize.value_or(r * r);
  if (m < r || m > r * r) {
    throw InvalidParameter("ensemble size m = " + std::to_string(m) + " must satisfy rank <= m <= rank^2 (rank = " +
                           std::to_string(r) + ")");
  }
  const ComplexMatrix gen = member_generator(support);
  const double sign = direction == Direction::Minimize ? 1.0 : -1.0;

  std::vector<StiefelDescent::Outcome> outcomes(static_cast<std::size_t>(options.restarts));
  auto runOne = [&](int index) {
    Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(index)));
    const StiefelDescent descent(gen, objective, sign, options);
    if (!options.compactWarmStart || index % 2 != 0 || m == r) {
      outcomes[static_cast<std::size_t>(index)] = descent.run(random_isometry(m, r, rng), rng);
      return;
    }
    // Descend over r-member ensembles first, then widen to m members.
    StiefelDescent::Outcome compact = descent.run(random_unitary(r, rng), rng);
    ComplexMatrix padded = ComplexMatrix::Zero(m, r);
    padded.topRows(r) = compact.v;
    StiefelDescent::Outcome wide =
        descent.run(orthonormalize_columns(padded + 1e-3 * ginibre(m, r, rng)), rng);
    StiefelDescent::Outcome merged;
    merged.trace = std::move(compact.trace);
    for (const double x : wide.trace) {
      merged.trace.push_back(sign * std::min(sign * merged.trace.back(), sign * x));
    }
    merged.summary = wide.summary;
    merged.summary.iterations += compact.summary.iterations;
    merged.summary.perturbations += compact.summary.perturbations;
    if (compact.value < wide.value) {
      merged.v = padded;
      merged.value = compact.value;
      merged.summary.value = compact.summary.value;
    } else {
      merged.v = std::move(wide.v);
      merged.value = wide.value;
    }
    outcomes[static_cast<std::size_t>(index)] = std::move(merged);
  };

  int workers = options.threads == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                                     : options.threads;
  workers = std::min(workers, options.restarts);
  if (workers <= 1) {
    for (int i = 0; i < options.restarts; ++i) {
      runOne(i);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < options.restarts; i = next++) {
          runOne(i);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  // Deterministic reduction: lowest signed value, ties to the lower index.
  std::size_t bestIdx = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i) {
    if (outcomes[i].value < outcomes[bestIdx].value) {
      bestIdx = i;
    }
  }
  double second = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (i != bestIdx) {
      second = std::min(second, outcomes[i].value);
    }
  }

  RoofResult res;
  auto& best = outcomes[bestIdx];
  res.ensemble = ensemble_from_members(best.v * gen, rho.dims());
  double value = 0.0;
  for (std::size_t i = 0; i < res.ensemble.size(); ++i) {
    value += res.ensemble.weights(static_cast<Eigen::Index>(i)) * objective(res.ensemble.states[i].amplitudes());
  }
  res.value = value;
  res.objectiveTrace = std::move(best.trace);
  res.converged = best.summary.converged;
  res.gapEstimate = std::isfinite(second) ? std::abs(second - best.value) : 0.0;
  res.bestRestart = static_cast<int>(bestIdx);
  res.ensembleSize = static_cast<std::size_t>(m);
  res.perturbations = best.summary.perturbations;
  res.restarts.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    res.restarts.push_back(o.summary);
  }
  return res;
}

RoofResult solve_roof(const RoofProblem& problem) {
  const BipartiteDims dims = problem.rho.dims();
  problem.measure.validate(dims);
  const MeasureSpec spec = problem.measure;
  const PureObjective objective = [spec, dims](const ComplexVector& unit) {
    return measure_from_spectrum(spec, schmidt_spectrum(unit, dims), dims);
  };
  return solve_roof_functional(problem.rho, objective, problem.direction, problem.options);
}

RoofResult concave_roof(RoofProblem problem) {
  problem.direction = Direction::Maximize;
  return solve_roof(problem);
}

RoofResult entanglement_number_mixed(const DensityOperator& rho, const RoofOptions& options) {
  return solve_roof(RoofProblem{rho, MeasureSpec::entanglement_number(), Direction::Minimize, options});
}

double kraus_completeness_residual(const std::vector<ComplexMatrix>& kraus) {
  if (kraus.empty()) {
    throw InvalidInput("empty Kraus set");
  }
  const auto n = kraus.front().cols();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& k : kraus) {
    if (k.cols() != n) {
      throw DimensionMismatch("Kraus operators act on spaces of different dimension");
    }
    sum.noalias() += k.adjoint() * k;
  }
  return (sum - ComplexMatrix::Identity(n, n)).norm();
}

ComplexMatrix apply_channel(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& rho) {
  if (kraus.empty()) {
    throw InvalidInput("empty Kraus set");
  }
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) {
    if (k.cols() != rho.rows() || k.rows() != out.rows()) {
      throw DimensionMismatch("Kraus operator shape does not match the state");
    }
    out.noalias() += k * rho * k.adjoint();
  }
  return out;
}

ChannelEntropyResult channel_entropy(const DensityOperator& rho, const std::vector<ComplexMatrix>& kraus,
                                     const RoofOptions& options, LogBase base) {
  const double residual = kraus_completeness_residual(kraus);
  if (residual > 1e-10) {
    throw InvalidInput("invalid Kraus set: ||sum K^dag K - I|| = " + std::to_string(residual));
  }
  if (kraus.front().cols() != rho.matrix().rows()) {
    throw DimensionMismatch("Kraus operators do not act on the state's space");
  }
  auto entropyOut = [&](const ComplexMatrix& m) {
    const ComplexMatrix out = apply_channel(kraus, m);
    return von_neumann_entropy(0.5 * (out + out.adjoint()), base);
  };
  ChannelEntropyResult res;
  res.outputEntropy = entropyOut(rho.matrix());
  const PureObjective objective = [&](const ComplexVector& unit) {
    return entropyOut(unit * unit.adjoint());
  };
  res.roof = solve_roof_functional(rho, objective, Direction::Minimize, options);
  res.value = res.outputEntropy - res.roof.value;
  return res;
}

}  // namespace entangle
