#include "entangle/measures.hpp"

#include "entangle/random.hpp"

#include <algorithm>
#include <cmath>

namespace entangle {

double log_in_base(double x, LogBase base) {
  return base == LogBase::Two ? std::log2(x) : std::log(x);
}

MeasureSpec MeasureSpec::p_number(double p) {
  MeasureSpec s;
  s.kind = MeasureKind::PNumber;
  s.p = p;
  return s;
}

MeasureSpec MeasureSpec::entropy(LogBase base) {
  MeasureSpec s;
  s.kind = MeasureKind::EntanglementEntropy;
  s.logBase = base;
  return s;
}

MeasureSpec MeasureSpec::negativity() {
  MeasureSpec s;
  s.kind = MeasureKind::Negativity;
  return s;
}

MeasureSpec MeasureSpec::concurrence(int k) {
  MeasureSpec s;
  s.kind = MeasureKind::Concurrence;
  s.k = k;
  return s;
}

MeasureSpec MeasureSpec::geometric(std::vector<int> ranks) {
  MeasureSpec s;
  s.kind = MeasureKind::GeometricMeasure;
  s.ranks = std::move(ranks);
  return s;
}

MeasureSpec MeasureSpec::cirone_nu(double p) {
  MeasureSpec s;
  s.kind = MeasureKind::CironeNu;
  s.p = p;
  return s;
}

namespace {

void require_p(const std::optional<double>& p, const char* who) {
  if (!p) {
    throw InvalidParameter(std::string(who) + " requires parameter p");
  }
  if (!(*p > 1.0) || !std::isfinite(*p)) {
    throw InvalidParameter(std::string(who) + ": p must satisfy 1 < p < inf, got " + std::to_string(*p));
  }
}

void require_k(int k, std::size_t d) {
  if (k < 1 || static_cast<std::size_t>(k) > d) {
    throw InvalidParameter("concurrence: k must lie in [1, " + std::to_string(d) + "], got " + std::to_string(k));
  }
}

void require_ranks(int rankA, int rankB, const BipartiteDims& dims) {
  if (rankA < 1 || static_cast<std::size_t>(rankA) > dims.dimA || rankB < 1 ||
      static_cast<std::size_t>(rankB) > dims.dimB) {
    throw InvalidParameter("geometric measure: ranks (" + std::to_string(rankA) + "," + std::to_string(rankB) +
                           ") out of range for dims (" + std::to_string(dims.dimA) + "," +
                           std::to_string(dims.dimB) + ")");
  }
}

RealVector spectrum_of(const PureState& psi) { return schmidt_spectrum(psi.amplitudes(), psi.dims()); }

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void MeasureSpec::validate(const BipartiteDims& dims) const {
  const bool needsP = kind == MeasureKind::PNumber || kind == MeasureKind::CironeNu;
  if (needsP) {
    require_p(p, name().c_str());
  } else if (p) {
    throw InvalidParameter(name() + " does not take parameter p");
  }
  if (kind == MeasureKind::Concurrence) {
    if (!k) {
      throw InvalidParameter("concurrence requires parameter k");
    }
    require_k(*k, dims.schmidtBound());
  } else if (k) {
    throw InvalidParameter(name() + " does not take parameter k");
  }
  if (kind == MeasureKind::GeometricMeasure) {
    if (ranks.size() != 2) {
      throw InvalidParameter("geometric measure requires exactly two ranks (bipartite)");
    }
    require_ranks(ranks[0], ranks[1], dims);
  } else if (!ranks.empty()) {
    throw InvalidParameter(name() + " does not take ranks");
  }
  if (kind == MeasureKind::Negativity && dims.schmidtBound() < 2) {
    throw InvalidParameter("negativity: min(dimA, dimB) must be >= 2");
  }
}

bool MeasureSpec::increasing() const {
  const bool base = kind == MeasureKind::GeometricMeasure;
  return complement ? !base : base;
}

std::string MeasureSpec::name() const {
  switch (kind) {
    case MeasureKind::EntanglementNumber: return "e";
    case MeasureKind::PNumber: return "p-number";
    case MeasureKind::EntanglementEntropy: return "entropy";
    case MeasureKind::Negativity: return "negativity";
    case MeasureKind::Concurrence: return "concurrence";
    case MeasureKind::GeometricMeasure: return "geometric";
    case MeasureKind::CironeNu: return "nu";
  }
  return "?";
}

MeasureKind parse_measure_kind(const std::string& name) {
  if (name == "e" || name == "entanglement-number") return MeasureKind::EntanglementNumber;
  if (name == "p-number") return MeasureKind::PNumber;
  if (name == "entropy" || name == "S") return MeasureKind::EntanglementEntropy;
  if (name == "negativity") return MeasureKind::Negativity;
  if (name == "concurrence") return MeasureKind::Concurrence;
  if (name == "geometric") return MeasureKind::GeometricMeasure;
  if (name == "nu") return MeasureKind::CironeNu;
  throw InvalidParameter("unknown measure '" + name + "'");
}

double trace_abs_pow4(const ComplexMatrix& c) {
  const ComplexMatrix g = c.adjoint() * c;
  // Tr(G^2) = sum |G_ij|^2 for Hermitian G.
  return g.squaredNorm();
}

double column_overlap_sum(const ComplexMatrix& c) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < c.cols(); ++r) {
    for (Eigen::Index s = 0; s < c.cols(); ++s) {
      total += std::norm(c.col(r).dot(c.col(s)));
    }
  }
  return total;
}

double power_sum(const RealVector& lambdas, double p) {
  double total = 0.0;
  for (const double l : lambdas) {
    if (l > 0.0) {
      total += std::pow(l, p);
    }
  }
  return total;
}

double elementary_symmetric(const RealVector& x, int k) {
  if (k < 0) {
    return 0.0;
  }
  // e[j] holds S_j of the prefix processed so far.
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (const double v : x) {
    for (int j = k; j >= 1; --j) {
      e[static_cast<std::size_t>(j)] += v * e[static_cast<std::size_t>(j - 1)];
    }
  }
  return e[static_cast<std::size_t>(k)];
}

double purity_deficit_root(const ComplexMatrix& rho) {
  return std::sqrt(std::max(0.0, 1.0 - rho.squaredNorm()));
}

double schatten_deficit_root(const ComplexMatrix& rho, double p) {
  require_p(p, "f_p");
  RealVector w = eigvalsh(rho);
  apply_rank_threshold(w);
  return std::pow(std::max(0.0, 1.0 - power_sum(w, p)), 1.0 / p);
}

double von_neumann_entropy(const ComplexMatrix& rho, LogBase base) {
  RealVector w = eigvalsh(rho);
  apply_rank_threshold(w);
  double h = 0.0;
  for (const double l : w) {
    if (l > 0.0) {
      h -= l * log_in_base(l, base);
    }
  }
  return std::max(0.0, h);
}

double entanglement_number_pure(const PureState& psi) {
  const ComplexMatrix c = reshape_to_coefficient_matrix(psi);
  return std::sqrt(std::max(0.0, 1.0 - trace_abs_pow4(c)));
}

double entanglement_number_reduced_route(const PureState& psi) {
  const ComplexMatrix proj = psi.amplitudes() * psi.amplitudes().adjoint();
  return purity_deficit_root(partial_trace(proj, psi.dims(), Side::A));
}

double entanglement_number_schmidt_route(const PureState& psi) {
  const SchmidtDecomposition sd = schmidt(psi);
  return std::sqrt(std::max(0.0, 1.0 - sd.lambdas.squaredNorm()));
}

double p_number_pure(const PureState& psi, double p) {
  return measure_from_spectrum(MeasureSpec::p_number(p), spectrum_of(psi), psi.dims());
}

double entanglement_entropy_pure(const PureState& psi, LogBase base) {
  return measure_from_spectrum(MeasureSpec::entropy(base), spectrum_of(psi), psi.dims());
}

double negativity_pure(const PureState& psi) {
  return measure_from_spectrum(MeasureSpec::negativity(), spectrum_of(psi), psi.dims());
}

double negativity_trace_norm_route(const PureState& psi) {
  const std::size_t d = psi.dims().schmidtBound();
  if (d < 2) {
    throw InvalidParameter("negativity: min(dimA, dimB) must be >= 2");
  }
  const ComplexMatrix proj = psi.amplitudes() * psi.amplitudes().adjoint();
  const ComplexMatrix pt = partial_transpose(proj, psi.dims(), Side::B);
  return (trace_norm(pt) - 1.0) / static_cast<double>(d - 1);
}

double concurrence_pure(const PureState& psi, int k) {
  return measure_from_spectrum(MeasureSpec::concurrence(k), spectrum_of(psi), psi.dims());
}

double cirone_nu_pure(const PureState& psi, double p) {
  return measure_from_spectrum(MeasureSpec::cirone_nu(p), spectrum_of(psi), psi.dims());
}

namespace {

// Projector onto the span of the top-k left singular vectors of m, and the
// captured weight sum of the top-k squared singular values.
double top_left_projector(const ComplexMatrix& m, int k, ComplexMatrix& proj) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU);
  const ComplexMatrix u = svd.matrixU().leftCols(k);
  proj = u * u.adjoint();
  return svd.singularValues().head(k).squaredNorm();
}

}  // namespace

GeometricResult geometric_measure_alternating(const PureState& psi, int rankA, int rankB,
                                              const AlternatingOptions& opts) {
  require_ranks(rankA, rankB, psi.dims());
  const ComplexMatrix c = reshape_to_coefficient_matrix(psi);
  const auto a = c.rows();
  const auto b = c.cols();
  Rng rng(opts.seed);
  GeometricResult best;
  best.value = -1.0;
  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    // (P (x) Q) psi reshapes to P C Q^T; R := Q^T is again a rank-k2 projector.
    const ComplexMatrix w = random_isometry(b, rankB, rng);
    ComplexMatrix r = w * w.adjoint();
    ComplexMatrix p(a, a);
    double value = -1.0;
    int it = 0;
    for (; it < opts.maxIters; ++it) {
      top_left_projector(c * r, rankA, p);
      ComplexMatrix rt;
      const double next = top_left_projector((p * c).adjoint(), rankB, rt);
      // Right singular vectors of P C are left singular vectors of (P C)^dag,
      // and the resulting projector is R^dag = R (Hermitian).
      r = rt;
      const bool stalled = next - value <= opts.tol;
      value = std::max(value, next);
      if (stalled) {
        break;
      }
    }
    if (value > best.value) {
      best.value = value;
      best.projectorA = p;
      best.projectorB = r.transpose();
      best.iterations = it;
    }
  }
  best.value = clamp01(best.value);
  return best;
}

double geometric_measure_schmidt(const PureState& psi, int rankA, int rankB) {
  require_ranks(rankA, rankB, psi.dims());
  return measure_from_spectrum(MeasureSpec::geometric({rankA, rankB}), spectrum_of(psi), psi.dims());
}

double geometric_measure_pure(const PureState& psi, const std::vector<int>& ranks) {
  if (ranks.size() != 2) {
    throw InvalidParameter("geometric measure requires exactly two ranks (bipartite)");
  }
  if (ranks[0] == ranks[1]) {
    return geometric_measure_schmidt(psi, ranks[0], ranks[1]);
  }
  return geometric_measure_alternating(psi, ranks[0], ranks[1]).value;
}

double measure_sup(const MeasureSpec& spec, const BipartiteDims& dims) {
  const auto d = static_cast<double>(dims.schmidtBound());
  switch (spec.kind) {
    case MeasureKind::EntanglementNumber: return std::sqrt(1.0 - 1.0 / d);
    case MeasureKind::PNumber: return std::pow(1.0 - std::pow(d, 1.0 - *spec.p), 1.0 / *spec.p);
    case MeasureKind::CironeNu: return 1.0 - std::pow(d, 1.0 - *spec.p);
    case MeasureKind::EntanglementEntropy: return log_in_base(d, spec.logBase);
    case MeasureKind::Negativity:
    case MeasureKind::Concurrence:
    case MeasureKind::GeometricMeasure: return 1.0;
  }
  return 1.0;
}

double measure_from_spectrum(const MeasureSpec& spec, const RealVector& lambdas, const BipartiteDims& dims) {
  double value = 0.0;
  switch (spec.kind) {
    case MeasureKind::EntanglementNumber:
      value = std::sqrt(std::max(0.0, 1.0 - lambdas.squaredNorm()));
      break;
    case MeasureKind::PNumber: {
      require_p(spec.p, "p-number");
      const double p = *spec.p;
      value = std::pow(std::max(0.0, 1.0 - power_sum(lambdas, p)), 1.0 / p);
      break;
    }
    case MeasureKind::CironeNu:
      require_p(spec.p, "nu");
      value = std::max(0.0, 1.0 - power_sum(lambdas, *spec.p));
      break;
    case MeasureKind::EntanglementEntropy: {
      double h = 0.0;
      for (const double l : lambdas) {
        if (l > 0.0) {
          h -= l * log_in_base(l, spec.logBase);
        }
      }
      value = std::max(0.0, h);
      break;
    }
    case MeasureKind::Negativity: {
      const std::size_t d = dims.schmidtBound();
      if (d < 2) {
        throw InvalidParameter("negativity: min(dimA, dimB) must be >= 2");
      }
      const double root = lambdas.cwiseMax(0.0).cwiseSqrt().sum();
      value = std::max(0.0, (root * root - 1.0) / static_cast<double>(d - 1));
      break;
    }
    case MeasureKind::Concurrence: {
      const std::size_t d = dims.schmidtBound();
      if (!spec.k) {
        throw InvalidParameter("concurrence requires parameter k");
      }
      const int k = *spec.k;
      require_k(k, d);
      RealVector padded = RealVector::Zero(static_cast<Eigen::Index>(d));
      padded.head(std::min<Eigen::Index>(lambdas.size(), padded.size())) =
          lambdas.head(std::min<Eigen::Index>(lambdas.size(), padded.size()));
      const double sk = elementary_symmetric(padded, k);
      const double norm = elementary_symmetric(RealVector::Constant(static_cast<Eigen::Index>(d), 1.0 / static_cast<double>(d)), k);
      value = std::pow(std::max(0.0, sk / norm), 1.0 / static_cast<double>(k));
      break;
    }
    case MeasureKind::GeometricMeasure: {
      if (spec.ranks.size() != 2) {
        throw InvalidParameter("geometric measure requires exactly two ranks (bipartite)");
      }
      require_ranks(spec.ranks[0], spec.ranks[1], dims);
      const auto top = std::min<Eigen::Index>(std::min(spec.ranks[0], spec.ranks[1]), lambdas.size());
      value = clamp01(lambdas.head(top).sum());
      break;
    }
  }
  if (spec.complement) {
    MeasureSpec plain = spec;
    plain.complement = false;
    return measure_sup(plain, dims) - value;
  }
  return value;
}

double evaluate(const MeasureSpec& spec, const PureState& psi) {
  return measure_from_spectrum(spec, spectrum_of(psi), psi.dims());
}

}  // namespace entangle
