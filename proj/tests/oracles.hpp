#pragma once

// Test-only reference computations. None of these call into the roof solver
// or the measures module; they exist to check those paths independently.

#include "entangle/linalg.hpp"
#include "entangle/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace entangle::oracle {

/// Two-qubit concurrence. With rho = W W^dag over its support (columns
/// sqrt(p_j) e_j), the square roots of the eigenvalues of rho rho~ are the
/// singular values of W^T (Y (x) Y) W, rho~ = (Y (x) Y) rho* (Y (x) Y).
inline double wootters_concurrence(const Eigen::MatrixXcd& rho) {
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
  const double top = es.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < 4; ++i) {
    if (es.eigenvalues()(i) > 1e-12 * top) {
      keep.push_back(i);
    }
  }
  Eigen::MatrixXcd w(4, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    w.col(static_cast<Eigen::Index>(j)) = std::sqrt(es.eigenvalues()(keep[j])) * es.eigenvectors().col(keep[j]);
  }
  const Eigen::MatrixXcd tau = w.transpose() * yy * w;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(tau);
  std::vector<double> l(4, 0.0);
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    l[static_cast<std::size_t>(i)] = svd.singularValues()(i);
  }
  std::sort(l.begin(), l.end(), std::greater<>());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

inline double binary_entropy(double x) {
  auto term = [](double v) { return v > 0.0 ? -v * std::log2(v) : 0.0; };
  return term(x) + term(1.0 - x);
}

/// Two-qubit entanglement of formation (base 2) via the concurrence.
inline double wootters_eof(const Eigen::MatrixXcd& rho) {
  const double c = std::min(1.0, wootters_concurrence(rho));
  return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))));
}

/// Squared Schmidt coefficients by brute-force Hermitian eigensolve of the
/// reduced state on B, formed entry by entry.
inline std::vector<double> reduced_spectrum(const Eigen::VectorXcd& psi, std::size_t dimA, std::size_t dimB) {
  const auto a = static_cast<Eigen::Index>(dimA);
  const auto b = static_cast<Eigen::Index>(dimB);
  Eigen::MatrixXcd red = Eigen::MatrixXcd::Zero(b, b);
  for (Eigen::Index j = 0; j < b; ++j) {
    for (Eigen::Index l = 0; l < b; ++l) {
      for (Eigen::Index i = 0; i < a; ++i) {
        red(j, l) += psi(i * b + j) * std::conj(psi(i * b + l));
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(red, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    out.push_back(std::max(0.0, es.eigenvalues()(i)));
  }
  return out;
}

inline double shannon(const std::vector<double>& p, bool natural = false) {
  double h = 0.0;
  for (const double v : p) {
    if (v > 1e-300) {
      h -= v * (natural ? std::log(v) : std::log2(v));
    }
  }
  return h;
}

/// Brute-force E_{1,1} for a two-qubit state: grid over the Bloch sphere of
/// both local rank-1 projectors followed by coordinate refinement.
inline double geometric_11_grid(const Eigen::VectorXcd& psi) {
  auto ket = [](double theta, double phi) {
    Eigen::Vector2cd v;
    v << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
    return v;
  };
  auto overlap = [&](double t1, double p1, double t2, double p2) {
    const Eigen::Vector2cd a = ket(t1, p1);
    const Eigen::Vector2cd b = ket(t2, p2);
    std::complex<double> s = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        s += std::conj(a(i)) * std::conj(b(j)) * psi(2 * i + j);
      }
    }
    return std::norm(s);
  };
  const double pi = std::acos(-1.0);
  const int n = 24;
  double best = -1.0;
  double x[4] = {0, 0, 0, 0};
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j < 2 * n; ++j) {
      for (int k = 0; k <= n; ++k) {
        for (int l = 0; l < 2 * n; ++l) {
          const double t1 = pi * i / n, p1 = pi * j / n, t2 = pi * k / n, p2 = pi * l / n;
          const double v = overlap(t1, p1, t2, p2);
          if (v > best) {
            best = v;
            x[0] = t1; x[1] = p1; x[2] = t2; x[3] = p2;
          }
        }
      }
    }
  }
  for (double h = pi / n; h > 1e-12; h *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int c = 0; c < 4; ++c) {
        for (const double s : {h, -h}) {
          double y[4] = {x[0], x[1], x[2], x[3]};
          y[c] += s;
          const double v = overlap(y[0], y[1], y[2], y[3]);
          if (v > best) {
            best = v;
            std::copy(y, y + 4, x);
            improved = true;
          }
        }
      }
    }
  }
  return best;
}

/// Random NPT two-qubit state with min partial-transpose eigenvalue below
/// `threshold`, by rejection from mixtures of a random pure entangled state
/// and a random full-rank state.
inline Eigen::MatrixXcd random_npt_two_qubit(Rng& rng, double threshold) {
  const BipartiteDims dims(2, 2);
  for (;;) {
    const auto psi = random_pure_state(dims, rng).amplitudes();
    const auto noise = random_density(dims, rng).matrix();
    std::uniform_real_distribution<double> u(0.3, 1.0);
    const double t = u(rng);
    Eigen::MatrixXcd rho = t * (psi * psi.adjoint()) + (1.0 - t) * noise;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const Eigen::MatrixXcd pt = partial_transpose(rho, dims, Side::B);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pt, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < threshold) {
      return rho;
    }
  }
}

/// Explicit mixture of `count` random product states with random weights.
inline Eigen::MatrixXcd random_separable(const BipartiteDims& dims, Rng& rng, int count) {
  const auto n = static_cast<Eigen::Index>(dims.total());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    const double w = u(rng);
    const auto v = random_product_state(dims, rng).amplitudes();
    rho += w * (v * v.adjoint());
    total += w;
  }
  rho /= total;
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace entangle::oracle
