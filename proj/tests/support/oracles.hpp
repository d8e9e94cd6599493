// Independent reference computations shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "nhtdse/schedule.hpp"

namespace oracle {

using nhtdse::cplx;
using nhtdse::Matrix;
using nhtdse::Vector;

inline Matrix expm(const Matrix& a) { return a.exp(); }

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = scale * cplx(u(rng), u(rng));
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(u(rng), u(rng));
  return v;
}

inline Matrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

// Hermitian PD with eigenvalues in [lo, hi].
inline Matrix random_pd(std::mt19937_64& rng, Eigen::Index n, double lo = 0.2, double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  const Matrix q = random_unitary(rng, n);
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = u(rng);
  return q * d.cast<cplx>().asDiagonal() * q.adjoint();
}

// H = V diag(E) V^-1 with a random well-conditioned V.
inline Matrix random_nh(std::mt19937_64& rng, Eigen::Index n, double im_scale = 0.3) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Matrix v = Matrix::Identity(n, n) + random_matrix(rng, n, 0.4 / std::sqrt(double(n)));
  Vector e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = cplx(double(i) + 0.3 * u(rng), im_scale * u(rng));
  return v * e.asDiagonal() * v.inverse();
}

// Random real-spectrum pseudo-hermitian H = S K S^-1 with K hermitian.
inline Matrix random_real_spectrum(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix k = random_matrix(rng, n);
  const Matrix s = Matrix::Identity(n, n) + random_matrix(rng, n, 0.4 / std::sqrt(double(n)));
  return s * (0.5 * (k + k.adjoint())) * s.inverse();
}

// Smooth NH schedule H(t) = V(t) diag(E(t)) V(t)^-1 with separated,
// slowly moving eigenvalues and a well-conditioned eigenvector matrix.
struct SmoothNh {
  Matrix v0, v1, v2;
  std::vector<cplx> e0;
  std::vector<double> amp, freq, phase;
  double omega1 = 0, omega2 = 0;

  Matrix operator()(double t) const {
    const Eigen::Index n = v0.rows();
    const Matrix v = v0 + std::sin(omega1 * t) * v1 + std::cos(omega2 * t) * v2;
    Matrix ve = v;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      ve.col(i) *= e0[k] + amp[k] * std::sin(freq[k] * t + phase[k]);
    }
    // H = V E V^-1, i.e. H^T = V^-T (V E)^T
    return v.transpose().partialPivLu().solve(ve.transpose()).transpose();
  }
};

inline SmoothNh random_smooth_nh(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SmoothNh s;
  const double sc = 1.0 / std::sqrt(double(n));
  s.v0 = Matrix::Identity(n, n) + random_matrix(rng, n, 0.35 * sc);
  s.v1 = random_matrix(rng, n, 0.15 * sc);
  s.v2 = random_matrix(rng, n, 0.15 * sc);
  s.omega1 = 0.5 + 0.5 * std::abs(u(rng));
  s.omega2 = 0.3 + 0.5 * std::abs(u(rng));
  for (Eigen::Index i = 0; i < n; ++i) {
    s.e0.emplace_back(double(i) + 0.1 * u(rng), 0.1 * u(rng));
    s.amp.push_back(0.2 * std::abs(u(rng)));
    s.freq.push_back(0.2 + 0.6 * std::abs(u(rng)));
    s.phase.push_back(3.0 * u(rng));
  }
  return s;
}

// Fermions on `sites` modes in a fixed particle-number sector, bit j = site j.
class FockChain {
 public:
  FockChain(int sites, int particles) : sites_(sites) {
    for (std::uint32_t s = 0; s < (1u << sites); ++s)
      if (__builtin_popcount(s) == particles) {
        index_[s] = static_cast<int>(basis_.size());
        basis_.push_back(s);
      }
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(basis_.size()); }

  // f+_i f_j |s>, returns false when it vanishes.
  bool hop(std::uint32_t s, int i, int j, std::uint32_t& out, double& sign) const {
    if (!(s >> j & 1u)) return false;
    sign = parity_below(s, j);
    std::uint32_t mid = s & ~(1u << j);
    if (mid >> i & 1u) return false;
    sign *= parity_below(mid, i);
    out = mid | (1u << i);
    return true;
  }

  Matrix hamiltonian(const std::vector<double>& t) const {
    Matrix h = Matrix::Zero(size(), size());
    for (Eigen::Index c = 0; c < size(); ++c) {
      const std::uint32_t s = basis_[static_cast<std::size_t>(c)];
      for (int l = 0; l + 1 < sites_; ++l) {
        for (auto [i, j] : {std::pair{l + 1, l}, std::pair{l, l + 1}}) {
          std::uint32_t o;
          double sg;
          if (hop(s, i, j, o, sg)) h(index_.at(o), c) += t[static_cast<std::size_t>(l)] * sg;
        }
      }
    }
    return h;
  }

  Vector ground_state(const std::vector<double>& t) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian(t));
    return es.eigenvectors().col(0);
  }

  // <psi| a+_l a_m |psi> with a_x = f_x exp(i theta sum_{j in str(x)} n_j)
  // where str(x) are the earlier sites of x's segment (seg[j] labels sites).
  cplx anyon_correlator(const Vector& psi, int l, int m, double theta, const std::vector<int>& seg) const {
    cplx acc = 0;
    for (Eigen::Index c = 0; c < size(); ++c) {
      const std::uint32_t s = basis_[static_cast<std::size_t>(c)];
      std::uint32_t o;
      double sg;
      if (!hop(s, l, m, o, sg)) continue;
      // exp(i theta N_str(m)) acts first on |s>, exp(-i theta N_str(l)) last on |o>.
      const cplx ph = std::exp(cplx(0, theta * (string_count(s, m, seg) - string_count(o, l, seg))));
      acc += std::conj(psi(index_.at(o))) * sg * ph * psi(c);
    }
    return acc;
  }

  cplx fermion_correlator(const Vector& psi, int l, int m) const {
    return anyon_correlator(psi, l, m, 0.0, std::vector<int>(static_cast<std::size_t>(sites_), 0));
  }

 private:
  static double parity_below(std::uint32_t s, int j) {
    return (__builtin_popcount(s & ((1u << j) - 1u)) % 2) ? -1.0 : 1.0;
  }
  static double string_count(std::uint32_t s, int x, const std::vector<int>& seg) {
    int n = 0;
    for (int j = 0; j < x; ++j)
      if (seg[static_cast<std::size_t>(j)] == seg[static_cast<std::size_t>(x)] && (s >> j & 1u)) ++n;
    return n;
  }

  int sites_;
  std::vector<std::uint32_t> basis_;
  std::unordered_map<std::uint32_t, int> index_;
};

}  // namespace oracle
