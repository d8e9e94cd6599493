#include "nhtdse/biortho.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "nhtdse/errors.hpp"

namespace nhtdse {

namespace {

using Index = Eigen::Index;

// Eigenvalues closer than this (relative to the spectral scale) are treated
// as one degenerate eigenspace.
constexpr double kDegenerateRelTol = 1e-9;
constexpr double kPhaseAnchorTol = 1e-10;

void fix_phase(Eigen::Ref<Vector> v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > kPhaseAnchorTol) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      return;
    }
  }
}

// Groups indices of a sorted spectrum into clusters of (numerically) equal
// eigenvalues. Union-find over all pairs, since sorting by (Re, Im) need not
// place near-equal values next to each other.
std::vector<std::vector<Index>> degenerate_clusters(const Vector& evals) {
  const Index n = evals.size();
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(evals(i) - evals(j)) <= kDegenerateRelTol * scale) parent[find(j)] = find(i);
    }
  }
  std::vector<std::vector<Index>> clusters;
  std::vector<Index> slot(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Index>(clusters.size());
      clusters.emplace_back();
    }
    clusters[slot[root]].push_back(i);
  }
  return clusters;
}

}  // namespace

BiorthoBasis eig_biortho(const Matrix& h, double tol) {
  require_square(h, "Hamiltonian");
  require_finite(h, "Hamiltonian");
  const Index n = h.rows();

  Vector evals;
  Matrix vecs;
  if (is_hermitian(h, 1e-14)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
    evals = es.eigenvalues().cast<cplx>();
    vecs = es.eigenvectors();
  } else {
    Eigen::ComplexEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) {
      throw NumericalError(ErrorKind::Defective, "complex eigensolver did not converge");
    }
    evals = es.eigenvalues();
    vecs = es.eigenvectors();
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::make_tuple(evals(a).real(), evals(a).imag()) <
           std::make_tuple(evals(b).real(), evals(b).imag());
  });

  BiorthoBasis basis;
  basis.eigenvalues.resize(n);
  basis.right.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    basis.eigenvalues(k) = evals(order[k]);
    basis.right.col(k) = vecs.col(order[k]).normalized();
  }

  for (const auto& cluster : degenerate_clusters(basis.eigenvalues)) {
    if (cluster.size() < 2) continue;
    const auto k = static_cast<Index>(cluster.size());
    Matrix block(n, k);
    for (Index j = 0; j < k; ++j) block.col(j) = basis.right.col(cluster[j]);
    Eigen::JacobiSVD<Matrix> svd(block);
    const auto& s = svd.singularValues();
    if (s(k - 1) < tol * s(0)) {
      throw NumericalError(ErrorKind::Defective,
                           "eigenvectors of a repeated eigenvalue are linearly dependent");
    }
    Eigen::HouseholderQR<Matrix> qr(block);
    const Matrix q = qr.householderQ() * Matrix::Identity(n, k);
    for (Index j = 0; j < k; ++j) basis.right.col(cluster[j]) = q.col(j);
  }

  for (Index k = 0; k < n; ++k) fix_phase(basis.right.col(k));

  // Singular values from the Gram matrix are cheap and accurate while the
  // spread stays moderate; otherwise redo them with an SVD.
  Eigen::SelfAdjointEigenSolver<Matrix> gram(hermitian_part(basis.right.adjoint() * basis.right),
                                             Eigen::EigenvaluesOnly);
  double smax = std::sqrt(std::max(gram.eigenvalues()(n - 1), 0.0));
  double smin = std::sqrt(std::max(gram.eigenvalues()(0), 0.0));
  if (!(smin > 1e-4 * smax)) {
    Eigen::JacobiSVD<Matrix> svd(basis.right);
    smax = svd.singularValues()(0);
    smin = svd.singularValues()(n - 1);
  }
  if (!(smin > tol)) {
    throw NumericalError(ErrorKind::Defective,
                         "right eigenvector matrix is singular (smallest singular value " +
                             std::to_string(smin) + ")");
  }
  basis.right_condition = smax / smin;
  basis.left = basis.right.partialPivLu().inverse();
  return basis;
}

Matrix instantaneous_metric_matrix(const BiorthoBasis& basis) {
  return hermitian_part(basis.left.adjoint() * basis.left);
}

MetricState instantaneous_metric(const BiorthoBasis& basis) {
  return metric_with_damping(basis, RealVector::Zero(basis.dim()));
}

MetricState metric_with_damping(const BiorthoBasis& basis, const RealVector& damping) {
  require_same_dim(basis.dim(), damping.size(), "damping integrals vs basis");
  MetricState m;
  const Index n = basis.dim();
  m.projectors.reserve(static_cast<std::size_t>(n));
  m.tilde = Matrix::Zero(n, n);
  m.connection = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    const Vector lk = basis.left_ket(k);
    Matrix proj = lk * lk.adjoint();
    m.tilde += proj;
    m.connection += std::exp(damping(k)) * proj;
    m.projectors.push_back(std::move(proj));
  }
  m.tilde = hermitian_part(m.tilde);
  m.connection = hermitian_part(m.connection);
  m.damping = damping;
  m.eta = matrix_sqrt_pd(m.connection);
  return m;
}

std::vector<Index> track_states(const BiorthoBasis& prev, const BiorthoBasis& next,
                                double min_overlap) {
  require_same_dim(prev.dim(), next.dim(), "track_states");
  const Index n = prev.dim();
  const Eigen::MatrixXd overlap = (prev.left * next.right).cwiseAbs();

  std::vector<std::tuple<double, Index, Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(n * n));
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) pairs.emplace_back(-overlap(a, b), a, b);
  std::sort(pairs.begin(), pairs.end());

  std::vector<Index> perm(static_cast<std::size_t>(n), -1);
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  Index assigned = 0;
  for (const auto& [neg, a, b] : pairs) {
    if (perm[a] >= 0 || taken[b]) continue;
    if (-neg < min_overlap) {
      throw NumericalError(ErrorKind::TrackingLost,
                           "state " + std::to_string(a) + " best overlap " + std::to_string(-neg));
    }
    perm[a] = b;
    taken[b] = true;
    if (++assigned == n) break;
  }
  return perm;
}

BiorthoBasis permute_states(const BiorthoBasis& basis, std::span<const Index> perm) {
  require_same_dim(basis.dim(), static_cast<Index>(perm.size()), "permutation length");
  BiorthoBasis out;
  const Index n = basis.dim();
  out.right_condition = basis.right_condition;
  out.eigenvalues.resize(n);
  out.right.resize(n, n);
  out.left.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = basis.eigenvalues(perm[k]);
    out.right.col(k) = basis.right.col(perm[k]);
    out.left.row(k) = basis.left.row(perm[k]);
  }
  return out;
}

void align_phases(const BiorthoBasis& prev, BiorthoBasis& next) {
  require_same_dim(prev.dim(), next.dim(), "align_phases");
  for (Index k = 0; k < next.dim(); ++k) {
    const cplx z = prev.right.col(k).dot(next.right.col(k));
    if (std::abs(z) == 0.0) continue;
    const cplx phase = z / std::abs(z);
    next.right.col(k) *= std::conj(phase);
    next.left.row(k) *= phase;
  }
}

DampingTracker::DampingTracker(double t0, BiorthoBasis basis0)
    : t_(t0), basis_(std::move(basis0)), damping_(RealVector::Zero(basis_.dim())) {}

void DampingTracker::advance(double t, BiorthoBasis next, double min_overlap) {
  const auto perm = track_states(basis_, next, min_overlap);
  BiorthoBasis tracked = permute_states(next, perm);
  const double dt = t - t_;
  for (Index k = 0; k < damping_.size(); ++k) {
    damping_(k) += dt * (basis_.eigenvalues(k).imag() + tracked.eigenvalues(k).imag());
  }
  t_ = t;
  basis_ = std::move(tracked);
}

void DampingTracker::jump(BiorthoBasis next) {
  const auto perm = track_states(basis_, next, 0.0);
  basis_ = permute_states(next, perm);
}

MetricState metric_connection(std::span<const TimedBasis> bases) {
  if (bases.empty()) {
    throw NumericalError(ErrorKind::DimensionMismatch, "metric_connection needs at least one basis");
  }
  DampingTracker tracker(bases.front().t, bases.front().basis);
  for (const auto& tb : bases.subspan(1)) tracker.advance(tb.t, tb.basis);
  return tracker.metric();
}

Components components(const Vector& psi, const MetricState& metric) {
  require_same_dim(psi.size(), metric.dim(), "state vs metric");
  if (psi.norm() == 0.0) throw NumericalError(ErrorKind::ZeroState, "state vector is zero");
  Components c;
  const auto n = static_cast<Index>(metric.projectors.size());
  c.populations.resize(n);
  for (Index k = 0; k < n; ++k) {
    c.populations(k) =
        std::exp(metric.damping(k)) * psi.dot(metric.projectors[static_cast<std::size_t>(k)] * psi).real();
  }
  c.normalizer = c.populations.sum();
  if (!(c.normalizer > 0.0)) throw NumericalError(ErrorKind::ZeroState, "normalizer vanished");
  c.populations /= c.normalizer;
  return c;
}

cplx observable(const Vector& psi, const Matrix& op, const Matrix& eta) {
  require_square(op, "observable");
  require_same_dim(op.rows(), psi.size(), "observable vs state");
  require_same_dim(eta.rows(), psi.size(), "eta vs state");
  if (psi.norm() == 0.0) throw NumericalError(ErrorKind::ZeroState, "state vector is zero");
  const Vector phi = eta * psi;
  return phi.dot(op * phi) / phi.squaredNorm();
}

cplx observable(const Vector& psi, const Matrix& op, const MetricState& metric) {
  const double a = components(psi, metric).normalizer;
  require_square(op, "observable");
  require_same_dim(op.rows(), psi.size(), "observable vs state");
  const Vector phi = metric.eta * psi;
  return phi.dot(op * phi) / a;
}

WaveState make_wave_state(double t, const Vector& psi, const MetricState& metric) {
  auto c = components(psi, metric);
  return WaveState{t, psi, std::move(c.populations), c.normalizer};
}

}  // namespace nhtdse
