#pragma once

#include <span>
#include <vector>

#include "nhtdse/linalg.hpp"

namespace nhtdse {

/// Eigenvalues with paired right eigenvectors |n> (columns of `right`) and
/// left covectors <<n| (rows of `left`), biorthonormal: left * right = I.
///
/// Gauge: every |n> has unit norm and its first component above 1e-10 in
/// magnitude is real and positive. Exactly degenerate eigenvalues get an
/// orthonormal right basis inside their eigenspace, which makes the metric
/// independent of how the solver split the eigenspace.
struct BiorthoBasis {
  Vector eigenvalues;
  Matrix right;
  Matrix left;
  /// 2-norm condition number of `right`; the metric's is its square.
  double right_condition = 1.0;

  Eigen::Index dim() const { return eigenvalues.size(); }
  Vector ket(Eigen::Index n) const { return right.col(n); }
  /// |n>> = (<<n|)^dagger
  Vector left_ket(Eigen::Index n) const { return left.row(n).adjoint(); }
};

inline constexpr double kDefaultDefectTol = 1e-8;

/// Biorthogonal eigendecomposition, eigenvalues sorted by (Re, Im).
/// Throws NonFinite or Defective.
BiorthoBasis eig_biortho(const Matrix& h, double tol = kDefaultDefectTol);

/// Metric objects at one instant. `damping` holds D_n = int 2 Im E_n dt'
/// from the reference time, `connection` is W = sum_n W~_n exp(D_n) and
/// `eta` its hermitian square root.
struct MetricState {
  Matrix tilde;
  std::vector<Matrix> projectors;
  RealVector damping;
  Matrix connection;
  Matrix eta;

  Eigen::Index dim() const { return tilde.rows(); }
};

/// W~ = sum_n |n>><<n| alone; the cheap path used inside the integrator.
Matrix instantaneous_metric_matrix(const BiorthoBasis& basis);

/// Full metric state at the reference time (all D_n = 0, so W = W~).
MetricState instantaneous_metric(const BiorthoBasis& basis);

/// Metric state for accumulated damping integrals.
MetricState metric_with_damping(const BiorthoBasis& basis, const RealVector& damping);

/// perm[n] is the index in `next` continuing state n of `prev`. Greedy
/// best-match on |<<n_prev|m_next>|; TrackingLost if a matched overlap is
/// below `min_overlap`.
std::vector<Eigen::Index> track_states(const BiorthoBasis& prev, const BiorthoBasis& next,
                                       double min_overlap = 0.5);

/// Reorders `basis` so that state n of the result is state perm[n] of the input.
BiorthoBasis permute_states(const BiorthoBasis& basis, std::span<const Eigen::Index> perm);

/// Rotates each |n> of `next` so that <n_prev|n_next> is real positive, with
/// <<n| counter-rotated to keep biorthonormality.
void align_phases(const BiorthoBasis& prev, BiorthoBasis& next);

/// Trapezoidal accumulation of the damping integrals along a tracked
/// sequence of bases.
class DampingTracker {
 public:
  DampingTracker(double t0, BiorthoBasis basis0);

  /// Adds a smoothly connected basis at time t > time().
  void advance(double t, BiorthoBasis next, double min_overlap = 0.5);
  /// Relabels across a discontinuity without adding to the integrals.
  void jump(BiorthoBasis next);

  double time() const { return t_; }
  const BiorthoBasis& basis() const { return basis_; }
  const RealVector& damping() const { return damping_; }
  MetricState metric() const { return metric_with_damping(basis_, damping_); }

 private:
  double t_;
  BiorthoBasis basis_;
  RealVector damping_;
};

struct TimedBasis {
  double t;
  BiorthoBasis basis;
};

/// Metric connection at the last time of `bases`, with the damping
/// integrals taken by the trapezoidal rule over the given time grid.
MetricState metric_connection(std::span<const TimedBasis> bases);

struct Components {
  RealVector populations;  // |c_n|^2, sums to 1
  double normalizer = 0;   // A
};

/// |c_n|^2 = <Psi|W_n|Psi> / A with A = sum_n <Psi|W_n|Psi>.
Components components(const Vector& psi, const MetricState& metric);

/// (1/A) <Psi| eta^dagger O eta |Psi> with A = <Psi|W|Psi>.
cplx observable(const Vector& psi, const Matrix& op, const MetricState& metric);
/// Same with an explicit eta; A is then |eta Psi|^2.
cplx observable(const Vector& psi, const Matrix& op, const Matrix& eta);

struct WaveState {
  double t = 0;
  Vector psi;
  RealVector populations;
  double normalizer = 0;
};

WaveState make_wave_state(double t, const Vector& psi, const MetricState& metric);

}  // namespace nhtdse
