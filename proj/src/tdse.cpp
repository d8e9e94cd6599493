#include "nhtdse/tdse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nhtdse/errors.hpp"

namespace nhtdse {

std::string_view variant_name(TdseVariant v) noexcept {
  switch (v) {
    case TdseVariant::Standard: return "Standard";
    case TdseVariant::NewNH: return "NewNH";
    case TdseVariant::LeftNH: return "LeftNH";
    case TdseVariant::Wieser: return "Wieser";
    case TdseVariant::Gong: return "Gong";
  }
  return "Unknown";
}

std::optional<TdseVariant> parse_variant(std::string_view name) noexcept {
  for (auto v : kAllVariants) {
    if (variant_name(v) == name) return v;
  }
  return std::nullopt;
}

MetricDerivative metric_derivative(const HamiltonianFn& segment, double t, double h) {
  auto tilde_at = [&](double s) { return instantaneous_metric_matrix(eig_biortho(segment(s))); };
  const Matrix coarse = (tilde_at(t + h) - tilde_at(t - h)) / (2 * h);
  const Matrix fine = (tilde_at(t + h / 2) - tilde_at(t - h / 2)) / h;
  MetricDerivative d;
  d.value = hermitian_part((4.0 * fine - coarse) / 3.0);
  d.error_estimate = (fine - coarse).norm() / 3.0;
  return d;
}

RateEstimate hamiltonian_rate(const HamiltonianFn& segment, double t, double h) {
  const Matrix near = segment(t + h) - segment(t - h);
  const Matrix far = segment(t + 2 * h) - segment(t - 2 * h);
  RateEstimate d;
  d.value = (8.0 * near - far) / (12 * h);
  d.error_estimate = (d.value - near / (2 * h)).norm();
  return d;
}

std::optional<Matrix> metric_rate(const BiorthoBasis& basis, const Matrix& hdot, double min_gap) {
  require_same_dim(hdot.rows(), basis.dim(), "dH/dt vs basis");
  const Eigen::Index n = basis.dim();
  const Vector& e = basis.eigenvalues;
  const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
  Matrix c = basis.left * hdot * basis.right;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m == j) continue;
      const cplx gap = e(j) - e(m);
      if (std::abs(gap) < min_gap * scale) return std::nullopt;
      c(m, j) /= gap;
    }
  }
  const Matrix gram = basis.right.adjoint() * basis.right;
  for (Eigen::Index j = 0; j < n; ++j) {
    cplx s = 0;
    for (Eigen::Index m = 0; m < n; ++m)
      if (m != j) s += gram(j, m) * c(m, j);
    c(j, j) = -s.real();
  }
  // W~ = (V V^+)^-1, so dW~ = -left^+ (C + C^+) left
  return hermitian_part(-(basis.left.adjoint() * (c + c.adjoint()) * basis.left));
}

MetricDerivative metric_derivative(const HamiltonianSchedule& schedule, double t, double h) {
  for (double tq : schedule.quench_times()) {
    if (std::abs(t - tq) <= h) {
      throw NumericalError(ErrorKind::QuenchAdjacent,
                           "t = " + std::to_string(t) + " within " + std::to_string(h) +
                               " of quench at " + std::to_string(tq));
    }
  }
  return metric_derivative(schedule.segment(schedule.segment_index(t)), t, h);
}

MetricFrame metric_frame(const HamiltonianFn& segment, double t, bool with_derivative,
                         double fd_step) {
  MetricFrame f;
  f.t = t;
  f.h = segment(t);
  f.basis = eig_biortho(f.h);
  const double cond = f.basis.right_condition * f.basis.right_condition;
  if (!(cond < kMaxMetricCondition)) {
    throw NumericalError(ErrorKind::IllConditionedMetric,
                         "cond(W~) = " + std::to_string(cond) + " at t = " + std::to_string(t));
  }
  f.tilde = instantaneous_metric_matrix(f.basis);
  // W~^-1 = V V^dagger for unit-free biorthonormal pairs.
  f.tilde_inv = hermitian_part(f.basis.right * f.basis.right.adjoint());
  if (with_derivative) {
    const RateEstimate hdot = hamiltonian_rate(segment, t, fd_step);
    if (auto rate = metric_rate(f.basis, hdot.value)) {
      f.dtilde = std::move(*rate);
      // metric_rate is linear in H', so the H' error maps through it
      f.dtilde_error = hdot.error_estimate * f.dtilde.norm() / std::max(hdot.value.norm(), 1e-300);
    } else {
      auto d = metric_derivative(segment, t, fd_step);
      f.dtilde = std::move(d.value);
      f.dtilde_error = d.error_estimate;
    }
  } else {
    f.dtilde = Matrix::Zero(f.h.rows(), f.h.cols());
  }
  return f;
}

Matrix linear_generator(TdseVariant variant, const MetricFrame& f) {
  const Matrix& h = f.h;
  switch (variant) {
    case TdseVariant::Standard:
      return -kI * h;
    case TdseVariant::NewNH:
      return -kI * 0.5 * (f.tilde_inv * h.adjoint() * f.tilde + h) - 0.5 * f.tilde_inv * f.dtilde;
    case TdseVariant::LeftNH:
      // -(1/2) W~ d(W~^-1)/dt = +(1/2) dW~/dt W~^-1
      return -kI * 0.5 * (f.tilde * h * f.tilde_inv + h.adjoint()) + 0.5 * f.dtilde * f.tilde_inv;
    case TdseVariant::Gong:
      return -kI * h - 0.5 * f.tilde_inv * f.dtilde;
    case TdseVariant::Wieser:
      break;
  }
  throw std::logic_error("Wieser evolution is nonlinear and has no fixed generator");
}

Vector rhs(TdseVariant variant, const MetricFrame& f, const Vector& psi) {
  require_same_dim(psi.size(), f.h.rows(), "state vs Hamiltonian");
  if (variant == TdseVariant::Wieser) {
    const double norm2 = psi.squaredNorm();
    if (norm2 == 0.0) throw NumericalError(ErrorKind::ZeroState, "state vector is zero");
    const Vector hpsi = f.h * psi;
    const Vector hdag_psi = f.h.adjoint() * psi;
    const cplx shift = 0.5 * (psi.dot(hdag_psi) - psi.dot(hpsi)) / norm2;
    return -kI * (hpsi + shift * psi);
  }
  return linear_generator(variant, f) * psi;
}

Vector rhs(TdseVariant variant, const HamiltonianSchedule& schedule, double t, const Vector& psi,
           const Matrix& dtilde) {
  MetricFrame f = metric_frame(schedule.segment(schedule.segment_index(t)), t, false);
  require_same_dim(dtilde.rows(), f.h.rows(), "dW~/dt vs Hamiltonian");
  f.dtilde = dtilde;
  return rhs(variant, f, psi);
}

Matrix lambda_operator(const MetricFrame& f) {
  return 0.5 * (f.tilde_inv * f.h.adjoint() * f.tilde - f.h) - 0.5 * kI * f.tilde_inv * f.dtilde;
}

}  // namespace nhtdse
