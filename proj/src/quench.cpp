#include "nhtdse/quench.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "nhtdse/errors.hpp"

namespace nhtdse {

QuenchEvent quench_operator(const Matrix& tilde_minus, const Matrix& tilde_plus, double t_q) {
  require_square(tilde_minus, "W~-");
  require_square(tilde_plus, "W~+");
  require_same_dim(tilde_minus.rows(), tilde_plus.rows(), "quench metrics");

  const Matrix root_minus = matrix_sqrt_pd(tilde_minus);
  const Matrix inv_root_plus = matrix_inv_sqrt_pd(tilde_plus);

  // Polar factor of C = sqrt(W~-) sqrt(W~+)^-1 from its SVD, C = A S B^+.
  // A B^+ does not depend on the SVD's phase choices when C is invertible.
  const Matrix c = root_minus * inv_root_plus;
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix polar = svd.matrixU() * svd.matrixV().adjoint();

  QuenchEvent ev;
  ev.t_q = t_q;
  ev.tilde_minus = tilde_minus;
  ev.tilde_plus = tilde_plus;
  ev.unitary = polar.adjoint();
  ev.jump = inv_root_plus * ev.unitary * root_minus;
  return ev;
}

Vector apply_quench(const Vector& psi, const QuenchEvent& event) {
  require_same_dim(psi.size(), event.jump.cols(), "state vs quench operator");
  return event.jump * psi;
}

WaveState apply_quench(const WaveState& psi, const QuenchEvent& event, const MetricState& post) {
  return make_wave_state(psi.t, apply_quench(psi.psi, event), post);
}

QuenchResiduals quench_residuals(const QuenchEvent& ev) {
  const Matrix& l = ev.jump;
  QuenchResiduals r;
  r.conservation = (l.adjoint() * ev.tilde_plus * l - ev.tilde_minus).norm();
  r.exchange = (ev.tilde_plus * l - l.adjoint() * ev.tilde_plus).norm();
  r.unitarity = (ev.unitary.adjoint() * ev.unitary - Matrix::Identity(l.rows(), l.cols())).norm();
  return r;
}

void LatticeModelSpec::validate() const {
  if (sites < 4) throw std::invalid_argument("lattice needs at least 4 sites");
  const auto n = static_cast<std::size_t>(sites);
  if (onsite.size() != n) throw std::invalid_argument("onsite list must have one entry per site");
  if (hop_right.size() != n - 1 || hop_left.size() != n - 1) {
    throw std::invalid_argument("hopping lists must have one entry per bond (sites - 1)");
  }
  const int limit = edit.kind == EditKind::Bond ? sites - 1 : sites;
  if (edit.index < 0 || edit.index >= limit) throw std::invalid_argument("quench edit index out of range");
}

Matrix LatticeModelSpec::hamiltonian(bool post_quench) const {
  validate();
  Matrix h = Matrix::Zero(sites, sites);
  for (int i = 0; i < sites; ++i) h(i, i) = onsite[static_cast<std::size_t>(i)];
  for (int b = 0; b + 1 < sites; ++b) {
    h(b + 1, b) = hop_right[static_cast<std::size_t>(b)];
    h(b, b + 1) = hop_left[static_cast<std::size_t>(b)];
  }
  if (post_quench) {
    if (edit.kind == EditKind::Bond) {
      h(edit.index + 1, edit.index) = edit.right;
      h(edit.index, edit.index + 1) = edit.left;
    } else {
      h(edit.index, edit.index) = edit.right;
    }
  }
  return h;
}

int LatticeModelSpec::distance_to_edit(int site) const {
  if (edit.kind == EditKind::Site) return std::abs(site - edit.index);
  return std::min(std::abs(site - edit.index), std::abs(site - (edit.index + 1)));
}

namespace {

RealVector site_density(const Vector& psi, const Matrix& eta) {
  const Vector phi = eta * psi;
  return phi.cwiseAbs2() / phi.squaredNorm();
}

}  // namespace

LrbProfile lrb_probe(const LatticeModelSpec& spec, const Vector& psi0, double t_q) {
  const Matrix h_minus = spec.hamiltonian(false);
  const Matrix h_plus = spec.hamiltonian(true);
  require_same_dim(psi0.size(), h_minus.rows(), "initial state vs lattice");
  if (psi0.norm() == 0.0) throw NumericalError(ErrorKind::ZeroState, "initial state is zero");

  const Matrix wm = instantaneous_metric_matrix(eig_biortho(h_minus));
  const Matrix wp = instantaneous_metric_matrix(eig_biortho(h_plus));

  LrbProfile p;
  p.event = quench_operator(wm, wp, t_q);
  p.psi_minus = psi0;
  p.psi_plus = apply_quench(psi0, p.event);
  p.delta_psi = (p.psi_plus - p.psi_minus).cwiseAbs();
  p.delta_density =
      site_density(p.psi_plus, matrix_sqrt_pd(wp)) - site_density(p.psi_minus, matrix_sqrt_pd(wm));
  return p;
}

}  // namespace nhtdse
