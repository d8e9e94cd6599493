#pragma once

#include <vector>

#include "nhtdse/biortho.hpp"

namespace nhtdse {

/// Jump operator across a discontinuity of the instantaneous metric.
///
/// L = (sqrt W~+)^-1 U sqrt W~-, with U the adjoint of the unitary polar
/// factor of sqrt W~- (sqrt W~+)^-1. Then L^+ W~+ L = W~- and W~+ L is
/// hermitian, and L = I whenever W~- = W~+.
struct QuenchEvent {
  double t_q = 0;
  Matrix tilde_minus;
  Matrix tilde_plus;
  Matrix jump;     // L
  Matrix unitary;  // U
};

QuenchEvent quench_operator(const Matrix& tilde_minus, const Matrix& tilde_plus, double t_q = 0);

Vector apply_quench(const Vector& psi, const QuenchEvent& event);
/// Jumps the state and re-evaluates its components with the post-quench metric.
WaveState apply_quench(const WaveState& psi, const QuenchEvent& event, const MetricState& post);

/// Residuals of the two defining identities, Frobenius norms.
struct QuenchResiduals {
  double conservation = 0;  // |L^+ W~+ L - W~-|
  double exchange = 0;      // |W~+ L - L^+ W~+|
  double unitarity = 0;     // |U^+ U - I|
};
QuenchResiduals quench_residuals(const QuenchEvent& event);

/// Tight-binding chain with onsite terms and direction-dependent hoppings:
/// H(l+1, l) = hop_right[l], H(l, l+1) = hop_left[l]. The edit replaces one
/// bond (both directions) or one onsite value to form the post-quench H.
struct LatticeModelSpec {
  enum class EditKind { Bond, Site };
  struct Edit {
    EditKind kind = EditKind::Bond;
    int index = 0;
    cplx right{0.0, 0.0};  // new hop_right, or new onsite for Site edits
    cplx left{0.0, 0.0};   // new hop_left (Bond edits only)
  };

  int sites = 0;
  std::vector<cplx> onsite;
  std::vector<cplx> hop_right;
  std::vector<cplx> hop_left;
  Edit edit;

  void validate() const;
  Matrix hamiltonian(bool post_quench) const;
  /// Lattice distance from a site to the edited bond or site.
  int distance_to_edit(int site) const;
};

struct LrbProfile {
  QuenchEvent event;
  Vector psi_minus;
  Vector psi_plus;
  RealVector delta_psi;      // |psi_i(t_q+) - psi_i(t_q-)|
  RealVector delta_density;  // metric-weighted site density, post minus pre
};

/// Applies the quench of `spec` to psi0 at t_q and reports the per-site change.
LrbProfile lrb_probe(const LatticeModelSpec& spec, const Vector& psi0, double t_q = 0);

}  // namespace nhtdse
