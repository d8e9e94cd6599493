#pragma once

#include <vector>

#include "nhtdse/linalg.hpp"

namespace nhtdse {

/// Hard-core anyons on an open chain, H = sum_l t_l (a+_{l+1} a_l + h.c.).
///
/// Anyons map to fermions through a_l = f_l exp(i (pi - kappa) sum_{j<l} n_j),
/// so kappa = pi are free fermions and kappa = 0 hard-core bosons. For real
/// t_l the fermion Hamiltonian is sum_l t_l (f+_{l+1} f_l + h.c.) for every
/// kappa; kappa only dresses observables.
struct AnyonChainSpec {
  int sites = 0;
  std::vector<double> hopping;  // t_l on bond (l, l+1), length sites - 1
  double kappa = 0;
  int filling = 0;
  int quench_bond = 0;       // bond index replaced after the quench
  double quench_value = 0;   // its post-quench hopping

  void validate() const;
  std::vector<double> post_quench_hopping() const;
};

inline constexpr int kMaxAnyonSites = 64;

/// Single-particle hopping matrix of the fermion chain.
Matrix fermion_hamiltonian(const std::vector<double>& hopping);

/// G_lm = <f+_l f_m> in the ground state with `filling` particles.
/// Throws DegenerateFermiLevel if the last filled and first empty levels coincide.
Matrix ground_state_correlations(const std::vector<double>& hopping, int filling);
Matrix ground_state_correlations(const AnyonChainSpec& spec);

/// Sites [begin, end) over which Jordan-Wigner strings run.
struct StringSegment {
  int begin = 0;
  int end = 0;
};

/// Segments separated by zero bonds of `hopping`.
std::vector<StringSegment> string_segments(const std::vector<double>& hopping);

/// <a+_l a_m> from a fermion correlation matrix. Strings of each site run
/// over earlier sites of its own segment; an empty list means one segment
/// covering the chain.
Matrix anyon_correlations(const Matrix& fermion_g, double kappa,
                          const std::vector<StringSegment>& segments = {});

/// n(k) = (1/N) sum_{l,m} e^{ik(l-m)} G_lm at k = 2 pi q / N, q = 0..N-1.
RealVector momentum_distribution(const Matrix& g);

struct AnyonQuench {
  Matrix fermion_g;
  Matrix anyon_pre;
  Matrix anyon_post;
  Matrix delta;           // anyon_post - anyon_pre
  RealVector row_change;  // max_m |delta(l, m)|
  RealVector nk_pre;
  RealVector nk_post;
  RealVector density_pre;
  RealVector density_post;
};

/// Same fermion ground state before and after the bond edit; strings restart
/// in each disconnected piece afterwards.
AnyonQuench quench_compare(const AnyonChainSpec& spec);

}  // namespace nhtdse
