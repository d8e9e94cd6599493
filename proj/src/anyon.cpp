#include "nhtdse/anyon.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nhtdse/errors.hpp"

namespace nhtdse {

void AnyonChainSpec::validate() const {
  if (sites < 4 || sites > kMaxAnyonSites || sites % 2 != 0) {
    throw std::invalid_argument("anyon chain needs an even site count in [4, 64]");
  }
  if (hopping.size() != static_cast<std::size_t>(sites - 1)) {
    throw std::invalid_argument("hopping list must have sites - 1 entries");
  }
  for (double t : hopping) {
    if (!std::isfinite(t)) throw std::invalid_argument("hopping must be finite");
  }
  if (!(kappa >= 0.0 && kappa <= std::numbers::pi)) throw std::invalid_argument("kappa must lie in [0, pi]");
  if (filling < 0 || filling > sites) throw std::invalid_argument("filling must lie in [0, sites]");
  if (quench_bond < 0 || quench_bond > sites - 2) throw std::invalid_argument("quench_bond out of range");
  if (!std::isfinite(quench_value)) throw std::invalid_argument("quench_value must be finite");
}

std::vector<double> AnyonChainSpec::post_quench_hopping() const {
  std::vector<double> t = hopping;
  t.at(static_cast<std::size_t>(quench_bond)) = quench_value;
  return t;
}

Matrix fermion_hamiltonian(const std::vector<double>& hopping) {
  const auto n = static_cast<Eigen::Index>(hopping.size() + 1);
  Matrix h = Matrix::Zero(n, n);
  for (Eigen::Index l = 0; l + 1 < n; ++l) {
    h(l + 1, l) = hopping[static_cast<std::size_t>(l)];
    h(l, l + 1) = hopping[static_cast<std::size_t>(l)];
  }
  return h;
}

Matrix ground_state_correlations(const std::vector<double>& hopping, int filling) {
  const Matrix h = fermion_hamiltonian(hopping);
  const Eigen::Index n = h.rows();
  if (filling < 0 || filling > n) throw std::invalid_argument("filling must lie in [0, sites]");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector& e = es.eigenvalues();
  if (filling > 0 && filling < n) {
    const double gap = e(filling) - e(filling - 1);
    if (gap <= 1e-10 * std::max(1.0, std::abs(e(filling)))) {
      throw NumericalError(ErrorKind::DegenerateFermiLevel,
                           "levels " + std::to_string(filling - 1) + " and " +
                               std::to_string(filling) + " coincide at the Fermi energy");
    }
  }
  const Matrix occ = es.eigenvectors().leftCols(filling);
  // <f+_l f_m> = sum_k conj(v_lk) v_mk
  return occ.conjugate() * occ.transpose();
}

Matrix ground_state_correlations(const AnyonChainSpec& spec) {
  spec.validate();
  return ground_state_correlations(spec.hopping, spec.filling);
}

std::vector<StringSegment> string_segments(const std::vector<double>& hopping) {
  std::vector<StringSegment> segs;
  const int n = static_cast<int>(hopping.size()) + 1;
  int begin = 0;
  for (int b = 0; b + 1 < n; ++b) {
    if (hopping[static_cast<std::size_t>(b)] == 0.0) {
      segs.push_back({begin, b + 1});
      begin = b + 1;
    }
  }
  segs.push_back({begin, n});
  return segs;
}

Matrix anyon_correlations(const Matrix& g, double kappa, const std::vector<StringSegment>& segments) {
  require_square(g, "fermion correlation matrix");
  const Eigen::Index n = g.rows();
  std::vector<int> seg_of(static_cast<std::size_t>(n), 0);
  if (!segments.empty()) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (std::size_t k = 0; k < segments.size(); ++k) {
      for (int j = segments[k].begin; j < segments[k].end; ++j) {
        if (j < 0 || j >= n || seen[static_cast<std::size_t>(j)]) {
          throw std::invalid_argument("string segments must partition the chain");
        }
        seen[static_cast<std::size_t>(j)] = true;
        seg_of[static_cast<std::size_t>(j)] = static_cast<int>(k);
      }
    }
    for (bool s : seen) {
      if (!s) throw std::invalid_argument("string segments must partition the chain");
    }
  }
  auto in_string = [&](Eigen::Index j, Eigen::Index x) {
    return j < x && seg_of[static_cast<std::size_t>(j)] == seg_of[static_cast<std::size_t>(x)];
  };

  const double theta = std::numbers::pi - kappa;
  const Matrix gamma = g.transpose();
  Matrix out(n, n);
  Matrix y(n, n);
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index m = 0; m < n; ++m) {
      if (l == m) {
        out(l, m) = g(l, m);
        continue;
      }
      // a+_l a_m = e^{i theta [m in Str(l)]} f+_l f_m exp(i sum_j phi_j n_j)
      Vector d(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double phi = theta * (static_cast<double>(in_string(j, m)) - static_cast<double>(in_string(j, l)));
        d(j) = std::exp(kI * phi);
      }
      // <f+_l f_m e^{f+ Phi f}> = det(I + (D - I) Gamma) with row l set to D_mm Gamma_m.
      y = (d.array() - 1.0).matrix().asDiagonal() * gamma;
      y.diagonal().array() += 1.0;
      y.row(l) = d(m) * gamma.row(m);
      const cplx pref = in_string(m, l) ? std::exp(kI * theta) : cplx(1.0, 0.0);
      out(l, m) = pref * y.partialPivLu().determinant();
    }
  }
  return out;
}

RealVector momentum_distribution(const Matrix& g) {
  require_square(g, "correlation matrix");
  const Eigen::Index n = g.rows();
  RealVector nk(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const double k = 2 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
    cplx acc = 0;
    for (Eigen::Index l = 0; l < n; ++l) {
      for (Eigen::Index m = 0; m < n; ++m) {
        acc += std::exp(kI * (k * static_cast<double>(l - m))) * g(l, m);
      }
    }
    nk(q) = acc.real() / static_cast<double>(n);
  }
  return nk;
}

AnyonQuench quench_compare(const AnyonChainSpec& spec) {
  spec.validate();
  AnyonQuench q;
  q.fermion_g = ground_state_correlations(spec);
  q.anyon_pre = anyon_correlations(q.fermion_g, spec.kappa);
  q.anyon_post = anyon_correlations(q.fermion_g, spec.kappa, string_segments(spec.post_quench_hopping()));
  q.delta = q.anyon_post - q.anyon_pre;
  q.row_change = q.delta.cwiseAbs().rowwise().maxCoeff();
  q.nk_pre = momentum_distribution(q.anyon_pre);
  q.nk_post = momentum_distribution(q.anyon_post);
  q.density_pre = q.anyon_pre.diagonal().real();
  q.density_post = q.anyon_post.diagonal().real();
  return q;
}

}  // namespace nhtdse
