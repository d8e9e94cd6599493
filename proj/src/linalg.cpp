#include "nhtdse/linalg.hpp"

#include <cmath>
#include <string>

#include "nhtdse/errors.hpp"

namespace nhtdse {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Defective: return "Defective";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::TrackingLost: return "TrackingLost";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ZeroState: return "ZeroState";
    case ErrorKind::IllConditionedMetric: return "IllConditionedMetric";
    case ErrorKind::QuenchAdjacent: return "QuenchAdjacent";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::DegenerateOverlap: return "DegenerateOverlap";
    case ErrorKind::DegenerateFermiLevel: return "DegenerateFermiLevel";
  }
  return "Unknown";
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw NumericalError(ErrorKind::DimensionMismatch,
                         std::string(what) + " must be a non-empty square matrix");
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericalError(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
  }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw NumericalError(ErrorKind::DimensionMismatch,
                         std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

double hermiticity_defect(const Matrix& m) { return (m - m.adjoint()).norm(); }

bool is_hermitian(const Matrix& m, double tol) {
  return hermiticity_defect(m) <= tol * std::max(1.0, m.norm());
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> pd_decomposition(const Matrix& m) {
  require_square(m, "matrix_sqrt_pd input");
  if (!is_hermitian(m, 1e-10)) {
    throw NumericalError(ErrorKind::NotPositiveDefinite, "matrix is not hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success) {
    throw NumericalError(ErrorKind::NotPositiveDefinite, "eigendecomposition failed");
  }
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw NumericalError(ErrorKind::NotPositiveDefinite,
                         "smallest eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
  }
  return es;
}

}  // namespace

Matrix matrix_sqrt_pd(const Matrix& m) {
  const auto es = pd_decomposition(m);
  const Matrix& q = es.eigenvectors();
  return q * es.eigenvalues().cwiseSqrt().cast<cplx>().asDiagonal() * q.adjoint();
}

Matrix matrix_inv_sqrt_pd(const Matrix& m) {
  const auto es = pd_decomposition(m);
  const Matrix& q = es.eigenvectors();
  return q * es.eigenvalues().cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() * q.adjoint();
}

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace nhtdse
