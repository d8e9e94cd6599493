#pragma once

#include <complex>

#include <Eigen/Dense>

namespace nhtdse {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

void require_square(const Matrix& m, const char* what);
void require_finite(const Matrix& m, const char* what);
void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what);

double hermiticity_defect(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol);
Matrix hermitian_part(const Matrix& m);

/// Hermitian square root of a hermitian positive-definite matrix, built from
/// its spectral decomposition. Throws NotPositiveDefinite when the input is
/// not hermitian within 1e-10 (relative) or has a non-positive eigenvalue.
Matrix matrix_sqrt_pd(const Matrix& m);

/// Inverse of the hermitian PD square root, from the same decomposition.
Matrix matrix_inv_sqrt_pd(const Matrix& m);

/// 2-norm condition number from the singular values.
double condition_number(const Matrix& m);

}  // namespace nhtdse
