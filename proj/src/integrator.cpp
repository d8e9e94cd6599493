#include "nhtdse/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace nhtdse {

namespace {

// Fehlberg tableau.
constexpr double c2 = 1.0 / 4, c3 = 3.0 / 8, c4 = 12.0 / 13, c5 = 1.0, c6 = 1.0 / 2;
constexpr double a21 = 1.0 / 4;
constexpr double a31 = 3.0 / 32, a32 = 9.0 / 32;
constexpr double a41 = 1932.0 / 2197, a42 = -7200.0 / 2197, a43 = 7296.0 / 2197;
constexpr double a51 = 439.0 / 216, a52 = -8.0, a53 = 3680.0 / 513, a54 = -845.0 / 4104;
constexpr double a61 = -8.0 / 27, a62 = 2.0, a63 = -3544.0 / 2565, a64 = 1859.0 / 4104,
                 a65 = -11.0 / 40;
constexpr double b1 = 25.0 / 216, b3 = 1408.0 / 2565, b4 = 2197.0 / 4104, b5 = -1.0 / 5;
// fifth-order minus fourth-order weights
constexpr double e1 = 16.0 / 135 - b1, e3 = 6656.0 / 12825 - b3, e4 = 28561.0 / 56430 - b4,
                 e5 = -9.0 / 50 - b5, e6 = 2.0 / 55;

}  // namespace

RkfStep rkf45_step(const OdeRhs& f, double t, const Vector& y, double h, double rtol, double atol) {
  const Vector k1 = f(t, y);
  const Vector k2 = f(t + c2 * h, y + h * a21 * k1);
  const Vector k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const Vector k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Vector k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Vector k6 = f(t + c6 * h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));

  RkfStep out;
  out.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5);
  const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6);
  double norm = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double scale = atol + rtol * std::max(std::abs(y(i)), std::abs(out.y(i)));
    norm = std::max(norm, std::abs(err(i)) / scale);
  }
  // error per unit step keeps the global error near tol * (t1 - t0)
  norm /= std::abs(h);
  out.error_norm = std::isfinite(norm) && out.y.allFinite() ? norm : std::numeric_limits<double>::infinity();
  return out;
}

double rkf45_next_step(double h, double error_norm) {
  if (!std::isfinite(error_norm)) return 0.2 * h;
  if (error_norm == 0.0) return 5.0 * h;
  return h * std::clamp(0.9 * std::pow(error_norm, -0.25), 0.2, 5.0);
}

}  // namespace nhtdse
