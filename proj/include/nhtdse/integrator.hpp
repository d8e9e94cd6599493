#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include "nhtdse/linalg.hpp"

namespace nhtdse {

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-11;
  double max_step = 0.25;
  double initial_step = 0;  // 0 picks one from the interval length
  double fixed_step = 0;    // > 0 disables step-size control
  double metric_fd_step = 1e-3;
  std::size_t max_steps = 2'000'000;
};

using OdeRhs = std::function<Vector(double, const Vector&)>;

/// Runge-Kutta-Fehlberg 4(5): the fourth-order solution is propagated and
/// the fifth-order one only serves as the local error reference.
struct RkfStep {
  Vector y;  // fourth-order result
  double error_norm = 0;  // weighted max-norm of the embedded difference per unit time
};

RkfStep rkf45_step(const OdeRhs& f, double t, const Vector& y, double h, double rtol, double atol);

/// Proposed next step from the error norm of an accepted or rejected step.
double rkf45_next_step(double h, double error_norm);

}  // namespace nhtdse
