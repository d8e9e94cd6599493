#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "nhtdse/evolve.hpp"
#include "nhtdse/linalg.hpp"

namespace nhtdse {

/// Polar angles of the right state (theta, phi) and of the left state
/// (theta_p, phi_p) on the Bloch sphere.
struct BlochAngles {
  double theta = 0;
  double phi = 0;
  double theta_p = 0;
  double phi_p = 0;
};

/// Two-level biorthonormal pair built from Bloch angles:
///   |1>  = u(theta, phi) / A,           |1>> = u(theta', phi')
///   |2>  = u(pi - theta', phi' + pi) / A2,  |2>> = u(pi - theta, phi + pi)
/// with u(a, b) = (cos a/2, sin a/2 e^{ib}) and A = <<1|u(theta, phi)>.
struct BlochStates {
  Vector ket1, bra1, ket2, bra2;  // bra* are the kets |n>>
  cplx a1, a2;
};

inline constexpr double kMinBlochOverlap = 1e-6;

/// Throws DegenerateOverlap when |A| or |A2| falls below kMinBlochOverlap.
BlochStates bloch_states(const BlochAngles& angles);

/// d/ds of every member of bloch_states(angles), given d(angles)/ds.
BlochStates bloch_state_rates(const BlochAngles& angles, const BlochAngles& rates);

/// Right kets |n> and left kets |n>> as columns, with their s-derivatives.
struct KetFrame {
  Matrix right;
  Matrix left;
  Matrix right_dot;
  Matrix left_dot;
};

KetFrame bloch_frame(const BlochAngles& angles, const BlochAngles& rates);

/// gamma_n' computed three ways. All should be real and equal.
struct PhaseRates {
  Vector metric_form;   // i[<n|W~|n'> + 1/2 <n|W~'|n>]
  Vector biorthogonal;  // (i/2)[<<n|n'> + <n|n'>>]
  Vector left_space;    // i[<<n|W~^-1|n'>> + 1/2 <<n|(W~^-1)'|n>>]
};

/// Metric form with an externally supplied W~ and dW~/ds.
Vector geometric_phase_increment(const KetFrame& frame, const Matrix& tilde, const Matrix& dtilde);

/// All three forms, with W~ and its derivative assembled from the frame.
PhaseRates geometric_phase_rates(const KetFrame& frame);

struct PathPoint {
  BlochAngles angles;
  BlochAngles rates;
};

using TracePath = std::function<PathPoint(double)>;

enum class PathClass { NoLoop, Loop };

struct TraceSpec {
  std::string family;
  std::vector<std::pair<std::string, double>> params;
  TracePath path;  // s in [0, 1]
  cplx e1{1.0, 0.0};
  cplx e2{-1.0, 0.0};
  int steps = 2000;
  PathClass path_class = PathClass::NoLoop;
};

struct PhaseResult {
  double gamma_1 = 0;  // [0, 2pi)
  double gamma_2 = 0;
  double gamma_total = 0;
  double open_gamma_1 = 0;  // integral of gamma_1' alone, unwrapped
  double open_gamma_2 = 0;
  PathClass path_class = PathClass::NoLoop;
  double error_estimate = 0;  // |gamma_total(steps) - gamma_total(2 steps)|
};

/// Integrates gamma_n' by the composite trapezoid rule over s, closes each
/// state onto the other's start, and sums. TrackingLost when consecutive
/// grid states overlap by less than 0.5.
PhaseResult exchange_phase(const TraceSpec& trace);

/// Wraps to [0, 2pi).
double wrap_phase(double x);
/// Signed distance of two phases, in (-pi, pi].
double phase_distance(double a, double b);

/// Named trace families. Each takes the family's parameter names below;
/// missing parameters throw std::invalid_argument.
///   great_circle    (none)                        hermitian, equator half turn
///   tilted          theta0                        hermitian, tilted half turn
///   wobble          theta0 amplitude              hermitian, latitude wobble
///   winding         theta0 turns                  hermitian, extra azimuthal turns
///   hermitian_loop  theta0 rho                    hermitian, detour on both traces
///   nh_noloop       theta0 theta0_p               NH, distinct smooth traces
///   nh_loop         theta0 theta0_p rho           NH, detour on the left trace
TraceSpec make_trace(std::string_view family,
                     const std::vector<std::pair<std::string, double>>& params, int steps);

std::vector<std::string_view> trace_families();

/// Same trace traversed as s -> f(s); f must map [0,1] onto [0,1]
/// monotonically with derivative fp.
TraceSpec reparameterize(const TraceSpec& trace, std::function<double(double)> f,
                         std::function<double(double)> fp);

/// Slow NewNH evolution of |1(0)> under H(t) = R diag(E1, E2) R^-1 along the
/// right/left trace with s = t / T, T = 1 / rate.
struct AdiabaticCheck {
  double extracted = 0;   // arg <<1(1)|Psi(T)> + Re(E1) T
  double predicted = 0;   // open_gamma_1 of the same trace
  double difference = 0;  // phase_distance(extracted, predicted)
  double leakage = 0;     // |<<2(1)|Psi(T)>|
};

AdiabaticCheck adiabatic_phase_check(const TraceSpec& trace, double rate,
                                     const IntegratorOptions& opts = {});

}  // namespace nhtdse
