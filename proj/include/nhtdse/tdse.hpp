#pragma once

#include <optional>
#include <string_view>

#include "nhtdse/biortho.hpp"
#include "nhtdse/schedule.hpp"

namespace nhtdse {

/// Equations of motion, hbar = 1.
///   Standard  i d|Psi>/dt = H|Psi>
///   NewNH     i d|Psi>/dt = [(W~^-1 H^+ W~ + H)/2 - (i/2) W~^-1 dW~/dt] |Psi>
///   LeftNH    the mirror equation for |Psi>> = W~|Psi>, with H <-> H^+ and W~ <-> W~^-1
///   Wieser    i d|Psi>/dt = [H + <Psi|(H^+ - H)/2|Psi>/<Psi|Psi>] |Psi>
///   Gong      i d|Psi>/dt = [H - (i/2) W^-1 dW/dt] |Psi>, W = W~ (real spectra only)
enum class TdseVariant { Standard, NewNH, LeftNH, Wieser, Gong };

inline constexpr TdseVariant kAllVariants[] = {TdseVariant::Standard, TdseVariant::NewNH,
                                               TdseVariant::LeftNH, TdseVariant::Wieser,
                                               TdseVariant::Gong};

std::string_view variant_name(TdseVariant v) noexcept;
std::optional<TdseVariant> parse_variant(std::string_view name) noexcept;

inline constexpr double kMaxMetricCondition = 1e12;
inline constexpr double kDefaultMetricFdStep = 1e-3;

struct RateEstimate {
  Matrix value;
  double error_estimate = 0;
};
using MetricDerivative = RateEstimate;

/// dW~/dt by central differences at steps h and h/2, combined by one
/// Richardson extrapolation. The error estimate is the size of that
/// correction. Throws QuenchAdjacent when [t-h, t+h] touches a quench time.
MetricDerivative metric_derivative(const HamiltonianSchedule& schedule, double t,
                                   double h = kDefaultMetricFdStep);

/// Same, on a single smooth segment function (no quench checks).
MetricDerivative metric_derivative(const HamiltonianFn& segment, double t,
                                   double h = kDefaultMetricFdStep);

/// Everything the right-hand sides need at one instant.
struct MetricFrame {
  double t = 0;
  Matrix h;
  BiorthoBasis basis;
  Matrix tilde;
  Matrix tilde_inv;
  Matrix dtilde;  // zero unless requested
  double dtilde_error = 0;
};

/// dH/dt by fourth-order central differences with steps h and 2h. The error
/// estimate is the gap to the plain second-order difference.
RateEstimate hamiltonian_rate(const HamiltonianFn& segment, double t, double h = kDefaultMetricFdStep);

/// dW~/dt from first-order eigenvector perturbation for unit-norm right
/// eigenvectors: V' = V C with C_mn = <<m|H'|n>/(E_n - E_m) off the diagonal
/// and Re C_nn fixed by |n| = 1. Empty when two eigenvalues are closer than
/// `min_gap` times the spectral scale.
std::optional<Matrix> metric_rate(const BiorthoBasis& basis, const Matrix& hdot, double min_gap = 1e-6);

/// Builds the frame for `segment` at t. dW~/dt comes from metric_rate, or
/// from metric_derivative when the spectrum is nearly degenerate. Throws
/// IllConditionedMetric when cond(W~) exceeds kMaxMetricCondition.
MetricFrame metric_frame(const HamiltonianFn& segment, double t, bool with_derivative,
                         double fd_step = kDefaultMetricFdStep);

/// d|Psi>/dt for the variant. For LeftNH `psi` is the left-space state |Psi>>.
Vector rhs(TdseVariant variant, const MetricFrame& frame, const Vector& psi);

/// Schedule form: H(t) and W~(t) are evaluated here, dW~/dt is supplied.
Vector rhs(TdseVariant variant, const HamiltonianSchedule& schedule, double t, const Vector& psi,
           const Matrix& dtilde);

/// The operator that NewNH adds to H: Lambda = (W~^-1 H^+ W~ - H)/2 - (i/2) W~^-1 dW~/dt.
/// It satisfies W~ Lambda = -Lambda^+ W~.
Matrix lambda_operator(const MetricFrame& frame);

/// Generator G with d|Psi>/dt = G|Psi> for the linear variants (everything
/// but Wieser).
Matrix linear_generator(TdseVariant variant, const MetricFrame& frame);

}  // namespace nhtdse
