#pragma once

#include <span>
#include <vector>

#include "nhtdse/integrator.hpp"
#include "nhtdse/quench.hpp"
#include "nhtdse/tdse.hpp"

namespace nhtdse {

struct TrajectorySample {
  double t = 0;
  WaveState wave;  // for LeftNH, wave.psi is the left-space state |Psi>>
  MetricState metric;
  double drift = 0;  // relative change of <Psi|W~|Psi> since t0, at this sample
};

struct Trajectory {
  TdseVariant variant = TdseVariant::NewNH;
  std::vector<TrajectorySample> samples;
  std::vector<QuenchEvent> quenches;
  /// max over accepted steps of |<Psi|W~|Psi>(t) - <Psi|W~|Psi>(t0)| / <Psi|W~|Psi>(t0)
  double unitarity_drift = 0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Integrates the variant over the schedule, piece by piece between quench
/// times. At each quench the state jumps by L for NewNH and Gong, by
/// W~+ L W~-^-1 for LeftNH, and stays continuous for Standard and Wieser.
/// Samples are taken at t0, at every requested output time (right limits
/// at quench instants) and at t1. Damping integrals use the trapezoidal rule on the
/// accepted steps.
Trajectory evolve(TdseVariant variant, const HamiltonianSchedule& schedule, const Vector& psi0,
                  std::span<const double> output_times = {}, const IntegratorOptions& opts = {});

struct SymmetryReport {
  /// max_t |W~(t)|Psi(t)> - |Psi(t)>>| over the common sample times
  double max_discrepancy = 0;
  /// max_t max_n ||c_n|^2 right space - |c_n|^2 left space|
  double max_component_difference = 0;
};

/// Evolves |Psi> with NewNH and |Psi>> = W~|Psi> with LeftNH independently.
SymmetryReport check_left_right_symmetry(const HamiltonianSchedule& schedule, const Vector& psi0,
                                         std::span<const double> output_times,
                                         const IntegratorOptions& opts = {});

/// Components of a left-space state, using the metric W~^-1 and projectors |n><n|.
RealVector left_space_components(const Vector& chi, const BiorthoBasis& basis,
                                 const RealVector& damping);

}  // namespace nhtdse
