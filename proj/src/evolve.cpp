#include "nhtdse/evolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "nhtdse/errors.hpp"

namespace nhtdse {

namespace {

bool needs_metric(TdseVariant v) {
  return v == TdseVariant::NewNH || v == TdseVariant::LeftNH || v == TdseVariant::Gong;
}

// Conserved quantity of NewNH in the representation the variant propagates.
double metric_norm(TdseVariant v, const Vector& y, const BiorthoBasis& basis) {
  if (v == TdseVariant::LeftNH) return (basis.right.adjoint() * y).squaredNorm();  // <chi|W~^-1|chi>
  return (basis.left * y).squaredNorm();                                           // <psi|W~|psi>
}

WaveState wave_for(TdseVariant v, double t, const Vector& y, const DampingTracker& tracker) {
  if (v != TdseVariant::LeftNH) return make_wave_state(t, y, tracker.metric());
  const BiorthoBasis& b = tracker.basis();
  RealVector w = (b.right.adjoint() * y).cwiseAbs2();
  for (Eigen::Index k = 0; k < w.size(); ++k) w(k) *= std::exp(tracker.damping()(k));
  const double a = w.sum();
  if (!(a > 0.0)) throw NumericalError(ErrorKind::ZeroState, "state vector is zero");
  return WaveState{t, y, w / a, a};
}

}  // namespace

RealVector left_space_components(const Vector& chi, const BiorthoBasis& basis,
                                 const RealVector& damping) {
  RealVector w = (basis.right.adjoint() * chi).cwiseAbs2();
  for (Eigen::Index k = 0; k < w.size(); ++k) w(k) *= std::exp(damping(k));
  const double a = w.sum();
  if (!(a > 0.0)) throw NumericalError(ErrorKind::ZeroState, "state vector is zero");
  return w / a;
}

Trajectory evolve(TdseVariant variant, const HamiltonianSchedule& schedule, const Vector& psi0,
                  std::span<const double> output_times, const IntegratorOptions& opts) {
  require_same_dim(psi0.size(), schedule.dim(), "initial state vs Hamiltonian");
  if (psi0.norm() == 0.0) throw NumericalError(ErrorKind::ZeroState, "initial state is zero");
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0) || !(opts.max_step > 0.0)) {
    throw std::invalid_argument("integrator tolerances and max_step must be positive");
  }

  std::vector<double> outputs(output_times.begin(), output_times.end());
  std::sort(outputs.begin(), outputs.end());
  if (outputs.empty() || outputs.back() < schedule.t1()) outputs.push_back(schedule.t1());
  for (double t : outputs) {
    if (t < schedule.t0() || t > schedule.t1()) throw std::invalid_argument("output time outside schedule span");
  }
  std::size_t next_out = 0;
  while (next_out < outputs.size() && outputs[next_out] <= schedule.t0()) ++next_out;

  const bool use_metric = needs_metric(variant);
  const double fd = opts.metric_fd_step;

  Trajectory traj;
  traj.variant = variant;

  DampingTracker tracker(schedule.t0(), eig_biortho(schedule.segment(0)(schedule.t0())));
  Vector y = psi0;
  const double q0 = metric_norm(variant, y, tracker.basis());
  double current_drift = 0;

  auto record = [&](double t) {
    traj.samples.push_back(
        TrajectorySample{t, wave_for(variant, t, y, tracker), tracker.metric(), current_drift});
  };
  record(schedule.t0());

  double h = opts.fixed_step > 0 ? opts.fixed_step
             : opts.initial_step > 0
                 ? opts.initial_step
                 : std::min(opts.max_step, 1e-2 * (schedule.t1() - schedule.t0()));

  for (std::size_t seg = 0; seg < schedule.segment_count(); ++seg) {
    const HamiltonianFn& fn = schedule.segment(seg);
    const double a = schedule.segment_start(seg);
    const double b = schedule.segment_end(seg);
    const bool last = seg + 1 == schedule.segment_count();

    if (seg > 0) {
      BiorthoBasis plus = eig_biortho(fn(a));
      const Matrix wm = instantaneous_metric_matrix(tracker.basis());
      const Matrix wp = instantaneous_metric_matrix(plus);
      QuenchEvent ev = quench_operator(wm, wp, a);
      switch (variant) {
        case TdseVariant::NewNH:
        case TdseVariant::Gong:
          y = ev.jump * y;
          break;
        case TdseVariant::LeftNH:
          y = wp * (ev.jump * (tracker.basis().right * (tracker.basis().right.adjoint() * y)));
          break;
        case TdseVariant::Standard:
        case TdseVariant::Wieser:
          break;
      }
      traj.quenches.push_back(std::move(ev));
      tracker.jump(std::move(plus));
      if (next_out < outputs.size() && outputs[next_out] == a) {
        record(a);
        ++next_out;
      }
    }

    // the last stage of a step and the first of the next share t + step
    std::array<std::optional<MetricFrame>, 2> cache;
    std::size_t cache_slot = 0;
    auto frame_at = [&](double t) -> const MetricFrame& {
      for (const auto& c : cache)
        if (c && c->t == t) return *c;
      auto& slot = cache[cache_slot];
      cache_slot = (cache_slot + 1) % cache.size();
      slot = metric_frame(fn, t, true, fd);
      return *slot;
    };
    auto basis_at = [&](double t) {
      for (const auto& c : cache)
        if (c && c->t == t) return c->basis;
      return eig_biortho(fn(t));
    };

    const OdeRhs f = [&](double t, const Vector& state) -> Vector {
      if (!use_metric) {
        MetricFrame frame;
        frame.t = t;
        frame.h = fn(t);
        return rhs(variant, frame, state);
      }
      return rhs(variant, frame_at(t), state);
    };

    if (opts.fixed_step > 0) h = (b - a) / std::ceil((b - a) / opts.fixed_step - 1e-9);

    double t = a;
    while (t < b) {
      const bool out_pending = next_out < outputs.size() && outputs[next_out] < b;
      const double target = out_pending ? outputs[next_out] : b;
      double step = std::min({h, opts.max_step, target - t});
      if (opts.fixed_step > 0) step = std::min(h, target - t);
      if (target - (t + step) <= 1e-12 * std::max(1.0, std::abs(target))) step = target - t;

      const double hmin = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
      if (step < hmin) {
        throw NumericalError(ErrorKind::StepSizeUnderflow, "step " + std::to_string(step) +
                                                               " at t = " + std::to_string(t));
      }
      if (traj.accepted_steps + traj.rejected_steps >= opts.max_steps) {
        throw NumericalError(ErrorKind::StepSizeUnderflow,
                             "step budget exhausted at t = " + std::to_string(t));
      }

      RkfStep s = rkf45_step(f, t, y, step, opts.rtol, opts.atol);
      if (opts.fixed_step <= 0 && !(s.error_norm <= 1.0)) {
        ++traj.rejected_steps;
        h = rkf45_next_step(step, s.error_norm);
        continue;
      }
      if (!s.y.allFinite()) {
        throw NumericalError(ErrorKind::StepSizeUnderflow, "non-finite state at t = " + std::to_string(t));
      }

      ++traj.accepted_steps;
      const double t_new = step == target - t ? target : t + step;
      y = std::move(s.y);
      tracker.advance(t_new, basis_at(t_new));
      current_drift = std::abs(metric_norm(variant, y, tracker.basis()) - q0) / q0;
      traj.unitarity_drift = std::max(traj.unitarity_drift, current_drift);
      if (opts.fixed_step <= 0) h = rkf45_next_step(step, s.error_norm);
      t = t_new;

      if (out_pending && t == target) {
        record(t);
        ++next_out;
      }
    }
    if (last && next_out < outputs.size() && outputs[next_out] == b) {
      record(b);
      ++next_out;
    }
  }
  return traj;
}

SymmetryReport check_left_right_symmetry(const HamiltonianSchedule& schedule, const Vector& psi0,
                                         std::span<const double> output_times,
                                         const IntegratorOptions& opts) {
  const Matrix w0 = instantaneous_metric_matrix(eig_biortho(schedule.segment(0)(schedule.t0())));
  const Trajectory right = evolve(TdseVariant::NewNH, schedule, psi0, output_times, opts);
  const Trajectory left = evolve(TdseVariant::LeftNH, schedule, w0 * psi0, output_times, opts);
  if (right.samples.size() != left.samples.size()) {
    throw std::logic_error("left and right trajectories sampled differently");
  }
  SymmetryReport rep;
  for (std::size_t i = 0; i < right.samples.size(); ++i) {
    const auto& r = right.samples[i];
    const auto& l = left.samples[i];
    rep.max_discrepancy = std::max(rep.max_discrepancy, (r.metric.tilde * r.wave.psi - l.wave.psi).norm());
    rep.max_component_difference =
        std::max(rep.max_component_difference,
                 (r.wave.populations - l.wave.populations).cwiseAbs().maxCoeff());
  }
  return rep;
}

}  // namespace nhtdse
