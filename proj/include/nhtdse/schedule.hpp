#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nhtdse/linalg.hpp"

namespace nhtdse {

using HamiltonianFn = std::function<Matrix(double)>;

/// Piecewise-smooth H(t) on [t0, t1]. Segment k covers
/// [boundary(k), boundary(k+1)] where the interior boundaries are the quench
/// times. Each segment function must stay smooth slightly beyond its own
/// interval, since one-sided metric derivatives at the boundaries evaluate it
/// there.
class HamiltonianSchedule {
 public:
  HamiltonianSchedule(double t0, double t1, std::vector<double> quench_times,
                      std::vector<HamiltonianFn> segments);

  static HamiltonianSchedule smooth(double t0, double t1, HamiltonianFn h);
  static HamiltonianSchedule constant(double t0, double t1, const Matrix& h);

  /// Right-continuous evaluation: at a quench time the post-quench segment is used.
  Matrix operator()(double t) const;
  /// H(t^-), the pre-quench value at a quench time.
  Matrix left_limit(double t) const;

  double t0() const { return t0_; }
  double t1() const { return t1_; }
  Eigen::Index dim() const { return dim_; }
  std::span<const double> quench_times() const { return quench_times_; }

  std::size_t segment_count() const { return segments_.size(); }
  std::size_t segment_index(double t) const;
  const HamiltonianFn& segment(std::size_t k) const { return segments_.at(k); }
  double segment_start(std::size_t k) const { return k == 0 ? t0_ : quench_times_[k - 1]; }
  double segment_end(std::size_t k) const {
    return k + 1 == segments_.size() ? t1_ : quench_times_[k];
  }

 private:
  double t0_;
  double t1_;
  std::vector<double> quench_times_;
  std::vector<HamiltonianFn> segments_;
  Eigen::Index dim_ = 0;
};

}  // namespace nhtdse
