#include "nhtdse/schedule.hpp"

#include <algorithm>
#include <stdexcept>

#include "nhtdse/errors.hpp"

namespace nhtdse {

HamiltonianSchedule::HamiltonianSchedule(double t0, double t1, std::vector<double> quench_times,
                                         std::vector<HamiltonianFn> segments)
    : t0_(t0), t1_(t1), quench_times_(std::move(quench_times)), segments_(std::move(segments)) {
  if (!(t1_ > t0_)) throw std::invalid_argument("schedule needs t1 > t0");
  if (segments_.size() != quench_times_.size() + 1) {
    throw std::invalid_argument("schedule needs exactly one more segment than quench times");
  }
  for (std::size_t k = 0; k < quench_times_.size(); ++k) {
    const double tq = quench_times_[k];
    if (!(tq > t0_ && tq < t1_)) throw std::invalid_argument("quench time outside the open time span");
    if (k > 0 && !(tq > quench_times_[k - 1])) {
      throw std::invalid_argument("quench times must be strictly increasing");
    }
  }
  for (const auto& s : segments_) {
    if (!s) throw std::invalid_argument("empty Hamiltonian segment");
  }
  const Matrix h0 = segments_.front()(t0_);
  require_square(h0, "H(t0)");
  dim_ = h0.rows();
}

HamiltonianSchedule HamiltonianSchedule::smooth(double t0, double t1, HamiltonianFn h) {
  return HamiltonianSchedule(t0, t1, {}, {std::move(h)});
}

HamiltonianSchedule HamiltonianSchedule::constant(double t0, double t1, const Matrix& h) {
  return smooth(t0, t1, [h](double) { return h; });
}

std::size_t HamiltonianSchedule::segment_index(double t) const {
  const auto it = std::upper_bound(quench_times_.begin(), quench_times_.end(), t);
  return static_cast<std::size_t>(it - quench_times_.begin());
}

Matrix HamiltonianSchedule::operator()(double t) const { return segments_[segment_index(t)](t); }

Matrix HamiltonianSchedule::left_limit(double t) const {
  const auto it = std::lower_bound(quench_times_.begin(), quench_times_.end(), t);
  return segments_[static_cast<std::size_t>(it - quench_times_.begin())](t);
}

}  // namespace nhtdse
