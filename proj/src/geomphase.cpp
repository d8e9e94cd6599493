#include "nhtdse/geomphase.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nhtdse/errors.hpp"

namespace nhtdse {

namespace {

constexpr double kPi = std::numbers::pi;

Vector bloch_u(double a, double b) {
  Vector u(2);
  u << std::cos(a / 2), std::sin(a / 2) * std::exp(kI * b);
  return u;
}

// d u(a(s), b(s)) / ds
Vector bloch_u_rate(double a, double b, double da, double db) {
  Vector du(2);
  du << -0.5 * std::sin(a / 2) * da,
      std::exp(kI * b) * (0.5 * std::cos(a / 2) * da + kI * std::sin(a / 2) * db);
  return du;
}

cplx inner(const Vector& x, const Vector& y) { return x.dot(y); }  // x^dagger y

void require_overlap(cplx a, const char* which) {
  if (std::abs(a) < kMinBlochOverlap) {
    throw NumericalError(ErrorKind::DegenerateOverlap,
                         std::string(which) + " = " + std::to_string(std::abs(a)) +
                             " (left and right states nearly orthogonal)");
  }
}

}  // namespace

BlochStates bloch_states(const BlochAngles& g) {
  const Vector r1 = bloch_u(g.theta, g.phi);
  const Vector l1 = bloch_u(g.theta_p, g.phi_p);
  const Vector r2 = bloch_u(kPi - g.theta_p, g.phi_p + kPi);
  const Vector l2 = bloch_u(kPi - g.theta, g.phi + kPi);
  BlochStates s;
  s.a1 = inner(l1, r1);
  s.a2 = inner(l2, r2);
  require_overlap(s.a1, "|A|");
  require_overlap(s.a2, "|A2|");
  s.ket1 = r1 / s.a1;
  s.bra1 = l1;
  s.ket2 = r2 / s.a2;
  s.bra2 = l2;
  return s;
}

BlochStates bloch_state_rates(const BlochAngles& g, const BlochAngles& d) {
  const Vector r1 = bloch_u(g.theta, g.phi);
  const Vector l1 = bloch_u(g.theta_p, g.phi_p);
  const Vector r2 = bloch_u(kPi - g.theta_p, g.phi_p + kPi);
  const Vector l2 = bloch_u(kPi - g.theta, g.phi + kPi);
  const Vector dr1 = bloch_u_rate(g.theta, g.phi, d.theta, d.phi);
  const Vector dl1 = bloch_u_rate(g.theta_p, g.phi_p, d.theta_p, d.phi_p);
  const Vector dr2 = bloch_u_rate(kPi - g.theta_p, g.phi_p + kPi, -d.theta_p, d.phi_p);
  const Vector dl2 = bloch_u_rate(kPi - g.theta, g.phi + kPi, -d.theta, d.phi);

  const cplx a1 = inner(l1, r1);
  const cplx a2 = inner(l2, r2);
  require_overlap(a1, "|A|");
  require_overlap(a2, "|A2|");

  BlochStates s;
  s.a1 = inner(dl1, r1) + inner(l1, dr1);
  s.a2 = inner(dl2, r2) + inner(l2, dr2);
  s.ket1 = dr1 / a1 - r1 * (s.a1 / (a1 * a1));
  s.ket2 = dr2 / a2 - r2 * (s.a2 / (a2 * a2));
  s.bra1 = dl1;
  s.bra2 = dl2;
  return s;
}

KetFrame bloch_frame(const BlochAngles& angles, const BlochAngles& rates) {
  const BlochStates s = bloch_states(angles);
  const BlochStates d = bloch_state_rates(angles, rates);
  KetFrame f;
  f.right.resize(2, 2);
  f.left.resize(2, 2);
  f.right_dot.resize(2, 2);
  f.left_dot.resize(2, 2);
  f.right << s.ket1, s.ket2;
  f.left << s.bra1, s.bra2;
  f.right_dot << d.ket1, d.ket2;
  f.left_dot << d.bra1, d.bra2;
  return f;
}

Vector geometric_phase_increment(const KetFrame& f, const Matrix& tilde, const Matrix& dtilde) {
  const Eigen::Index n = f.right.cols();
  Vector g(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vector ket = f.right.col(k);
    g(k) = kI * (inner(ket, tilde * f.right_dot.col(k)) + 0.5 * inner(ket, dtilde * ket));
  }
  return g;
}

PhaseRates geometric_phase_rates(const KetFrame& f) {
  const Matrix tilde = f.left * f.left.adjoint();
  const Matrix dtilde = f.left_dot * f.left.adjoint() + f.left * f.left_dot.adjoint();
  const Matrix tilde_inv = f.right * f.right.adjoint();
  const Matrix dtilde_inv = f.right_dot * f.right.adjoint() + f.right * f.right_dot.adjoint();

  PhaseRates r;
  r.metric_form = geometric_phase_increment(f, tilde, dtilde);
  const Eigen::Index n = f.right.cols();
  r.biorthogonal.resize(n);
  r.left_space.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vector ket = f.right.col(k);
    const Vector lket = f.left.col(k);
    r.biorthogonal(k) =
        0.5 * kI * (inner(lket, f.right_dot.col(k)) + inner(ket, f.left_dot.col(k)));
    r.left_space(k) =
        kI * (inner(lket, tilde_inv * f.left_dot.col(k)) + 0.5 * inner(lket, dtilde_inv * lket));
  }
  return r;
}

double wrap_phase(double x) {
  double w = std::fmod(x, 2 * kPi);
  if (w < 0) w += 2 * kPi;
  if (w >= 2 * kPi) w = 0;
  return w;
}

double phase_distance(double a, double b) {
  double d = wrap_phase(a - b);
  if (d > kPi) d -= 2 * kPi;
  return d;
}

namespace {

struct OpenPhases {
  double g1 = 0;
  double g2 = 0;
};

OpenPhases integrate_open(const TraceSpec& trace, int steps) {
  OpenPhases out;
  BlochStates prev;
  for (int k = 0; k <= steps; ++k) {
    const double s = static_cast<double>(k) / steps;
    const PathPoint p = trace.path(s);
    const KetFrame f = bloch_frame(p.angles, p.rates);
    const Vector g = geometric_phase_rates(f).metric_form;
    const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
    out.g1 += w * g(0).real();
    out.g2 += w * g(1).real();

    BlochStates cur = bloch_states(p.angles);
    if (k > 0) {
      const double o1 = std::abs(inner(prev.bra1, cur.ket1));
      const double o2 = std::abs(inner(prev.bra2, cur.ket2));
      if (o1 < 0.5 || o2 < 0.5) {
        throw NumericalError(ErrorKind::TrackingLost,
                             "state overlap " + std::to_string(std::min(o1, o2)) + " at s = " +
                                 std::to_string(s) + "; increase steps");
      }
    }
    prev = std::move(cur);
  }
  out.g1 /= steps;
  out.g2 /= steps;
  return out;
}

struct Closure {
  double c1 = 0;  // arg <<2(0)|1(1)>
  double c2 = 0;  // arg <<1(0)|2(1)>
};

Closure closure_phases(const TraceSpec& trace) {
  const BlochStates start = bloch_states(trace.path(0.0).angles);
  const BlochStates end = bloch_states(trace.path(1.0).angles);
  const cplx o1 = inner(start.bra2, end.ket1);
  const cplx o2 = inner(start.bra1, end.ket2);
  if (std::abs(o1) < 0.5 || std::abs(o2) < 0.5) {
    throw NumericalError(ErrorKind::TrackingLost,
                         "trace does not close: end states do not exchange the start states");
  }
  return {std::arg(o1), std::arg(o2)};
}

}  // namespace

PhaseResult exchange_phase(const TraceSpec& trace) {
  if (!trace.path) throw std::invalid_argument("trace has no path");
  if (trace.steps < 2) throw std::invalid_argument("trace needs at least 2 steps");

  const Closure c = closure_phases(trace);
  const OpenPhases coarse = integrate_open(trace, trace.steps);
  const OpenPhases fine = integrate_open(trace, 2 * trace.steps);

  PhaseResult r;
  r.path_class = trace.path_class;
  r.open_gamma_1 = coarse.g1;
  r.open_gamma_2 = coarse.g2;
  r.gamma_1 = wrap_phase(coarse.g1 + c.c1);
  r.gamma_2 = wrap_phase(coarse.g2 + c.c2);
  r.gamma_total = wrap_phase(coarse.g1 + coarse.g2 + c.c1 + c.c2);
  const double fine_total = wrap_phase(fine.g1 + fine.g2 + c.c1 + c.c2);
  r.error_estimate = std::abs(phase_distance(r.gamma_total, fine_total));
  return r;
}

namespace {

double param(const std::vector<std::pair<std::string, double>>& params, std::string_view family,
             std::string_view name) {
  for (const auto& [k, v] : params) {
    if (k == name) return v;
  }
  throw std::invalid_argument("trace family '" + std::string(family) + "' needs parameter '" +
                              std::string(name) + "'");
}

void reject_extra(const std::vector<std::pair<std::string, double>>& params, std::string_view family,
                  std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : params) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) {
      throw std::invalid_argument("trace family '" + std::string(family) +
                                  "' has no parameter '" + k + "'");
    }
  }
}

// Circular detour of radius rho in (theta, phi), traversed once over
// s in [0.25, 0.75] with zero speed at both ends.
struct Detour {
  double d_theta = 0, d_phi = 0, r_theta = 0, r_phi = 0;
};

Detour detour(double rho, double s) {
  Detour d;
  if (rho == 0.0 || s <= 0.25 || s >= 0.75) return d;
  const double sigma = (s - 0.25) / 0.5;
  const double u = sigma - std::sin(2 * kPi * sigma) / (2 * kPi);
  const double du = (1 - std::cos(2 * kPi * sigma)) / 0.5;
  d.d_theta = rho * std::sin(2 * kPi * u);
  d.d_phi = rho * (1 - std::cos(2 * kPi * u));
  d.r_theta = rho * 2 * kPi * std::cos(2 * kPi * u) * du;
  d.r_phi = rho * 2 * kPi * std::sin(2 * kPi * u) * du;
  return d;
}

struct Shape {
  double theta0 = kPi / 2;
  double theta0_p = kPi / 2;
  double wobble = 0;
  double turns = 0;
  double rho_right = 0;
  double rho_left = 0;
};

// Right trace (theta0, 0) -> (pi - theta0_p, pi), left trace
// (theta0_p, 0) -> (pi - theta0, pi), so state 1 ends on state 2's start.
TracePath shape_path(Shape sh) {
  return [sh](double s) {
    PathPoint p;
    const double span_r = kPi - sh.theta0_p - sh.theta0;
    const double span_l = kPi - sh.theta0 - sh.theta0_p;
    const double wob = sh.wobble * std::sin(2 * kPi * s);
    const double dwob = sh.wobble * 2 * kPi * std::cos(2 * kPi * s);
    const double dphi = kPi + 2 * kPi * sh.turns;
    const Detour dr = detour(sh.rho_right, s);
    const Detour dl = detour(sh.rho_left, s);

    p.angles.theta = sh.theta0 + span_r * s + wob + dr.d_theta;
    p.angles.phi = dphi * s + dr.d_phi;
    p.angles.theta_p = sh.theta0_p + span_l * s + wob + dl.d_theta;
    p.angles.phi_p = dphi * s + dl.d_phi;
    p.rates.theta = span_r + dwob + dr.r_theta;
    p.rates.phi = dphi + dr.r_phi;
    p.rates.theta_p = span_l + dwob + dl.r_theta;
    p.rates.phi_p = dphi + dl.r_phi;
    return p;
  };
}

}  // namespace

std::vector<std::string_view> trace_families() {
  return {"great_circle", "tilted", "wobble", "winding", "hermitian_loop", "nh_noloop", "nh_loop"};
}

TraceSpec make_trace(std::string_view family,
                     const std::vector<std::pair<std::string, double>>& params, int steps) {
  TraceSpec t;
  t.family = std::string(family);
  t.params = params;
  t.steps = steps;
  Shape sh;
  if (family == "great_circle") {
    reject_extra(params, family, {});
  } else if (family == "tilted") {
    reject_extra(params, family, {"theta0"});
    sh.theta0 = sh.theta0_p = param(params, family, "theta0");
  } else if (family == "wobble") {
    reject_extra(params, family, {"theta0", "amplitude"});
    sh.theta0 = sh.theta0_p = param(params, family, "theta0");
    sh.wobble = param(params, family, "amplitude");
  } else if (family == "winding") {
    reject_extra(params, family, {"theta0", "turns"});
    sh.theta0 = sh.theta0_p = param(params, family, "theta0");
    sh.turns = param(params, family, "turns");
    if (sh.turns != std::round(sh.turns)) throw std::invalid_argument("winding turns must be an integer");
  } else if (family == "hermitian_loop") {
    reject_extra(params, family, {"theta0", "rho"});
    sh.theta0 = sh.theta0_p = param(params, family, "theta0");
    sh.rho_right = sh.rho_left = param(params, family, "rho");
    t.path_class = PathClass::Loop;
  } else if (family == "nh_noloop") {
    reject_extra(params, family, {"theta0", "theta0_p"});
    sh.theta0 = param(params, family, "theta0");
    sh.theta0_p = param(params, family, "theta0_p");
  } else if (family == "nh_loop") {
    reject_extra(params, family, {"theta0", "theta0_p", "rho"});
    sh.theta0 = param(params, family, "theta0");
    sh.theta0_p = param(params, family, "theta0_p");
    sh.rho_left = param(params, family, "rho");
    t.path_class = PathClass::Loop;
  } else {
    throw std::invalid_argument("unknown trace family '" + std::string(family) + "'");
  }
  for (double th : {sh.theta0, sh.theta0_p}) {
    if (!(th > 0.0 && th < kPi)) throw std::invalid_argument("theta0 must lie in (0, pi)");
  }
  t.path = shape_path(sh);
  return t;
}

TraceSpec reparameterize(const TraceSpec& trace, std::function<double(double)> f,
                         std::function<double(double)> fp) {
  TraceSpec out = trace;
  out.path = [base = trace.path, f = std::move(f), fp = std::move(fp)](double s) {
    PathPoint p = base(f(s));
    const double k = fp(s);
    p.rates.theta *= k;
    p.rates.phi *= k;
    p.rates.theta_p *= k;
    p.rates.phi_p *= k;
    return p;
  };
  return out;
}

AdiabaticCheck adiabatic_phase_check(const TraceSpec& trace, double rate,
                                     const IntegratorOptions& opts) {
  if (!(rate > 0.0)) throw std::invalid_argument("rate must be positive");
  const double big_t = 1.0 / rate;
  const cplx e1 = trace.e1;
  const cplx e2 = trace.e2;
  const TracePath path = trace.path;

  auto h_of = [path, e1, e2, big_t](double t) {
    const BlochStates b = bloch_states(path(t / big_t).angles);
    Matrix r(2, 2), l(2, 2);
    r << b.ket1, b.ket2;
    l << b.bra1, b.bra2;
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = e1;
    d(1, 1) = e2;
    return Matrix(r * d * l.adjoint());
  };
  const HamiltonianSchedule schedule = HamiltonianSchedule::smooth(0.0, big_t, h_of);

  const BlochStates start = bloch_states(path(0.0).angles);
  const BlochStates end = bloch_states(path(1.0).angles);
  const double t_end[] = {big_t};
  const Trajectory tr = evolve(TdseVariant::NewNH, schedule, start.ket1, t_end, opts);
  const Vector& psi = tr.samples.back().wave.psi;

  AdiabaticCheck c;
  c.extracted = std::arg(inner(end.bra1, psi)) + e1.real() * big_t;
  c.predicted = exchange_phase(trace).open_gamma_1;
  c.difference = phase_distance(c.extracted, c.predicted);
  c.leakage = std::abs(inner(end.bra2, psi));
  return c;
}

}  // namespace nhtdse
