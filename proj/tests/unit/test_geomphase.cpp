#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nhtdse/errors.hpp"
#include "nhtdse/geomphase.hpp"

using namespace nhtdse;
using std::numbers::pi;

namespace {

using Params = std::vector<std::pair<std::string, double>>;

double biortho_defect(const BlochStates& s) {
  return std::abs(s.bra1.dot(s.ket1) - 1.0) + std::abs(s.bra2.dot(s.ket2) - 1.0) +
         std::abs(s.bra1.dot(s.ket2)) + std::abs(s.bra2.dot(s.ket1));
}

}  // namespace

TEST_CASE("Bloch states are biorthonormal", "[geomphase]") {
  SECTION("hermitian point") {
    const BlochStates s = bloch_states({0.8, 0.3, 0.8, 0.3});
    CHECK((s.ket1 - s.bra1).norm() < 1e-14);
    CHECK((s.ket2 - s.bra2).norm() < 1e-14);
    CHECK(biortho_defect(s) < 1e-12);
    CHECK(std::abs(s.ket1.dot(s.ket2)) < 1e-14);
  }
  SECTION("equator") {
    const BlochStates s = bloch_states({pi / 2, 0, pi / 2, 0});
    const double r = 1 / std::sqrt(2.0);
    CHECK((s.ket1 - Vector(Eigen::Vector2cd(r, r))).norm() < 1e-14);
    CHECK((s.ket2 - Vector(Eigen::Vector2cd(r, -r))).norm() < 1e-14);
  }
  SECTION("distinct left and right angles") {
    CHECK(biortho_defect(bloch_states({pi / 2, 0, pi / 3, 0})) < 1e-12);
    CHECK(biortho_defect(bloch_states({1.1, 0.4, 0.6, -0.9})) < 1e-12);
  }
  SECTION("nearly orthogonal left and right states") {
    try {
      bloch_states({0.0, 0.0, pi - 1e-8, 0.0});
      FAIL("expected DegenerateOverlap");
    } catch (const NumericalError& e) {
      CHECK(e.kind() == ErrorKind::DegenerateOverlap);
    }
  }
}

TEST_CASE("analytic state derivatives match finite differences", "[geomphase]") {
  const BlochAngles a{1.1, 0.4, 0.6, -0.9}, r{0.3, -0.7, 1.2, 0.5};
  const double h = 1e-6;
  auto shift = [&](double e) {
    return BlochAngles{a.theta + e * r.theta, a.phi + e * r.phi, a.theta_p + e * r.theta_p, a.phi_p + e * r.phi_p};
  };
  const BlochStates p = bloch_states(shift(h)), m = bloch_states(shift(-h));
  const BlochStates d = bloch_state_rates(a, r);
  CHECK(((p.ket1 - m.ket1) / (2 * h) - d.ket1).norm() < 1e-8);
  CHECK(((p.ket2 - m.ket2) / (2 * h) - d.ket2).norm() < 1e-8);
  CHECK(((p.bra1 - m.bra1) / (2 * h) - d.bra1).norm() < 1e-8);
  CHECK(((p.bra2 - m.bra2) / (2 * h) - d.bra2).norm() < 1e-8);
}

TEST_CASE("three forms of the phase rate agree", "[geomphase]") {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(0.3, 2.8), w(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const double th = u(rng);
    const BlochAngles a{th, w(rng), th + 0.3 * w(rng), w(rng) * 0.5};
    const BlochAngles r{w(rng), w(rng), w(rng), w(rng)};
    const PhaseRates g = geometric_phase_rates(bloch_frame(a, r));
    for (Eigen::Index n = 0; n < 2; ++n) {
      CHECK(std::abs(g.metric_form(n).imag()) < 1e-10);
      CHECK(std::abs(g.metric_form(n) - g.biorthogonal(n)) < 1e-8);
      CHECK(std::abs(g.metric_form(n) - g.left_space(n)) < 1e-8);
    }
  }
  // hermitian real vectors with a real derivative orthogonal to them: zero rate
  const PhaseRates h = geometric_phase_rates(bloch_frame({1.0, 0.0, 1.0, 0.0}, {0.5, 0.0, 0.5, 0.0}));
  CHECK(std::abs(h.metric_form(0)) < 1e-14);
  CHECK(std::abs(h.metric_form(1)) < 1e-14);
}

TEST_CASE("hermitian exchanges give pi for every path family", "[geomphase]") {
  const std::vector<std::pair<std::string, Params>> fams{
      {"great_circle", {}},
      {"tilted", {{"theta0", 1.0}}},
      {"wobble", {{"theta0", 1.0}, {"amplitude", 0.3}}},
      {"winding", {{"theta0", 1.2}, {"turns", 2}}},
      {"hermitian_loop", {{"theta0", 1.0}, {"rho", 0.4}}},
  };
  for (const auto& [name, params] : fams) {
    const PhaseResult r = exchange_phase(make_trace(name, params, 4000));
    INFO(name);
    CHECK(std::abs(phase_distance(r.gamma_total, pi)) < 1e-6);
    CHECK(std::abs(phase_distance(r.gamma_1 + r.gamma_2, r.gamma_total)) < 1e-12);
  }
  const PhaseResult gc = exchange_phase(make_trace("great_circle", {}, 1000));
  CHECK(std::abs(gc.open_gamma_1 + pi / 2) < 1e-12);
  CHECK(gc.path_class == PathClass::NoLoop);
}

TEST_CASE("NH exchange phases", "[geomphase]") {
  const PhaseResult noloop = exchange_phase(make_trace("nh_noloop", {{"theta0", pi / 2}, {"theta0_p", pi / 3}}, 2000));
  CHECK(std::abs(phase_distance(noloop.gamma_total, pi)) < 1e-5);
  CHECK(noloop.error_estimate < 1e-5);

  // individual phases depend on the loop, their sum does not
  const PhaseResult a = exchange_phase(make_trace("nh_loop", {{"theta0", pi / 2}, {"theta0_p", pi / 3}, {"rho", 0.2}}, 4000));
  const PhaseResult b = exchange_phase(make_trace("nh_loop", {{"theta0", pi / 2}, {"theta0_p", pi / 3}, {"rho", 0.4}}, 4000));
  CHECK(a.path_class == PathClass::Loop);
  CHECK(std::abs(phase_distance(a.gamma_1, b.gamma_1)) > 1e-3);
  CHECK(std::abs(phase_distance(a.gamma_total, b.gamma_total)) < 1e-5);
}

TEST_CASE("trapezoid error falls as steps^-2", "[geomphase]") {
  const TraceSpec base = make_trace("nh_loop", {{"theta0", pi / 2}, {"theta0_p", pi / 3}, {"rho", 0.3}}, 250);
  auto open1 = [&](int steps) {
    TraceSpec t = base;
    t.steps = steps;
    return exchange_phase(t).open_gamma_1;
  };
  const double e1 = std::abs(open1(250) - open1(500));
  const double e2 = std::abs(open1(500) - open1(1000));
  // at least second order; zero end speed of the trace can make it faster
  CHECK(e1 / e2 > 3.5);
}

TEST_CASE("reparameterization leaves the total unchanged", "[geomphase]") {
  const TraceSpec t = make_trace("wobble", {{"theta0", 1.0}, {"amplitude", 0.3}}, 8000);
  const TraceSpec r = reparameterize(
      t, [](double s) { return s - 0.1 * std::sin(2 * pi * s) / (2 * pi); },
      [](double s) { return 1 - 0.1 * std::cos(2 * pi * s); });
  CHECK(std::abs(phase_distance(exchange_phase(t).gamma_total, exchange_phase(r).gamma_total)) < 1e-8);
}

TEST_CASE("trace factory validation", "[geomphase]") {
  CHECK_THROWS_AS(make_trace("spiral", {}, 100), std::invalid_argument);
  CHECK_THROWS_AS(make_trace("tilted", {}, 100), std::invalid_argument);
  CHECK_THROWS_AS(make_trace("tilted", {{"theta0", 1.0}, {"rho", 1.0}}, 100), std::invalid_argument);
  CHECK_THROWS_AS(make_trace("tilted", {{"theta0", 4.0}}, 100), std::invalid_argument);
  CHECK(trace_families().size() == 7);
}

TEST_CASE("slow NewNH evolution accumulates the same open-path phase", "[geomphase][slow]") {
  TraceSpec t = make_trace("nh_noloop", {{"theta0", pi / 2}, {"theta0_p", pi / 3}}, 2000);
  // second-order adiabatic error goes as rate / gap
  t.e1 = cplx(2.0, -0.002);
  t.e2 = cplx(-2.0, 0.002);
  const AdiabaticCheck c = adiabatic_phase_check(t, 1e-3);
  CHECK(std::abs(c.difference) < 1e-3);
  CHECK(c.leakage < 1e-2);
}
