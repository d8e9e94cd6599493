#include "nhtdse/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nhtdse/config.hpp"
#include "nhtdse/errors.hpp"

namespace nhtdse {

using nlohmann::json;

namespace {

constexpr int kMaxDim = 64;
constexpr int kDefaultSamples = 101;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = scale * cplx(u(rng), u(rng));
  return m;
}

struct RandomSmooth {
  Matrix v0, v1, v2;
  std::vector<cplx> e0;
  std::vector<double> amp, freq, phase;
  double omega1 = 0, omega2 = 0;

  Matrix operator()(double t) const {
    const Matrix v = v0 + std::sin(omega1 * t) * v1 + std::cos(omega2 * t) * v2;
    Matrix ve = v;
    for (Eigen::Index i = 0; i < v.cols(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      ve.col(i) *= e0[k] + amp[k] * std::sin(freq[k] * t + phase[k]);
    }
    // H = V E V^-1 through H^T = V^-T (V E)^T
    return v.transpose().partialPivLu().solve(ve.transpose()).transpose();
  }
};

RandomSmooth random_smooth(std::mt19937_64& rng, int dim, double spacing, double im_scale,
                           double drive) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Eigen::Index n = dim;
  const double sc = drive / std::sqrt(double(n));
  RandomSmooth s;
  s.v0 = Matrix::Identity(n, n) + random_matrix(rng, n, 0.35 * sc);
  s.v1 = random_matrix(rng, n, 0.15 * sc);
  s.v2 = random_matrix(rng, n, 0.15 * sc);
  s.omega1 = 0.5 + 0.5 * std::abs(u(rng));
  s.omega2 = 0.3 + 0.5 * std::abs(u(rng));
  for (int i = 0; i < dim; ++i) {
    s.e0.emplace_back(spacing * (i + 0.1 * u(rng)), im_scale * u(rng));
    s.amp.push_back(0.2 * spacing * std::abs(u(rng)));
    s.freq.push_back(0.2 + 0.6 * std::abs(u(rng)));
    s.phase.push_back(3.0 * u(rng));
  }
  return s;
}

void check_square(const ConfigNode& node, std::string_view key, const Matrix& m, Eigen::Index dim) {
  if (m.rows() != m.cols()) throw ConfigError(node.path_of(key) + ": must be square");
  if (dim > 0 && m.rows() != dim) throw ConfigError(node.path_of(key) + ": dimension differs from h0");
  if (m.rows() > kMaxDim) throw ConfigError(node.path_of(key) + ": dimension above " + std::to_string(kMaxDim));
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed, const std::string& who) {
  if (!seed) throw ConfigError(who + ": needs a top-level seed");
  return *seed;
}

HamiltonianFn parse_segment(const ConfigNode& seg, std::size_t index, const std::optional<std::uint64_t>& seed,
                            bool& uses_seed) {
  const std::string type = seg.string("type");
  if (type == "matrix") {
    const Matrix h0 = seg.matrix("h0");
    check_square(seg, "h0", h0, 0);
    Matrix h1 = Matrix::Zero(h0.rows(), h0.cols());
    Matrix h2 = h1;
    double omega = 0;
    if (seg.has("h1") || seg.has("h2")) {
      if (seg.has("h1")) h1 = seg.matrix("h1");
      if (seg.has("h2")) h2 = seg.matrix("h2");
      check_square(seg, "h1", h1, h0.rows());
      check_square(seg, "h2", h2, h0.rows());
      omega = seg.number("omega");
    }
    return [h0, h1, h2, omega](double t) -> Matrix {
      return h0 + std::cos(omega * t) * h1 + std::sin(omega * t) * h2;
    };
  }
  if (type == "pt_dimer") {
    const double gain = seg.number("gain");
    const double j0 = seg.number("coupling");
    const double amp = seg.number("coupling_amp");
    const double omega = seg.number("omega");
    return [gain, j0, amp, omega](double t) -> Matrix {
      const double j = j0 + amp * std::cos(omega * t);
      Matrix h(2, 2);
      h << cplx(0, gain), j, j, cplx(0, -gain);
      return h;
    };
  }
  if (type == "diagonal") {
    const Vector e = seg.complex_vector("energies");
    if (e.size() > kMaxDim) throw ConfigError(seg.path_of("energies") + ": too many levels");
    const Matrix h = e.asDiagonal();
    return [h](double) -> Matrix { return h; };
  }
  if (type == "random_smooth") {
    const auto dim = seg.integer("dim");
    if (dim < 1 || dim > kMaxDim) throw ConfigError(seg.path_of("dim") + ": must be in [1, 64]");
    const double spacing = seg.number("level_spacing");
    const double im_scale = seg.number("im_scale");
    const double drive = seg.number("drive");
    if (!(spacing > 0)) throw ConfigError(seg.path_of("level_spacing") + ": must be positive");
    if (im_scale < 0 || drive < 0) throw ConfigError(seg.path_of("drive") + ": im_scale and drive must be non-negative");
    uses_seed = true;
    auto rng = make_rng(require_seed(seed, seg.path_of("type")), index);
    return random_smooth(rng, static_cast<int>(dim), spacing, im_scale, drive);
  }
  throw ConfigError(seg.path_of("type") + ": unknown segment type '" + type +
                    "' (matrix, pt_dimer, diagonal, random_smooth)");
}

ScheduleSpec parse_schedule(const ConfigNode& node, const std::optional<std::uint64_t>& seed) {
  ScheduleSpec s;
  s.t0 = node.number("t0");
  s.t1 = node.number("t1");
  if (!(s.t1 > s.t0)) throw ConfigError(node.path_of("t1") + ": must exceed t0");
  const auto segs = node.table_array("segment");
  double prev = s.t0;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const bool last = k + 1 == segs.size();
    if (!last) {
      const double end = segs[k].number("end");
      if (!(end > prev) || !(end < s.t1)) {
        throw ConfigError(segs[k].path_of("end") + ": segment ends must increase strictly inside (t0, t1)");
      }
      s.quench_times.push_back(end);
      prev = end;
    } else if (segs[k].has("end")) {
      throw ConfigError(segs[k].path_of("end") + ": the last segment runs to t1 and takes no end");
    }
    s.segments.push_back(parse_segment(segs[k], k, seed, s.uses_seed));
  }
  // shapes are checked here so a bad schedule is a config error, not a numerical one
  Eigen::Index dim = 0;
  for (std::size_t k = 0; k < s.segments.size(); ++k) {
    const double t = k == 0 ? s.t0 : s.quench_times[k - 1];
    const Matrix h = s.segments[k](t);
    if (!h.allFinite()) throw ConfigError(segs[k].path_of("type") + ": Hamiltonian is not finite at segment start");
    if (dim != 0 && h.rows() != dim) throw ConfigError(segs[k].path_of("type") + ": dimension differs from earlier segments");
    dim = h.rows();
  }
  return s;
}

Vector parse_state(const ConfigNode& node, Eigen::Index dim, const std::optional<std::uint64_t>& seed) {
  const bool random = node.optional_boolean("random").value_or(false);
  if (random == node.has("psi0")) throw ConfigError(node.path_of("psi0") + ": give exactly one of psi0 or random = true");
  Vector psi;
  if (random) {
    auto rng = make_rng(require_seed(seed, node.path_of("random")), 1000);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    psi.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) psi(i) = cplx(u(rng), u(rng));
  } else {
    psi = node.complex_vector("psi0");
    if (psi.size() != dim) {
      throw ConfigError(node.path_of("psi0") + ": needs " + std::to_string(dim) + " components");
    }
  }
  if (psi.norm() == 0.0) throw ConfigError(node.path_of("psi0") + ": state is zero");
  return psi / psi.norm();
}

TdseVariant variant_from(const ConfigNode& node, const std::string& name, std::string_view key) {
  const auto v = parse_variant(name);
  if (!v) throw ConfigError(node.path_of(key) + ": unknown variant '" + name + "' (Standard, NewNH, LeftNH, Wieser, Gong)");
  return *v;
}

IntegratorOptions parse_integrator(const std::optional<ConfigNode>& node) {
  IntegratorOptions o;
  if (!node) return o;
  o.rtol = node->optional_number("rtol").value_or(o.rtol);
  o.atol = node->optional_number("atol").value_or(o.atol);
  o.max_step = node->optional_number("max_step").value_or(o.max_step);
  o.initial_step = node->optional_number("initial_step").value_or(o.initial_step);
  o.fixed_step = node->optional_number("fixed_step").value_or(o.fixed_step);
  o.metric_fd_step = node->optional_number("metric_fd_step").value_or(o.metric_fd_step);
  if (auto n = node->optional_integer("max_steps")) {
    if (*n < 1) throw ConfigError(node->path_of("max_steps") + ": must be positive");
    o.max_steps = static_cast<std::size_t>(*n);
  }
  if (!(o.rtol > 0) || !(o.atol > 0) || !(o.max_step > 0) || !(o.metric_fd_step > 0) ||
      o.initial_step < 0 || o.fixed_step < 0) {
    throw ConfigError(node->path_of("rtol") + ": tolerances and steps must be positive");
  }
  return o;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(i + 1 == n ? b : a + (b - a) * i / (n - 1));
  return out;
}

EvolveSetup parse_evolve(const ConfigNode& root, ExperimentKind kind, const std::optional<std::uint64_t>& seed,
                         int samples) {
  EvolveSetup s;
  s.schedule = parse_schedule(root.section("schedule"), seed);
  if (kind == ExperimentKind::Quench && s.schedule.quench_times.empty()) {
    throw ConfigError("schedule.segment: a quench experiment needs at least two segments");
  }
  const Eigen::Index dim = s.schedule.segments.front()(s.schedule.t0).rows();
  s.psi0 = parse_state(root.section("state"), dim, seed);
  if (kind == ExperimentKind::CompareTdse) {
    const auto names = root.string_list("variants");
    if (names.size() < 2) throw ConfigError("variants: name at least two variants");
    for (const auto& n : names) {
      const TdseVariant v = variant_from(root, n, "variants");
      if (std::find(s.variants.begin(), s.variants.end(), v) != s.variants.end()) {
        throw ConfigError("variants: '" + n + "' listed twice");
      }
      s.variants.push_back(v);
    }
    if (std::find(s.variants.begin(), s.variants.end(), TdseVariant::NewNH) == s.variants.end()) {
      throw ConfigError("variants: NewNH is the reference and must be listed");
    }
  } else {
    s.variants.push_back(variant_from(root, root.string("variant"), "variant"));
  }
  s.output_times = linspace(s.schedule.t0, s.schedule.t1, samples);
  return s;
}

GeomphaseSetup parse_geomphase(const ConfigNode& root, int samples) {
  const ConfigNode tr = root.section("trace");
  const std::string family = tr.string("family");
  const auto steps = tr.integer("steps");
  if (steps < 2 || steps > 10'000'000) throw ConfigError(tr.path_of("steps") + ": must be in [2, 1e7]");
  std::vector<std::pair<std::string, double>> params;
  if (tr.has("params")) params = tr.number_table("params");
  GeomphaseSetup g;
  try {
    g.trace = make_trace(family, params, static_cast<int>(steps));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(tr.path_of("family") + ": " + e.what());
  }
  if (auto rate = tr.optional_number("adiabatic_rate")) {
    if (!(*rate > 0) || *rate > 1) throw ConfigError(tr.path_of("adiabatic_rate") + ": must be in (0, 1]");
    g.adiabatic_rate = rate;
    g.trace.e1 = tr.complex("e1");
    g.trace.e2 = tr.complex("e2");
  }
  g.rate_samples = samples;
  return g;
}

LrbSetup parse_lrb(const ConfigNode& root, const std::optional<std::uint64_t>& seed) {
  const ConfigNode lat = root.section("lattice");
  LrbSetup s;
  const auto sites = lat.integer("sites");
  if (sites < 2 || sites > kMaxDim) throw ConfigError(lat.path_of("sites") + ": must be in [2, 64]");
  auto& m = s.lattice;
  m.sites = static_cast<int>(sites);
  const auto n = static_cast<std::size_t>(sites);
  auto to_vec = [](const Vector& v) { return std::vector<cplx>(v.data(), v.data() + v.size()); };
  m.onsite = to_vec(lat.complex_vector_or_scalar("onsite", n));
  m.hop_right = to_vec(lat.complex_vector_or_scalar("hop_right", n - 1));
  m.hop_left = to_vec(lat.complex_vector_or_scalar("hop_left", n - 1));
  const ConfigNode ed = lat.section("edit");
  const std::string kind = ed.string("kind");
  if (kind == "bond") {
    m.edit.kind = LatticeModelSpec::EditKind::Bond;
    m.edit.right = ed.complex("right");
    m.edit.left = ed.complex("left");
  } else if (kind == "site") {
    m.edit.kind = LatticeModelSpec::EditKind::Site;
    m.edit.right = ed.complex("value");
  } else {
    throw ConfigError(ed.path_of("kind") + ": must be 'bond' or 'site'");
  }
  const auto index = ed.integer("index");
  if (index < 0 || index >= sites) throw ConfigError(ed.path_of("index") + ": out of range");
  m.edit.index = static_cast<int>(index);
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("lattice: ") + e.what());
  }
  s.psi0 = parse_state(root.section("state"), sites, seed);
  return s;
}

AnyonChainSpec parse_chain(const ConfigNode& root) {
  const ConfigNode ch = root.section("chain");
  AnyonChainSpec c;
  const auto sites = ch.integer("sites");
  if (sites < 2 || sites > kMaxAnyonSites) throw ConfigError(ch.path_of("sites") + ": must be in [2, 64]");
  c.sites = static_cast<int>(sites);
  c.hopping = ch.reals_or_scalar("hopping", static_cast<std::size_t>(sites - 1));
  c.kappa = ch.number("kappa");
  const auto filling = ch.integer("filling");
  const auto bond = ch.integer("quench_bond");
  if (filling < 0 || filling > sites) throw ConfigError(ch.path_of("filling") + ": out of range");
  if (bond < 0 || bond >= sites - 1) throw ConfigError(ch.path_of("quench_bond") + ": out of range");
  c.filling = static_cast<int>(filling);
  c.quench_bond = static_cast<int>(bond);
  c.quench_value = ch.number("quench_value");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("chain: ") + e.what());
  }
  return c;
}

json to_array(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// Distance after W~-normalization and global phase alignment, measured in
// the biorthogonal coordinates a = <<n|psi>.
double aligned_distance(const Vector& a_ref, Vector a) {
  const cplx z = a_ref.dot(a);
  if (std::abs(z) > 0) a *= std::conj(z) / std::abs(z);
  return (a - a_ref).norm();
}

ResultBundle run_evolve(const ScenarioConfig& cfg, const EvolveSetup& s) {
  const HamiltonianSchedule schedule = s.schedule.build();
  ResultBundle out;
  const Trajectory tr = evolve(s.variants.front(), schedule, s.psi0, s.output_times, cfg.integrator);
  out.tables.emplace_back("trajectory.csv", trajectory_csv(tr));

  CsvTable q({"t_q", "conservation_residual", "exchange_residual", "unitarity_residual", "jump_minus_identity"});
  double worst = 0;
  for (const auto& ev : tr.quenches) {
    const QuenchResiduals r = quench_residuals(ev);
    const double dev = (ev.jump - Matrix::Identity(ev.jump.rows(), ev.jump.cols())).norm();
    q.cell(ev.t_q).cell(r.conservation).cell(r.exchange).cell(r.unitarity).cell(dev);
    q.end_row();
    worst = std::max({worst, r.conservation, r.exchange});
  }
  out.tables.emplace_back("quenches.csv", std::move(q));

  const auto& last = tr.samples.back();
  out.summary = {{"variant", variant_name(tr.variant)},
                 {"unitarity_drift", tr.unitarity_drift},
                 {"final_populations", to_array(last.wave.populations)},
                 {"accepted_steps", tr.accepted_steps},
                 {"rejected_steps", tr.rejected_steps},
                 {"quench_count", tr.quenches.size()},
                 {"max_quench_residual", worst}};
  return out;
}

ResultBundle run_compare(const ScenarioConfig& cfg, const EvolveSetup& s) {
  const HamiltonianSchedule schedule = s.schedule.build();
  const BiorthoBasis start = eig_biortho(schedule(schedule.t0()));
  const BiorthoBasis end = eig_biortho(schedule(schedule.t1()));
  const Eigen::Index n = schedule.dim();
  // LeftNH propagates |Psi>> = W~|Psi>, with W~ = L^+ L
  const Vector chi0 = start.left.adjoint() * (start.left * s.psi0);

  struct Row {
    TdseVariant v;
    Trajectory tr;
    Vector coords;
  };
  std::vector<Row> rows;
  const Vector* ref = nullptr;
  for (TdseVariant v : s.variants) {
    Trajectory tr = evolve(v, schedule, v == TdseVariant::LeftNH ? chi0 : s.psi0, {}, cfg.integrator);
    Vector y = tr.samples.back().wave.psi;
    // back to right space with W~^-1 = V V^+
    if (v == TdseVariant::LeftNH) y = end.right * (end.right.adjoint() * y);
    Vector a = end.left * y;
    const double norm = a.norm();
    if (!(norm > 0)) throw NumericalError(ErrorKind::ZeroState, std::string(variant_name(v)) + " final state is zero");
    rows.push_back({v, std::move(tr), a / norm});
  }
  for (const auto& r : rows)
    if (r.v == TdseVariant::NewNH) ref = &r.coords;

  std::vector<std::string> header{"variant", "drift"};
  for (Eigen::Index k = 0; k < n; ++k) header.push_back("c" + std::to_string(k) + "_sq");
  header.push_back("distance_to_newnh");
  CsvTable t(header);
  ResultBundle out;
  json per = json::object();
  for (const auto& r : rows) {
    const double d = aligned_distance(*ref, r.coords);
    const RealVector& pop = r.tr.samples.back().wave.populations;
    t.cell(variant_name(r.v)).cell(r.tr.unitarity_drift);
    for (Eigen::Index k = 0; k < n; ++k) t.cell(pop(k));
    t.cell(d);
    t.end_row();
    per[std::string(variant_name(r.v))] = {{"drift", r.tr.unitarity_drift}, {"distance_to_newnh", d},
                                           {"final_populations", to_array(pop)}};
  }
  out.tables.emplace_back("compare.csv", std::move(t));
  out.summary = {{"variants", per}};
  return out;
}

std::string params_text(const TraceSpec& t) {
  std::string s;
  for (const auto& [k, v] : t.params) s += (s.empty() ? "" : ";") + k + "=" + format_number(v);
  return s;
}

ResultBundle run_geomphase(const ScenarioConfig& cfg, const GeomphaseSetup& g) {
  const PhaseResult r = exchange_phase(g.trace);
  const char* cls = r.path_class == PathClass::Loop ? "loop" : "no_loop";
  CsvTable p({"family", "params", "steps", "gamma_1", "gamma_2", "gamma_total", "error_estimate", "path_class"});
  p.cell(g.trace.family).cell(params_text(g.trace)).cell(static_cast<long long>(g.trace.steps));
  p.cell(r.gamma_1).cell(r.gamma_2).cell(r.gamma_total).cell(r.error_estimate).cell(std::string_view(cls));
  p.end_row();

  CsvTable rates({"s", "gamma1_metric", "gamma1_biorthogonal", "gamma1_left_space", "gamma2_metric",
                  "gamma2_biorthogonal", "gamma2_left_space", "max_imag"});
  for (double s : linspace(0.0, 1.0, g.rate_samples)) {
    const PathPoint pt = g.trace.path(s);
    const PhaseRates pr = geometric_phase_rates(bloch_frame(pt.angles, pt.rates));
    rates.cell(s);
    double imag = 0;
    for (Eigen::Index k = 0; k < 2; ++k) {
      for (const Vector* v : {&pr.metric_form, &pr.biorthogonal, &pr.left_space}) {
        rates.cell((*v)(k).real());
        imag = std::max(imag, std::abs((*v)(k).imag()));
      }
    }
    rates.cell(imag);
    rates.end_row();
  }

  ResultBundle out;
  out.tables.emplace_back("phases.csv", std::move(p));
  out.tables.emplace_back("rates.csv", std::move(rates));
  out.summary = {{"family", g.trace.family},
                 {"path_class", cls},
                 {"gamma_1", r.gamma_1},
                 {"gamma_2", r.gamma_2},
                 {"gamma_total", r.gamma_total},
                 {"gamma_total_over_pi", r.gamma_total / M_PI},
                 {"error_estimate", r.error_estimate}};
  if (g.adiabatic_rate) {
    const AdiabaticCheck a = adiabatic_phase_check(g.trace, *g.adiabatic_rate, cfg.integrator);
    out.summary["adiabatic"] = {{"rate", *g.adiabatic_rate},
                                {"extracted", a.extracted},
                                {"predicted", a.predicted},
                                {"difference", a.difference},
                                {"leakage", a.leakage}};
  }
  return out;
}

ResultBundle run_lrb(const LrbSetup& s) {
  const LrbProfile p = lrb_probe(s.lattice, s.psi0);
  CsvTable t({"site", "distance", "abs_delta_psi", "delta_density"});
  double far = 0;
  for (int i = 0; i < s.lattice.sites; ++i) {
    const int d = s.lattice.distance_to_edit(i);
    t.cell(static_cast<long long>(i)).cell(static_cast<long long>(d)).cell(p.delta_psi(i)).cell(p.delta_density(i));
    t.end_row();
    if (d >= 3) far = std::max(far, p.delta_psi(i));
  }
  ResultBundle out;
  out.tables.emplace_back("profile.csv", std::move(t));
  const QuenchResiduals r = quench_residuals(p.event);
  out.summary = {{"max_delta_psi", p.delta_psi.maxCoeff()},
                 {"far_field_max_delta_psi", far},
                 {"max_abs_delta_density", p.delta_density.cwiseAbs().maxCoeff()},
                 {"conservation_residual", r.conservation},
                 {"exchange_residual", r.exchange}};
  return out;
}

ResultBundle run_anyon(const AnyonChainSpec& c) {
  const AnyonQuench q = quench_compare(c);
  const int n = c.sites;
  CsvTable corr({"l", "m", "re_pre", "im_pre", "re_post", "im_post", "abs_delta"});
  for (int l = 0; l < n; ++l)
    for (int m = 0; m < n; ++m) {
      corr.cell(static_cast<long long>(l)).cell(static_cast<long long>(m));
      corr.cell(q.anyon_pre(l, m).real()).cell(q.anyon_pre(l, m).imag());
      corr.cell(q.anyon_post(l, m).real()).cell(q.anyon_post(l, m).imag());
      corr.cell(std::abs(q.delta(l, m)));
      corr.end_row();
    }
  CsvTable mom({"q", "k", "nk_pre", "nk_post"});
  for (int k = 0; k < n; ++k) {
    mom.cell(static_cast<long long>(k)).cell(2 * M_PI * k / n).cell(q.nk_pre(k)).cell(q.nk_post(k));
    mom.end_row();
  }
  CsvTable den({"site", "distance", "density_pre", "density_post", "row_change"});
  double far = 0;
  for (int l = 0; l < n; ++l) {
    const int d = std::min(std::abs(l - c.quench_bond), std::abs(l - c.quench_bond - 1));
    den.cell(static_cast<long long>(l)).cell(static_cast<long long>(d));
    den.cell(q.density_pre(l)).cell(q.density_post(l)).cell(q.row_change(l));
    den.end_row();
    if (d >= 3) far = std::max(far, q.row_change(l));
  }
  ResultBundle out;
  out.tables.emplace_back("correlations.csv", std::move(corr));
  out.tables.emplace_back("momentum.csv", std::move(mom));
  out.tables.emplace_back("density.csv", std::move(den));
  out.summary = {{"kappa", c.kappa},
                 {"max_abs_delta", q.delta.cwiseAbs().maxCoeff()},
                 {"far_field_row_change", far},
                 {"max_nk_change", (q.nk_post - q.nk_pre).cwiseAbs().maxCoeff()},
                 {"max_density_change", (q.density_post - q.density_pre).cwiseAbs().maxCoeff()}};
  return out;
}

}  // namespace

std::string_view experiment_name(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::Evolve: return "evolve";
    case ExperimentKind::CompareTdse: return "compare-tdse";
    case ExperimentKind::Quench: return "quench";
    case ExperimentKind::LrbProbe: return "lrb-probe";
    case ExperimentKind::Geomphase: return "geomphase";
    case ExperimentKind::AnyonQuench: return "anyon-quench";
  }
  return "unknown";
}

HamiltonianSchedule ScheduleSpec::build() const { return HamiltonianSchedule(t0, t1, quench_times, segments); }

ScenarioConfig parse_scenario(const json& config) {
  const ConfigNode root(config);
  ScenarioConfig cfg;

  const std::string name = root.string("experiment");
  bool found = false;
  for (auto k : {ExperimentKind::Evolve, ExperimentKind::CompareTdse, ExperimentKind::Quench,
                 ExperimentKind::LrbProbe, ExperimentKind::Geomphase, ExperimentKind::AnyonQuench}) {
    if (experiment_name(k) == name) {
      cfg.kind = k;
      found = true;
    }
  }
  if (!found) {
    throw ConfigError("experiment: unknown kind '" + name +
                      "' (evolve, compare-tdse, quench, lrb-probe, geomphase, anyon-quench)");
  }

  if (root.has("seed")) {
    const auto seed = root.integer("seed");
    if (seed < 0) throw ConfigError("seed: must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }

  const ConfigNode out = root.section("output");
  cfg.output_dir = out.string("dir");
  if (cfg.output_dir.empty()) throw ConfigError("output.dir: must not be empty");
  const auto samples = out.optional_integer("samples").value_or(kDefaultSamples);
  if (samples < 2 || samples > 1'000'000) throw ConfigError("output.samples: must be in [2, 1e6]");

  cfg.integrator = parse_integrator(root.optional_section("integrator"));

  switch (cfg.kind) {
    case ExperimentKind::Evolve:
    case ExperimentKind::Quench:
    case ExperimentKind::CompareTdse:
      cfg.setup = parse_evolve(root, cfg.kind, cfg.seed, static_cast<int>(samples));
      break;
    case ExperimentKind::Geomphase:
      cfg.setup = parse_geomphase(root, static_cast<int>(samples));
      break;
    case ExperimentKind::LrbProbe:
      cfg.setup = parse_lrb(root, cfg.seed);
      break;
    case ExperimentKind::AnyonQuench:
      cfg.setup = parse_chain(root);
      break;
  }

  const auto unread = root.unread_keys();
  if (!unread.empty()) {
    std::string list;
    for (const auto& k : unread) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("unknown key(s) for experiment " + name + ": " + list);
  }
  cfg.hash = config_hash(config);
  return cfg;
}

ResultBundle run_experiment(const ScenarioConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::Evolve:
    case ExperimentKind::Quench:
      return run_evolve(cfg, std::get<EvolveSetup>(cfg.setup));
    case ExperimentKind::CompareTdse:
      return run_compare(cfg, std::get<EvolveSetup>(cfg.setup));
    case ExperimentKind::Geomphase:
      return run_geomphase(cfg, std::get<GeomphaseSetup>(cfg.setup));
    case ExperimentKind::LrbProbe:
      return run_lrb(std::get<LrbSetup>(cfg.setup));
    case ExperimentKind::AnyonQuench:
      return run_anyon(std::get<AnyonChainSpec>(cfg.setup));
  }
  throw std::logic_error("unhandled experiment kind");
}

std::string config_reference() {
  const IntegratorOptions d;
  std::ostringstream os;
  os << "Config files are TOML. Complex numbers are a plain number or [re, im].\n"
        "\n"
        "Top level:\n"
        "  experiment = evolve | compare-tdse | quench | lrb-probe | geomphase | anyon-quench\n"
        "  seed       = non-negative integer; needed by random_smooth segments and random states\n"
        "  [output]     dir (required), samples (default " << kDefaultSamples << ")\n"
        "  [integrator] rtol (" << format_number(d.rtol) << "), atol (" << format_number(d.atol)
     << "), max_step (" << format_number(d.max_step) << "), initial_step (0 = automatic),\n"
        "               fixed_step (0 = adaptive), metric_fd_step (" << format_number(d.metric_fd_step)
     << "), max_steps (" << d.max_steps << ")\n"
        "\n"
        "evolve, quench, compare-tdse:\n"
        "  variant = name (evolve, quench) or variants = [names] (compare-tdse, NewNH required)\n"
        "  names: Standard, NewNH, LeftNH, Wieser, Gong\n"
        "  [schedule] t0, t1; [[schedule.segment]] type, end (all but the last segment)\n"
        "    matrix:        h0, optional h1 h2 with omega; H = h0 + cos(wt) h1 + sin(wt) h2\n"
        "    pt_dimer:      gain, coupling, coupling_amp, omega\n"
        "    diagonal:      energies\n"
        "    random_smooth: dim, level_spacing, im_scale, drive\n"
        "  [state] psi0 = [...] or random = true\n"
        "\n"
        "lrb-probe:\n"
        "  [lattice] sites, onsite, hop_right, hop_left (lists or one repeated value)\n"
        "  [lattice.edit] kind = bond (index, right, left) | site (index, value)\n"
        "  [state] psi0 or random = true\n"
        "\n"
        "geomphase:\n"
        "  [trace] family, steps, [trace.params] per family, optional adiabatic_rate with e1, e2\n"
        "  families:";
  for (auto f : trace_families()) os << ' ' << f;
  os << "\n"
        "\n"
        "anyon-quench:\n"
        "  [chain] sites, hopping (list or one value), kappa, filling, quench_bond, quench_value\n";
  return os.str();
}

}  // namespace nhtdse
