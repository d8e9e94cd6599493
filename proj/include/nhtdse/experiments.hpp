#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nhtdse/anyon.hpp"
#include "nhtdse/evolve.hpp"
#include "nhtdse/geomphase.hpp"
#include "nhtdse/io.hpp"
#include "nhtdse/quench.hpp"

namespace nhtdse {

enum class ExperimentKind { Evolve, CompareTdse, Quench, LrbProbe, Geomphase, AnyonQuench };

std::string_view experiment_name(ExperimentKind k) noexcept;

/// One piece of a piecewise-smooth schedule. `type` selects the form:
///   matrix       H = h0 + cos(omega t) h1 + sin(omega t) h2
///   pt_dimer     H = [[i gain, J], [J, -i gain]], J = coupling + coupling_amp cos(omega t)
///   diagonal     H = diag(energies)
///   random_smooth  H = V(t) E(t) V(t)^-1 drawn from the seed
struct ScheduleSpec {
  double t0 = 0;
  double t1 = 0;
  std::vector<double> quench_times;
  std::vector<HamiltonianFn> segments;
  bool uses_seed = false;

  HamiltonianSchedule build() const;
};

struct EvolveSetup {
  ScheduleSpec schedule;
  Vector psi0;
  std::vector<TdseVariant> variants;  // one for evolve and quench
  std::vector<double> output_times;
};

struct GeomphaseSetup {
  TraceSpec trace;
  std::optional<double> adiabatic_rate;
  int rate_samples = 0;
};

struct LrbSetup {
  LatticeModelSpec lattice;
  Vector psi0;
};

/// Parsed and validated experiment description.
struct ScenarioConfig {
  ExperimentKind kind = ExperimentKind::Evolve;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  IntegratorOptions integrator;
  std::variant<EvolveSetup, GeomphaseSetup, LrbSetup, AnyonChainSpec> setup;
  std::uint64_t hash = 0;
};

/// Schema validation, unknown keys included. Throws ConfigError.
ScenarioConfig parse_scenario(const nlohmann::json& config);

struct ResultBundle {
  std::vector<std::pair<std::string, CsvTable>> tables;  // file name, contents
  nlohmann::json summary;  // headline scalars; metadata is added by the caller
};

/// Runs the experiment. NumericalError propagates.
ResultBundle run_experiment(const ScenarioConfig& config);

/// Help text listing the config schema and the tolerance defaults.
std::string config_reference();

}  // namespace nhtdse
