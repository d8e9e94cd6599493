#include "nhtdse/app.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "nhtdse/config.hpp"
#include "nhtdse/errors.hpp"
#include "nhtdse/experiments.hpp"

#ifndef NHTDSE_VERSION
#define NHTDSE_VERSION "0.0.0"
#endif

namespace nhtdse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("nhtdse");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("NHTDSE_LOG")) {
    const std::string v = env;
    if (v == "error") spdlog::set_level(spdlog::level::err);
    else if (v == "debug") spdlog::set_level(spdlog::level::debug);
    else if (v != "info") spdlog::warn("NHTDSE_LOG='{}' not one of error, info, debug; using info", v);
  }
}

struct Request {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
};

ScenarioConfig load(const Request& req) {
  json raw = load_config(req.config_path);
  for (const auto& s : req.overrides) apply_override(raw, s);
  if (req.seed) raw["seed"] = *req.seed;
  if (req.out) {
    if (!raw.contains("output") || !raw["output"].is_object()) raw["output"] = json::object();
    raw["output"]["dir"] = *req.out;
  }
  return parse_scenario(raw);
}

json metadata(const ScenarioConfig& cfg, double wall) {
  json seed = nullptr;
  if (cfg.seed) seed = *cfg.seed;
  return {{"experiment", experiment_name(cfg.kind)},
          {"config_hash", hash_hex(cfg.hash)},
          {"tool_version", NHTDSE_VERSION},
          {"wall_time_s", wall},
          {"seed", seed}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

int execute(const Request& req, bool compare_only) {
  ScenarioConfig cfg;
  try {
    cfg = load(req);
  } catch (const ConfigError& e) {
    spdlog::error("invalid config: {}", e.what());
    return kExitInvalid;
  }
  if (compare_only && cfg.kind != ExperimentKind::CompareTdse) {
    spdlog::error("compare needs experiment = \"compare-tdse\", got \"{}\"", experiment_name(cfg.kind));
    return kExitInvalid;
  }
  spdlog::info("running {} (config {})", experiment_name(cfg.kind), hash_hex(cfg.hash));

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const fs::path dir = cfg.output_dir;

  ResultBundle bundle;
  try {
    bundle = run_experiment(cfg);
  } catch (const NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    json summary = metadata(cfg, elapsed());
    summary["status"] = "error";
    summary["error_name"] = error_name(e.kind());
    summary["message"] = e.what();
    try {
      fs::create_directories(dir);
      write_text(dir / "summary.json", summary.dump(2) + "\n");
    } catch (const std::exception& w) {
      spdlog::error("{}", w.what());
    }
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    spdlog::error("invalid input: {}", e.what());
    return kExitInvalid;
  }

  json summary = metadata(cfg, elapsed());
  summary["status"] = "ok";
  json names = json::array();
  for (const auto& t : bundle.tables) names.push_back(t.first);
  summary["tables"] = names;
  summary["results"] = bundle.summary;

  fs::create_directories(dir);
  for (const auto& [name, table] : bundle.tables) write_text(dir / name, table.str());
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  spdlog::info("wrote {} table(s) and summary.json to {} in {:.2f} s", bundle.tables.size(), dir.string(),
               elapsed());
  return kExitOk;
}

int validate(const std::string& path) {
  try {
    const ScenarioConfig cfg = load(Request{path, {}, {}, {}});
    std::cout << "valid " << experiment_name(cfg.kind) << " config, hash " << hash_hex(cfg.hash) << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    spdlog::error("invalid config: {}", e.what());
    return kExitInvalid;
  }
}

}  // namespace

int run_cli(int argc, char** argv) {
  try {
    setup_logging();
  } catch (const spdlog::spdlog_ex&) {
    // logger already registered when called twice in one process
  }

  CLI::App app{"Biorthogonal non-hermitian time evolution experiments", "nhtdse"};
  app.set_version_flag("--version", NHTDSE_VERSION);
  app.footer(config_reference());
  app.require_subcommand(1);

  Request req;
  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("config", req.config_path, "experiment config (TOML)")->required();
    sub->add_option("--set", req.overrides, "override a config value, key.path=value (repeatable)");
    sub->add_option("--out", req.out, "output directory, replaces output.dir");
    sub->add_option("--seed", req.seed, "random seed, replaces the config seed");
  };
  auto* run = app.add_subcommand("run", "run the experiment a config describes");
  add_run_options(run);
  auto* compare = app.add_subcommand("compare", "per-variant drift and distance to NewNH (compare-tdse configs)");
  add_run_options(compare);
  std::string validate_path;
  auto* check = app.add_subcommand("validate", "check a config without running it");
  check->add_option("config", validate_path, "experiment config (TOML)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*check) return validate(validate_path);
    return execute(req, static_cast<bool>(*compare));
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return kExitInternal;
  }
}

}  // namespace nhtdse
