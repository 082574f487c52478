// colliq command line: rate computation, deterministic propagation,
// trajectory ensembles, and the self-check suite.
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "colliq/config.hpp"
#include "colliq/errors.hpp"
#include "colliq/io.hpp"
#include "colliq/jumps.hpp"
#include "colliq/lindblad.hpp"
#include "colliq/thermal.hpp"
#include "colliq/verify.hpp"

namespace {

using namespace colliq;

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("COLLIQ_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 1 || value > 4096)
      throw ConfigError("COLLIQ_THREADS must be a positive integer");
    return static_cast<int>(value);
  }
  return 1;
}

// Rates and shifts either recomputed from the scenario or loaded from a
// previously written rates file, whose channel set must match the scenario.
std::pair<thermal::RateTensor, thermal::EnergyShifts> obtain_rates(
    const config::ScenarioConfig& scenario, const std::string& rates_path) {
  if (rates_path.empty()) {
    return {thermal::rate_tensor(*scenario.model, scenario.gas, scenario.quadrature),
            thermal::energy_shifts(*scenario.model, scenario.gas, scenario.quadrature)};
  }
  io::RatesFile file = io::read_rates_file(rates_path);
  const scattering::ChannelSet& loaded = file.rates.channels;
  bool matches = loaded.count() == scenario.channels.count();
  for (Eigen::Index i = 0; matches && i < loaded.count(); ++i) {
    matches = loaded.labels[static_cast<std::size_t>(i)] ==
                  scenario.channels.labels[static_cast<std::size_t>(i)] &&
              loaded.energies(i) == scenario.channels.energies(i);
  }
  if (!matches)
    throw ConfigError("rates file '" + rates_path +
                      "': channel set does not match the scenario config");
  return {std::move(file.rates), std::move(file.shifts)};
}

int cmd_rates(const std::string& config_path, const std::string& out_dir) {
  const config::ScenarioConfig scenario = config::load_scenario_file(config_path);
  const thermal::RateTensor rates =
      thermal::rate_tensor(*scenario.model, scenario.gas, scenario.quadrature);
  const thermal::EnergyShifts shifts =
      thermal::energy_shifts(*scenario.model, scenario.gas, scenario.quadrature);
  const thermal::RateDiagnostics diag = thermal::validate_rate_tensor(rates);
  const std::string path = out_dir + "/" + scenario.output.rates;
  io::write_rates_file(path, rates, shifts, diag, scenario.resolved);
  std::cout << "wrote " << path << " (" << scenario.channels.count()
            << " channels, coefficient norm " << diag.coefficient_norm
            << ", quadrature residual " << rates.quadrature_residual << ")\n";
  return 0;
}

int cmd_evolve(const std::string& config_path, const std::string& out_dir,
               const std::string& rates_path) {
  const config::ScenarioConfig scenario = config::load_scenario_file(config_path);
  if (!scenario.evolve)
    throw ConfigError("config.evolve: required for the evolve subcommand");
  auto [rates, shifts] = obtain_rates(scenario, rates_path);
  const lindblad::AssembledGenerator gen =
      lindblad::assemble(scenario.channels, shifts, rates);
  const std::vector<double> grid = config::time_grid(*scenario.evolve);
  const lindblad::TrajectoryRecord record =
      lindblad::propagate(gen, scenario.evolve->rho0, grid);
  const std::string csv_path = out_dir + "/" + scenario.output.trajectory;
  io::write_trajectory_csv(csv_path, scenario.channels, record);
  io::write_trajectory_diagnostics(out_dir + "/" + config::sidecar_name(scenario.output.trajectory),
                                   record, scenario.resolved);
  std::cout << "wrote " << csv_path << " (" << record.states.size()
            << " rows, integrator mismatch " << record.integrator_mismatch << ")\n";
  if (!record.completed)
    throw NumericalError("adaptive cross-check integration aborted at t = " +
                         std::to_string(record.abort_time) + "; outputs are truncated");
  return 0;
}

int cmd_trajectories(const std::string& config_path, const std::string& out_dir,
                     const std::string& rates_path, std::optional<std::uint64_t> seed,
                     int threads) {
  const config::ScenarioConfig scenario = config::load_scenario_file(config_path);
  if (!scenario.evolve)
    throw ConfigError("config.evolve: required for the trajectories subcommand");
  if (!scenario.trajectories)
    throw ConfigError("config.trajectories: required for the trajectories subcommand");
  auto [rates, shifts] = obtain_rates(scenario, rates_path);
  const jumps::JumpOperatorSet ops = jumps::lindblad_operators(rates, shifts);
  const std::vector<double> grid = config::time_grid(*scenario.evolve);
  jumps::EnsembleConfig ensemble;
  ensemble.n_traj = scenario.trajectories->n_traj;
  ensemble.master_seed = seed.value_or(scenario.trajectories->seed);
  ensemble.n_threads = threads;
  const jumps::EnsembleRecord record =
      jumps::ensemble_average(ops, scenario.evolve->rho0, grid, ensemble);
  const std::string csv_path = out_dir + "/" + scenario.output.ensemble;
  io::write_ensemble_csv(csv_path, scenario.channels, record);
  io::write_ensemble_diagnostics(out_dir + "/" + config::sidecar_name(scenario.output.ensemble),
                                 record, ensemble.n_traj, ensemble.master_seed,
                                 scenario.resolved);
  std::cout << "wrote " << csv_path << " (" << ensemble.n_traj << " trajectories, seed "
            << ensemble.master_seed << ", " << threads << " threads)\n";
  return 0;
}

struct VerifyEffort {
  int models = 0;        // fixture counts per randomized check; 0 keeps the defaults
  long samples = 0;      // Monte Carlo oracle samples; 0 keeps the default
  long trajectories = 0; // unravelling ensemble size; 0 keeps the default
};

int cmd_verify(const std::string& out_dir, const std::vector<std::string>& injections,
               std::optional<std::uint64_t> seed, int threads, const VerifyEffort& effort) {
  verify::Options options;
  if (seed) options.seed = *seed;
  options.n_threads = std::max(threads, 2);
  if (effort.models > 0) {
    options.n_collision_models = effort.models;
    options.n_unitaries = effort.models;
    options.n_k_models = effort.models;
    options.n_energies = effort.models;
    options.n_hermitian = effort.models;
  }
  if (effort.samples > 0) options.mc_samples = static_cast<std::size_t>(effort.samples);
  if (effort.trajectories > 0)
    options.n_trajectories = static_cast<std::size_t>(effort.trajectories);
  const std::vector<verify::CheckResult> results = verify::run_all(options, injections);
  bool all_passed = true;
  for (const verify::CheckResult& result : results) {
    all_passed = all_passed && result.passed;
    std::cout << (result.passed ? "[PASS] " : "[FAIL] ") << result.name << ": " << result.detail
              << "\n";
  }
  if (!out_dir.empty()) {
    nlohmann::json report = {{"format", "colliq-verify-report"},
                             {"version", 1},
                             {"seed", options.seed},
                             {"all_passed", all_passed},
                             {"checks", nlohmann::json::array()}};
    for (const verify::CheckResult& result : results) {
      report["checks"].push_back({{"name", result.name},
                                  {"passed", result.passed},
                                  {"residual", result.residual},
                                  {"detail", result.detail}});
    }
    std::ofstream out(out_dir + "/verify.json", std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + out_dir + "/verify.json' for writing");
    out << report.dump(2) << '\n';
  }
  std::cout << (all_passed ? "all checks passed\n" : "CHECKS FAILED\n");
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collisional open-system dynamics in a thermal gas"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string rates_path;
  int threads = 0;
  std::uint64_t seed_value = 0;
  std::vector<std::string> injections;

  CLI::App* rates = app.add_subcommand("rates", "compute the rate tensor and energy shifts");
  rates->add_option("--config", config_path, "scenario config JSON")->required();
  rates->add_option("--out", out_dir, "output directory");
  rates->add_option("--threads", threads, "worker thread count");

  CLI::App* evolve = app.add_subcommand("evolve", "propagate the master equation");
  evolve->add_option("--config", config_path, "scenario config JSON")->required();
  evolve->add_option("--out", out_dir, "output directory");
  evolve->add_option("--rates", rates_path, "precomputed rates JSON (skips the quadrature)");
  evolve->add_option("--threads", threads, "worker thread count");

  CLI::App* trajectories =
      app.add_subcommand("trajectories", "run a quantum-jump trajectory ensemble");
  trajectories->add_option("--config", config_path, "scenario config JSON")->required();
  trajectories->add_option("--out", out_dir, "output directory");
  trajectories->add_option("--rates", rates_path, "precomputed rates JSON (skips the quadrature)");
  CLI::Option* traj_seed = trajectories->add_option("--seed", seed_value, "master seed override");
  trajectories->add_option("--threads", threads, "worker thread count");

  std::string verify_out;
  VerifyEffort effort;
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the self-check suite");
  verify_cmd->add_option("--out", verify_out, "directory for the JSON report");
  CLI::Option* verify_seed = verify_cmd->add_option("--seed", seed_value, "suite seed override");
  verify_cmd->add_option("--threads", threads, "worker thread count");
  verify_cmd->add_option("--inject", injections,
                         "deliberate failure fixture (nonunitary_s, negative_rate_tensor)");
  verify_cmd->add_option("--models", effort.models,
                         "fixture count per randomized check (default full strength)");
  verify_cmd->add_option("--samples", effort.samples, "Monte Carlo oracle sample count");
  verify_cmd->add_option("--trajectories", effort.trajectories, "unravelling ensemble size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);
    app.exit(err);
    return 2;
  }

  try {
    if (rates->parsed()) return cmd_rates(config_path, out_dir);
    if (evolve->parsed()) return cmd_evolve(config_path, out_dir, rates_path);
    if (trajectories->parsed()) {
      std::optional<std::uint64_t> seed;
      if (traj_seed->count() > 0) seed = seed_value;
      return cmd_trajectories(config_path, out_dir, rates_path, seed, resolve_threads(threads));
    }
    std::optional<std::uint64_t> seed;
    if (verify_seed->count() > 0) seed = seed_value;
    return cmd_verify(verify_out, injections, seed, resolve_threads(threads), effort);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const NumericalError& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}
