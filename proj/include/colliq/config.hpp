// config.hpp — Scenario files: one JSON document declaring channels, gas,
// scattering input, numerical settings, and the requested runs. Violations
// surface as ConfigError with the offending field path in the message.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "colliq/ops.hpp"
#include "colliq/scattering.hpp"
#include "colliq/thermal.hpp"

namespace colliq::config {

struct EvolveSpec {
  double t_max = 0.0;
  int n_steps = 1;
  Matrix rho0;
};

struct TrajectorySpec {
  std::size_t n_traj = 1;
  std::uint64_t seed = 1;
};

struct OutputNames {
  std::string rates = "rates.json";
  std::string trajectory = "trajectory.csv";
  std::string ensemble = "ensemble.csv";
};

struct ScenarioConfig {
  scattering::ChannelSet channels;
  thermal::GasParameters gas;
  std::shared_ptr<const scattering::Model> model;
  thermal::QuadratureConfig quadrature;
  std::optional<EvolveSpec> evolve;
  std::optional<TrajectorySpec> trajectories;
  OutputNames output;
  std::string units;     // free-form declaration echoed into every output
  std::string resolved;  // full configuration with defaults applied, serialized
};

// Parses a scenario document; table paths resolve relative to base_dir.
ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir);
ScenarioConfig load_scenario_file(const std::string& path);

// Output times: t_max = 0 collapses to the single time 0, otherwise n_steps
// uniform steps from 0 to t_max inclusive.
std::vector<double> time_grid(const EvolveSpec& evolve);

// "name.csv" -> "name.diag.json"; any other name just appends ".diag.json".
std::string sidecar_name(const std::string& csv_name);

}  // namespace colliq::config
