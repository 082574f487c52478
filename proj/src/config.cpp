#include "colliq/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "colliq/errors.hpp"
#include "colliq/io.hpp"
#include "colliq/lindblad.hpp"

namespace colliq::config {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const char* name : allowed) known = known || key == name;
    if (!known) fail(path, "unknown field '" + key + "'");
  }
}

const json& require_object(const json& obj, const char* key, const std::string& path) {
  const json& field = require(obj, key, path);
  if (!field.is_object()) fail(path + "." + key, "must be an object");
  return field;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "must be a number");
  return j.get<double>();
}

double number_field(const json& obj, const char* key, const std::string& path) {
  return number(require(obj, key, path), path + "." + key);
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "must be an integer");
  return j.get<long long>();
}

Complex complex_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(path, "must be an [re, im] number pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

thermal::QuadratureConfig parse_quadrature(const json& doc) {
  thermal::QuadratureConfig quad;
  const auto it = doc.find("quadrature");
  if (it == doc.end()) return quad;
  const std::string path = "config.quadrature";
  if (!it->is_object()) fail(path, "must be an object");
  check_keys(*it,
             {"n_v", "n_cos", "v_max_factor", "energy_tolerance", "convergence_tolerance",
              "refinement_check"},
             path);
  if (it->contains("n_v")) {
    const long long n = integer((*it)["n_v"], path + ".n_v");
    if (n < 2 || n > 100000) fail(path + ".n_v", "must be between 2 and 100000");
    quad.n_v = static_cast<int>(n);
  }
  if (it->contains("n_cos")) {
    const long long n = integer((*it)["n_cos"], path + ".n_cos");
    if (n < 2 || n > 100000) fail(path + ".n_cos", "must be between 2 and 100000");
    quad.n_cos = static_cast<int>(n);
  }
  if (it->contains("v_max_factor")) {
    quad.v_max_factor = number((*it)["v_max_factor"], path + ".v_max_factor");
    if (!(quad.v_max_factor > 0.0) || !std::isfinite(quad.v_max_factor))
      fail(path + ".v_max_factor", "must be a positive number");
  }
  if (it->contains("energy_tolerance")) {
    quad.energy_tolerance = number((*it)["energy_tolerance"], path + ".energy_tolerance");
    if (!(quad.energy_tolerance > 0.0) || !std::isfinite(quad.energy_tolerance))
      fail(path + ".energy_tolerance", "must be a positive number");
  }
  if (it->contains("convergence_tolerance")) {
    quad.convergence_tolerance =
        number((*it)["convergence_tolerance"], path + ".convergence_tolerance");
    if (!(quad.convergence_tolerance > 0.0) || !std::isfinite(quad.convergence_tolerance))
      fail(path + ".convergence_tolerance", "must be a positive number");
  }
  if (it->contains("refinement_check")) {
    if (!(*it)["refinement_check"].is_boolean())
      fail(path + ".refinement_check", "must be a boolean");
    quad.refinement_check = (*it)["refinement_check"].get<bool>();
  }
  return quad;
}

scattering::ChannelSet parse_channels(const json& doc, double energy_tolerance,
                                      std::string& units) {
  const std::string path = "config.channels";
  const json& block = require_object(doc, "channels", "config");
  check_keys(block, {"labels", "energies", "units"}, path);
  const json& labels_json = require(block, "labels", path);
  const json& energies_json = require(block, "energies", path);
  if (!labels_json.is_array() || labels_json.empty())
    fail(path + ".labels", "must be a non-empty array of strings");
  if (!energies_json.is_array() || energies_json.size() != labels_json.size())
    fail(path + ".energies", "must be an array matching the label count");
  std::vector<std::string> labels;
  Eigen::VectorXd energies(static_cast<Eigen::Index>(labels_json.size()));
  for (std::size_t i = 0; i < labels_json.size(); ++i) {
    if (!labels_json[i].is_string())
      fail(path + ".labels[" + std::to_string(i) + "]", "must be a string");
    labels.push_back(labels_json[i].get<std::string>());
    energies(static_cast<Eigen::Index>(i)) =
        number(energies_json[i], path + ".energies[" + std::to_string(i) + "]");
  }
  if (block.contains("units")) {
    if (!block["units"].is_string()) fail(path + ".units", "must be a string");
    units = block["units"].get<std::string>();
  }
  try {
    return scattering::ChannelSet(std::move(labels), std::move(energies), energy_tolerance);
  } catch (const std::invalid_argument& err) {
    fail(path, err.what());
  }
}

thermal::GasParameters parse_gas(const json& doc) {
  const std::string path = "config.gas";
  const json& block = require_object(doc, "gas", "config");
  check_keys(block, {"n_gas", "m", "beta"}, path);
  const double n_gas = number_field(block, "n_gas", path);
  const double m = number_field(block, "m", path);
  const double beta = number_field(block, "beta", path);
  try {
    return thermal::GasParameters(n_gas, m, beta);
  } catch (const std::invalid_argument& err) {
    fail(path, err.what());
  }
}

std::shared_ptr<const scattering::Model> parse_scattering(const json& doc,
                                                          const scattering::ChannelSet& channels,
                                                          const thermal::GasParameters& gas,
                                                          double energy_tolerance,
                                                          const std::string& base_dir) {
  const std::string path = "config.scattering";
  const json& block = require_object(doc, "scattering", "config");
  check_keys(block, {"k_matrix", "table"}, path);
  if (block.contains("k_matrix") == block.contains("table"))
    fail(path, "exactly one of 'k_matrix' or 'table' is required");

  if (block.contains("k_matrix")) {
    const std::string kpath = path + ".k_matrix";
    const json& kblock = block["k_matrix"];
    if (!kblock.is_object()) fail(kpath, "must be an object");
    check_keys(kblock, {"a"}, kpath);
    const json& rows = require(kblock, "a", kpath);
    const Eigen::Index n = channels.count();
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n))
      fail(kpath + ".a", "must be an array with one row per channel");
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const json& row = rows[static_cast<std::size_t>(r)];
      const std::string rpath = kpath + ".a[" + std::to_string(r) + "]";
      if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
        fail(rpath, "must be an array with one entry per channel");
      for (Eigen::Index c = 0; c < n; ++c)
        a(r, c) = number(row[static_cast<std::size_t>(c)],
                         rpath + "[" + std::to_string(c) + "]");
    }
    try {
      return std::make_shared<scattering::SWaveKMatrixModel>(channels, std::move(a), gas.m);
    } catch (const std::invalid_argument& err) {
      fail(kpath, err.what());
    }
  }

  const std::string tpath = path + ".table";
  const json& tblock = block["table"];
  if (!tblock.is_object()) fail(tpath, "must be an object");
  check_keys(tblock, {"path"}, tpath);
  const json& file = require(tblock, "path", tpath);
  if (!file.is_string() || file.get<std::string>().empty())
    fail(tpath + ".path", "must be a non-empty string");
  std::string table_path = file.get<std::string>();
  if (!table_path.empty() && table_path.front() != '/' && !base_dir.empty())
    table_path = base_dir + "/" + table_path;
  auto table = std::make_shared<scattering::AmplitudeTable>(
      io::read_amplitude_table(table_path, gas.m));
  const scattering::ChannelSet& in_table = table->channels();
  bool matches = in_table.count() == channels.count();
  for (Eigen::Index i = 0; matches && i < channels.count(); ++i) {
    matches = in_table.labels[static_cast<std::size_t>(i)] ==
                  channels.labels[static_cast<std::size_t>(i)] &&
              std::abs(in_table.energies(i) - channels.energies(i)) <= energy_tolerance;
  }
  if (!matches) fail(tpath, "channel set in the table does not match config.channels");
  return table;
}

Matrix parse_initial(const json& block, Eigen::Index n, const std::string& path) {
  check_keys(block, {"pure", "density_matrix"}, path);
  if (block.contains("pure") == block.contains("density_matrix"))
    fail(path, "exactly one of 'pure' or 'density_matrix' is required");

  if (block.contains("pure")) {
    const std::string ppath = path + ".pure";
    const json& arr = block["pure"];
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(n))
      fail(ppath, "must be an array with one entry per channel");
    Vector psi(n);
    for (Eigen::Index i = 0; i < n; ++i)
      psi(i) = complex_at(arr[static_cast<std::size_t>(i)],
                          ppath + "[" + std::to_string(i) + "]");
    const double norm = psi.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-10)
      fail(ppath, "must be normalized to 1 within 1e-10");
    psi /= norm;
    return psi * psi.adjoint();
  }

  const std::string dpath = path + ".density_matrix";
  const json& rows = block["density_matrix"];
  if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n))
    fail(dpath, "must be an array with one row per channel");
  Matrix rho(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    const std::string rpath = dpath + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
      fail(rpath, "must be an array with one entry per channel");
    for (Eigen::Index c = 0; c < n; ++c)
      rho(r, c) = complex_at(row[static_cast<std::size_t>(c)],
                             rpath + "[" + std::to_string(c) + "]");
  }
  try {
    lindblad::require_density_matrix(rho);
  } catch (const std::invalid_argument& err) {
    fail(dpath, err.what());
  }
  return rho;
}

json resolved_document(const json& doc, const ScenarioConfig& scenario) {
  json quad = {{"n_v", scenario.quadrature.n_v},
               {"n_cos", scenario.quadrature.n_cos},
               {"v_max_factor", scenario.quadrature.v_max_factor},
               {"energy_tolerance", scenario.quadrature.energy_tolerance},
               {"convergence_tolerance", scenario.quadrature.convergence_tolerance},
               {"refinement_check", scenario.quadrature.refinement_check}};
  json energies = json::array();
  for (Eigen::Index i = 0; i < scenario.channels.count(); ++i)
    energies.push_back(scenario.channels.energies(i));
  json out = {{"channels",
               {{"labels", scenario.channels.labels},
                {"energies", std::move(energies)},
                {"units", scenario.units}}},
              {"gas",
               {{"n_gas", scenario.gas.n_gas}, {"m", scenario.gas.m}, {"beta", scenario.gas.beta}}},
              {"scattering", doc.at("scattering")},
              {"quadrature", std::move(quad)},
              {"output",
               {{"rates", scenario.output.rates},
                {"trajectory", scenario.output.trajectory},
                {"ensemble", scenario.output.ensemble}}}};
  if (scenario.evolve) {
    out["evolve"] = {{"t_max", scenario.evolve->t_max},
                     {"n_steps", scenario.evolve->n_steps},
                     {"initial", doc.at("evolve").at("initial")}};
  }
  if (scenario.trajectories) {
    out["trajectories"] = {{"n_traj", scenario.trajectories->n_traj},
                           {"seed", scenario.trajectories->seed}};
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config: ") + err.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  check_keys(doc, {"channels", "gas", "scattering", "quadrature", "evolve", "trajectories",
                   "output", "units"},
             "config");

  thermal::QuadratureConfig quadrature = parse_quadrature(doc);
  std::string units = "hbar = 1, consistent working units";
  if (doc.contains("units")) {
    if (!doc["units"].is_string()) fail("config.units", "must be a string");
    units = doc["units"].get<std::string>();
  }
  scattering::ChannelSet channels = parse_channels(doc, quadrature.energy_tolerance, units);
  thermal::GasParameters gas = parse_gas(doc);
  std::shared_ptr<const scattering::Model> model =
      parse_scattering(doc, channels, gas, quadrature.energy_tolerance, base_dir);

  std::optional<EvolveSpec> evolve;
  if (doc.contains("evolve")) {
    const std::string path = "config.evolve";
    const json& block = doc["evolve"];
    if (!block.is_object()) fail(path, "must be an object");
    check_keys(block, {"t_max", "n_steps", "initial"}, path);
    EvolveSpec spec;
    spec.t_max = number_field(block, "t_max", path);
    if (!std::isfinite(spec.t_max) || spec.t_max < 0.0)
      fail(path + ".t_max", "must be a non-negative number");
    const long long steps = integer(require(block, "n_steps", path), path + ".n_steps");
    if (steps < 1 || steps > 10000000) fail(path + ".n_steps", "must be between 1 and 10000000");
    spec.n_steps = static_cast<int>(steps);
    const json& initial = require(block, "initial", path);
    if (!initial.is_object()) fail(path + ".initial", "must be an object");
    spec.rho0 = parse_initial(initial, channels.count(), path + ".initial");
    evolve = std::move(spec);
  }

  std::optional<TrajectorySpec> trajectories;
  if (doc.contains("trajectories")) {
    const std::string path = "config.trajectories";
    const json& block = doc["trajectories"];
    if (!block.is_object()) fail(path, "must be an object");
    check_keys(block, {"n_traj", "seed"}, path);
    TrajectorySpec spec;
    const long long n_traj = integer(require(block, "n_traj", path), path + ".n_traj");
    if (n_traj < 1 || n_traj > 100000000) fail(path + ".n_traj", "must be between 1 and 1e8");
    spec.n_traj = static_cast<std::size_t>(n_traj);
    if (block.contains("seed")) {
      if (!block["seed"].is_number_unsigned())
        fail(path + ".seed", "must be a non-negative integer");
      spec.seed = block["seed"].get<std::uint64_t>();
    }
    trajectories = spec;
  }

  OutputNames output;
  if (doc.contains("output")) {
    const std::string path = "config.output";
    const json& block = doc["output"];
    if (!block.is_object()) fail(path, "must be an object");
    check_keys(block, {"rates", "trajectory", "ensemble"}, path);
    auto name = [&](const char* key, std::string& target) {
      if (!block.contains(key)) return;
      if (!block[key].is_string() || block[key].get<std::string>().empty())
        fail(path + "." + key, "must be a non-empty string");
      target = block[key].get<std::string>();
    };
    name("rates", output.rates);
    name("trajectory", output.trajectory);
    name("ensemble", output.ensemble);
  }

  ScenarioConfig scenario{std::move(channels), gas,           std::move(model),
                          quadrature,          std::move(evolve), trajectories,
                          std::move(output),   std::move(units), std::string()};
  scenario.resolved = resolved_document(doc, scenario).dump();
  return scenario;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config '" + path + "': cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto slash = path.find_last_of('/');
  const std::string base_dir = slash == std::string::npos ? std::string(".") : path.substr(0, slash);
  return parse_scenario(buffer.str(), base_dir);
}

std::vector<double> time_grid(const EvolveSpec& evolve) {
  if (evolve.t_max == 0.0) return {0.0};
  std::vector<double> grid(static_cast<std::size_t>(evolve.n_steps) + 1);
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = evolve.t_max *
              (static_cast<double>(i) / static_cast<double>(evolve.n_steps));
  return grid;
}

std::string sidecar_name(const std::string& csv_name) {
  const std::string suffix = ".csv";
  if (csv_name.size() > suffix.size() &&
      csv_name.compare(csv_name.size() - suffix.size(), suffix.size(), suffix) == 0)
    return csv_name.substr(0, csv_name.size() - suffix.size()) + ".diag.json";
  return csv_name + ".diag.json";
}

}  // namespace colliq::config
