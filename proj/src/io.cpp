#include "colliq/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"

#include "colliq/errors.hpp"

namespace colliq::io {
namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Column names must survive CSV tooling; anything outside [A-Za-z0-9_-] in a
// channel label becomes an underscore.
std::string column_label(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

json load_json(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string(what) + " '" + path + "': cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string(what) + " '" + path + "': " + err.what());
  }
}

const json& require_field(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing field '" + key + "'");
  return *it;
}

double require_number(const json& j, const char* key, const std::string& where) {
  const json& field = require_field(j, key, where);
  if (!field.is_number()) throw ConfigError(where + ": field '" + key + "' must be a number");
  return field.get<double>();
}

Eigen::Index require_index(const json& j, const char* key, Eigen::Index n,
                           const std::string& where) {
  const json& field = require_field(j, key, where);
  if (!field.is_number_integer())
    throw ConfigError(where + ": field '" + key + "' must be an integer");
  const auto value = field.get<long long>();
  if (value < 0 || value >= static_cast<long long>(n))
    throw ConfigError(where + ": field '" + key + "' out of range");
  return static_cast<Eigen::Index>(value);
}

Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(where + ": complex values must be [re, im] number pairs");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json provenance_or_null(const std::string& provenance_json) {
  if (provenance_json.empty()) return nullptr;
  try {
    return json::parse(provenance_json);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("provenance block is not valid JSON: ") + err.what());
  }
}

scattering::ChannelSet parse_channels(const json& doc, double energy_tolerance,
                                      const std::string& where) {
  const json& arr = require_field(doc, "channels", where);
  if (!arr.is_array() || arr.empty())
    throw ConfigError(where + ": field 'channels' must be a non-empty array");
  std::vector<std::string> labels;
  Eigen::VectorXd energies(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string entry = where + ": channels[" + std::to_string(i) + "]";
    if (!arr[i].is_object()) throw ConfigError(entry + " must be an object");
    const json& label = require_field(arr[i], "label", entry);
    if (!label.is_string()) throw ConfigError(entry + ": field 'label' must be a string");
    labels.push_back(label.get<std::string>());
    energies(static_cast<Eigen::Index>(i)) = require_number(arr[i], "energy", entry);
  }
  try {
    return scattering::ChannelSet(std::move(labels), std::move(energies), energy_tolerance);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(where + ": " + err.what());
  }
}

json channels_to_json(const scattering::ChannelSet& channels) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < channels.count(); ++i) {
    arr.push_back({{"label", channels.labels[static_cast<std::size_t>(i)]},
                   {"energy", channels.energies(i)}});
  }
  return arr;
}

void dump_to(const std::string& path, const json& doc) {
  std::ofstream out = open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw ConfigError("failed while writing '" + path + "'");
}

}  // namespace

void write_rates_file(const std::string& path, const thermal::RateTensor& rates,
                      const thermal::EnergyShifts& shifts, const thermal::RateDiagnostics& diag,
                      const std::string& provenance_json) {
  const Eigen::Index n = rates.channels.count();
  json entries = json::array();
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index a0 = 0; a0 < n; ++a0)
        for (Eigen::Index b0 = 0; b0 < n; ++b0) {
          if (!rates.chi_at(a, b, a0, b0)) continue;
          const Complex value = rates(a, b, a0, b0);
          entries.push_back({{"a", a},
                             {"b", b},
                             {"a0", a0},
                             {"b0", b0},
                             {"re", value.real()},
                             {"im", value.imag()}});
        }
  json epsilon = json::array();
  for (Eigen::Index i = 0; i < shifts.epsilon.size(); ++i) epsilon.push_back(shifts.epsilon(i));

  const json doc = {
      {"format", "colliq-rates"},
      {"version", 1},
      {"units",
       {{"hbar", 1.0},
        {"note", "rates per working time unit, energies in working energy units"}}},
      {"channels", channels_to_json(rates.channels)},
      {"energy_tolerance", rates.energy_tolerance},
      {"M", std::move(entries)},
      {"epsilon", std::move(epsilon)},
      {"diagnostics",
       {{"hermiticity_residual", diag.hermiticity_residual},
        {"psd_min_eig", diag.psd_min_eig},
        {"chi_violation", diag.chi_violation},
        {"coefficient_norm", diag.coefficient_norm},
        {"quadrature_residuals",
         {{"rates", rates.quadrature_residual}, {"epsilon", shifts.quadrature_residual}}}}},
      {"config", provenance_or_null(provenance_json)},
  };
  dump_to(path, doc);
}

RatesFile read_rates_file(const std::string& path) {
  const std::string where = "rates file '" + path + "'";
  const json doc = load_json(path, "rates file");
  if (!doc.is_object()) throw ConfigError(where + ": expected a JSON object");
  const json& format = require_field(doc, "format", where);
  if (!format.is_string() || format.get<std::string>() != "colliq-rates")
    throw ConfigError(where + ": field 'format' must be \"colliq-rates\"");

  const double tol = require_number(doc, "energy_tolerance", where);
  if (!(tol >= 0.0)) throw ConfigError(where + ": field 'energy_tolerance' must be non-negative");
  scattering::ChannelSet channels = parse_channels(doc, tol, where);
  const Eigen::Index n = channels.count();

  thermal::RateTensor rates(std::move(channels), tol);
  const json& entries = require_field(doc, "M", where);
  if (!entries.is_array()) throw ConfigError(where + ": field 'M' must be an array");
  std::vector<char> seen(static_cast<std::size_t>(n * n * n * n), 0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string entry = where + ": M[" + std::to_string(i) + "]";
    if (!entries[i].is_object()) throw ConfigError(entry + " must be an object");
    const Eigen::Index a = require_index(entries[i], "a", n, entry);
    const Eigen::Index b = require_index(entries[i], "b", n, entry);
    const Eigen::Index a0 = require_index(entries[i], "a0", n, entry);
    const Eigen::Index b0 = require_index(entries[i], "b0", n, entry);
    const Eigen::Index flat = rates.flat(a, b, a0, b0);
    if (seen[static_cast<std::size_t>(flat)]) throw ConfigError(entry + ": duplicate tuple");
    seen[static_cast<std::size_t>(flat)] = 1;
    rates.entries(flat) = Complex(require_number(entries[i], "re", entry),
                                  require_number(entries[i], "im", entry));
  }

  thermal::EnergyShifts shifts;
  const json& epsilon = require_field(doc, "epsilon", where);
  if (!epsilon.is_array() || epsilon.size() != static_cast<std::size_t>(n))
    throw ConfigError(where + ": field 'epsilon' must be an array with one entry per channel");
  shifts.epsilon.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& value = epsilon[static_cast<std::size_t>(i)];
    if (!value.is_number())
      throw ConfigError(where + ": epsilon[" + std::to_string(i) + "] must be a number");
    shifts.epsilon(i) = value.get<double>();
  }

  if (doc.contains("diagnostics") && doc["diagnostics"].is_object()) {
    const json& diag = doc["diagnostics"];
    if (diag.contains("quadrature_residuals") && diag["quadrature_residuals"].is_object()) {
      const json& residuals = diag["quadrature_residuals"];
      if (residuals.contains("rates") && residuals["rates"].is_number())
        rates.quadrature_residual = residuals["rates"].get<double>();
      if (residuals.contains("epsilon") && residuals["epsilon"].is_number())
        shifts.quadrature_residual = residuals["epsilon"].get<double>();
    }
  }

  thermal::require_valid_rate_tensor(rates);
  std::string provenance;
  if (doc.contains("config") && !doc["config"].is_null()) provenance = doc["config"].dump();
  return RatesFile{std::move(rates), std::move(shifts), std::move(provenance)};
}

scattering::AmplitudeTable read_amplitude_table(const std::string& path, double mass) {
  const std::string where = "amplitude table '" + path + "'";
  const json doc = load_json(path, "amplitude table");
  if (!doc.is_object()) throw ConfigError(where + ": expected a JSON object");
  const json& format = require_field(doc, "format", where);
  if (!format.is_string() || format.get<std::string>() != "colliq-amplitudes")
    throw ConfigError(where + ": field 'format' must be \"colliq-amplitudes\"");

  scattering::ChannelSet channels = parse_channels(doc, 1e-9, where);

  auto parse_grid = [&](const char* key) {
    const json& arr = require_field(doc, key, where);
    if (!arr.is_array() || arr.empty())
      throw ConfigError(where + ": field '" + key + "' must be a non-empty array");
    std::vector<double> grid;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number())
        throw ConfigError(where + ": " + key + "[" + std::to_string(i) + "] must be a number");
      grid.push_back(arr[i].get<double>());
    }
    return grid;
  };
  std::vector<double> e_grid = parse_grid("E_grid");
  std::vector<double> cos_grid = parse_grid("cos_theta_grid");

  const json& blocks = require_field(doc, "amplitudes", where);
  if (!blocks.is_object()) throw ConfigError(where + ": field 'amplitudes' must be an object");
  std::map<std::string, std::vector<Complex>> samples;
  for (const auto& [key, block] : blocks.items()) {
    const std::string entry = where + ": amplitudes[\"" + key + "\"]";
    if (!block.is_array()) throw ConfigError(entry + " must be an array of [re, im] pairs");
    std::vector<Complex> values;
    for (std::size_t i = 0; i < block.size(); ++i)
      values.push_back(parse_complex(block[i], entry + "[" + std::to_string(i) + "]"));
    samples.emplace(key, std::move(values));
  }

  try {
    return scattering::AmplitudeTable(std::move(channels), mass, std::move(e_grid),
                                      std::move(cos_grid), std::move(samples));
  } catch (const std::invalid_argument& err) {
    throw ConfigError(where + ": " + err.what());
  }
}

void write_amplitude_table(const std::string& path, const scattering::AmplitudeTable& table) {
  json e_grid = json::array();
  for (double e : table.e_kin_grid()) e_grid.push_back(e);
  json cos_grid = json::array();
  for (double c : table.cos_theta_grid()) cos_grid.push_back(c);
  json blocks = json::object();
  for (const auto& [key, values] : table.samples()) {
    json block = json::array();
    for (const Complex& value : values) block.push_back({value.real(), value.imag()});
    blocks[key] = std::move(block);
  }
  const json doc = {
      {"format", "colliq-amplitudes"},
      {"version", 1},
      {"units",
       {{"hbar", 1.0},
        {"note", "amplitudes in working length units; E_grid is the entrance-channel "
                 "kinetic energy in working energy units"}}},
      {"channels", channels_to_json(table.channels())},
      {"E_grid", std::move(e_grid)},
      {"cos_theta_grid", std::move(cos_grid)},
      {"amplitudes", std::move(blocks)},
  };
  dump_to(path, doc);
}

void write_trajectory_csv(const std::string& path, const scattering::ChannelSet& channels,
                          const lindblad::TrajectoryRecord& record) {
  const Eigen::Index n = channels.count();
  std::ofstream out = open_output(path);
  out << "# colliq trajectory; hbar = 1; working units; diagnostics in the JSON sidecar\n";
  out << "t";
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const std::string la = column_label(channels.labels[static_cast<std::size_t>(a)]);
      const std::string lb = column_label(channels.labels[static_cast<std::size_t>(b)]);
      out << ",re_rho_" << la << "_" << lb << ",im_rho_" << la << "_" << lb;
    }
  out << "\n";
  for (std::size_t i = 0; i < record.states.size(); ++i) {
    out << fmt(record.times[i]);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) {
        const Complex value = record.states[i](a, b);
        out << "," << fmt(value.real()) << "," << fmt(value.imag());
      }
    out << "\n";
  }
  if (!out) throw ConfigError("failed while writing '" + path + "'");
}

void write_trajectory_diagnostics(const std::string& path,
                                  const lindblad::TrajectoryRecord& record,
                                  const std::string& provenance_json) {
  double max_trace_error = 0.0;
  for (double e : record.trace_errors) max_trace_error = std::max(max_trace_error, e);
  double min_eigenvalue = record.min_eigenvalues.empty() ? 0.0 : record.min_eigenvalues.front();
  for (double e : record.min_eigenvalues) min_eigenvalue = std::min(min_eigenvalue, e);
  json doc = {
      {"format", "colliq-evolve-diagnostics"},
      {"version", 1},
      {"units", {{"hbar", 1.0}, {"note", "times in working time units"}}},
      {"n_times", record.states.size()},
      {"completed", record.completed},
      {"max_trace_error", max_trace_error},
      {"min_eigenvalue", min_eigenvalue},
      {"integrator_mismatch", record.integrator_mismatch},
      {"config", provenance_or_null(provenance_json)},
  };
  if (!record.completed) doc["abort_time"] = record.abort_time;
  dump_to(path, doc);
}

void write_ensemble_csv(const std::string& path, const scattering::ChannelSet& channels,
                        const jumps::EnsembleRecord& record) {
  const Eigen::Index n = channels.count();
  std::ofstream out = open_output(path);
  out << "# colliq ensemble; hbar = 1; working units; diagnostics in the JSON sidecar\n";
  out << "t";
  std::vector<std::pair<std::string, std::string>> names;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      names.emplace_back(column_label(channels.labels[static_cast<std::size_t>(a)]),
                         column_label(channels.labels[static_cast<std::size_t>(b)]));
      out << ",re_rho_" << names.back().first << "_" << names.back().second << ",im_rho_"
          << names.back().first << "_" << names.back().second;
    }
  for (const auto& [la, lb] : names)
    out << ",stderr_re_rho_" << la << "_" << lb << ",stderr_im_rho_" << la << "_" << lb;
  out << "\n";
  for (std::size_t i = 0; i < record.mean.size(); ++i) {
    out << fmt(record.times[i]);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) {
        const Complex value = record.mean[i](a, b);
        out << "," << fmt(value.real()) << "," << fmt(value.imag());
      }
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        out << "," << fmt(record.stderr_re[i](a, b)) << "," << fmt(record.stderr_im[i](a, b));
    out << "\n";
  }
  if (!out) throw ConfigError("failed while writing '" + path + "'");
}

void write_ensemble_diagnostics(const std::string& path, const jumps::EnsembleRecord& record,
                                std::size_t n_traj, std::uint64_t master_seed,
                                const std::string& provenance_json) {
  double max_stderr = 0.0;
  for (std::size_t i = 0; i < record.stderr_re.size(); ++i) {
    max_stderr = std::max(max_stderr, record.stderr_re[i].maxCoeff());
    max_stderr = std::max(max_stderr, record.stderr_im[i].maxCoeff());
  }
  const json doc = {
      {"format", "colliq-trajectories-diagnostics"},
      {"version", 1},
      {"units", {{"hbar", 1.0}, {"note", "times in working time units"}}},
      {"n_traj", n_traj},
      {"master_seed", master_seed},
      {"n_times", record.mean.size()},
      {"max_stderr", max_stderr},
      {"config", provenance_or_null(provenance_json)},
  };
  dump_to(path, doc);
}

}  // namespace colliq::io
