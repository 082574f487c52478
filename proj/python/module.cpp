// Python bindings for the main operations: scattering models, thermal rate
// tensors, master-equation propagation, and trajectory ensembles.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "colliq/config.hpp"
#include "colliq/errors.hpp"
#include "colliq/io.hpp"
#include "colliq/jumps.hpp"
#include "colliq/lindblad.hpp"
#include "colliq/monitoring.hpp"
#include "colliq/scattering.hpp"
#include "colliq/thermal.hpp"
#include "colliq/verify.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace colliq;

PYBIND11_MODULE(colliq, m) {
  m.doc() = "Collisional open-system dynamics in a thermal gas";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NumericalError>(m, "NumericalError");

  py::class_<scattering::ChannelSet>(m, "ChannelSet")
      .def(py::init<std::vector<std::string>, Eigen::VectorXd, double>(), "labels"_a,
           "energies"_a, "energy_tolerance"_a = 1e-9)
      .def_readonly("labels", &scattering::ChannelSet::labels)
      .def_readonly("energies", &scattering::ChannelSet::energies)
      .def("count", &scattering::ChannelSet::count)
      .def("index_of", &scattering::ChannelSet::index_of, "label"_a);

  py::class_<thermal::GasParameters>(m, "GasParameters")
      .def(py::init<double, double, double>(), "n_gas"_a, "m"_a, "beta"_a)
      .def_readonly("n_gas", &thermal::GasParameters::n_gas)
      .def_readonly("m", &thermal::GasParameters::m)
      .def_readonly("beta", &thermal::GasParameters::beta)
      .def("thermal_wavelength", &thermal::GasParameters::thermal_wavelength)
      .def("mean_speed", &thermal::GasParameters::mean_speed);

  py::class_<scattering::Model, std::shared_ptr<scattering::Model>>(m, "Model")
      .def_property_readonly("channels", &scattering::Model::channels)
      .def_property_readonly("mass", &scattering::Model::mass)
      .def("is_open", &scattering::Model::is_open, "alpha"_a, "e_total"_a)
      .def("momentum", &scattering::Model::momentum, "alpha"_a, "e_total"_a)
      .def("amplitude", &scattering::Model::amplitude, "alpha"_a, "alpha0"_a, "cos_theta"_a,
           "e_total"_a)
      .def("amplitude_matrix", &scattering::Model::amplitude_matrix, "cos_theta"_a, "e_total"_a)
      .def("pair_cross_section", &scattering::Model::pair_cross_section, "alpha"_a, "alpha0"_a,
           "e_total"_a, "n_cos"_a = 64)
      .def("channel_total_cross_section", &scattering::Model::channel_total_cross_section,
           "alpha0"_a, "e_total"_a, "n_cos"_a = 64)
      .def("optical_theorem_residual", &scattering::Model::optical_theorem_residual, "alpha0"_a,
           "e_total"_a, "n_cos"_a = 64);

  py::class_<scattering::SWaveKMatrixModel, scattering::Model,
             std::shared_ptr<scattering::SWaveKMatrixModel>>(m, "SWaveKMatrixModel")
      .def(py::init<scattering::ChannelSet, Eigen::MatrixXd, double>(), "channels"_a,
           "reactance_lengths"_a, "mass"_a)
      .def_property_readonly("reactance_lengths", &scattering::SWaveKMatrixModel::reactance_lengths)
      .def("s_matrix_at_energy", &scattering::SWaveKMatrixModel::s_matrix_at_energy, "e_total"_a);

  py::class_<scattering::AmplitudeTable, scattering::Model,
             std::shared_ptr<scattering::AmplitudeTable>>(m, "AmplitudeTable")
      .def_property_readonly("e_kin_grid", &scattering::AmplitudeTable::e_kin_grid)
      .def_property_readonly("cos_theta_grid", &scattering::AmplitudeTable::cos_theta_grid);
  m.def(
      "read_amplitude_table",
      [](const std::string& path, double mass) {
        return std::make_shared<scattering::AmplitudeTable>(io::read_amplitude_table(path, mass));
      },
      "path"_a, "mass"_a);

  py::class_<thermal::QuadratureConfig>(m, "QuadratureConfig")
      .def(py::init<>())
      .def_readwrite("n_v", &thermal::QuadratureConfig::n_v)
      .def_readwrite("n_cos", &thermal::QuadratureConfig::n_cos)
      .def_readwrite("v_max_factor", &thermal::QuadratureConfig::v_max_factor)
      .def_readwrite("energy_tolerance", &thermal::QuadratureConfig::energy_tolerance)
      .def_readwrite("convergence_tolerance", &thermal::QuadratureConfig::convergence_tolerance)
      .def_readwrite("refinement_check", &thermal::QuadratureConfig::refinement_check);

  py::class_<thermal::RateDiagnostics>(m, "RateDiagnostics")
      .def_readonly("hermiticity_residual", &thermal::RateDiagnostics::hermiticity_residual)
      .def_readonly("psd_min_eig", &thermal::RateDiagnostics::psd_min_eig)
      .def_readonly("chi_violation", &thermal::RateDiagnostics::chi_violation)
      .def_readonly("coefficient_norm", &thermal::RateDiagnostics::coefficient_norm);

  py::class_<thermal::RateTensor>(m, "RateTensor")
      .def_readonly("channels", &thermal::RateTensor::channels)
      .def_readonly("entries", &thermal::RateTensor::entries)
      .def_readonly("quadrature_residual", &thermal::RateTensor::quadrature_residual)
      .def("at", &thermal::RateTensor::operator(), "alpha"_a, "beta"_a, "alpha0"_a, "beta0"_a)
      .def("chi_at", &thermal::RateTensor::chi_at, "alpha"_a, "beta"_a, "alpha0"_a, "beta0"_a);

  py::class_<thermal::EnergyShifts>(m, "EnergyShifts")
      .def(py::init<>())
      .def_readwrite("epsilon", &thermal::EnergyShifts::epsilon)
      .def_readonly("quadrature_residual", &thermal::EnergyShifts::quadrature_residual);

  m.def("chi", &thermal::chi, "channels"_a, "alpha"_a, "beta"_a, "alpha0"_a, "beta0"_a,
        "energy_tolerance"_a = 1e-9);
  m.def("maxwell_speed_pdf", &thermal::maxwell_speed_pdf, "gas"_a, "v"_a);
  m.def("rate_coefficient", &thermal::rate_coefficient, "model"_a, "gas"_a, "alpha"_a, "beta"_a,
        "alpha0"_a, "beta0"_a, "config"_a = thermal::QuadratureConfig{});
  m.def("rate_tensor", &thermal::rate_tensor, "model"_a, "gas"_a,
        "config"_a = thermal::QuadratureConfig{});
  m.def("validate_rate_tensor", &thermal::validate_rate_tensor, "rates"_a);
  m.def("coefficient_matrix", &thermal::coefficient_matrix, "rates"_a);
  m.def("loss_operator", &thermal::loss_operator, "rates"_a);
  m.def("energy_shift", &thermal::energy_shift, "model"_a, "gas"_a, "alpha"_a,
        "config"_a = thermal::QuadratureConfig{});
  m.def("energy_shifts", &thermal::energy_shifts, "model"_a, "gas"_a,
        "config"_a = thermal::QuadratureConfig{});
  m.def("elastic_dephasing_rate", &thermal::elastic_dephasing_rate, "model"_a, "gas"_a, "alpha"_a,
        "beta"_a, "config"_a = thermal::QuadratureConfig{});

  py::class_<lindblad::AssembledGenerator>(m, "AssembledGenerator")
      .def_readonly("channels", &lindblad::AssembledGenerator::channels)
      .def_readonly("shifted_energies", &lindblad::AssembledGenerator::shifted_energies)
      .def_readonly("hamiltonian", &lindblad::AssembledGenerator::hamiltonian)
      .def_readonly("loss", &lindblad::AssembledGenerator::loss)
      .def_readonly("superop", &lindblad::AssembledGenerator::superop)
      .def_readonly("near_degenerate_warning",
                    &lindblad::AssembledGenerator::near_degenerate_warning);

  py::class_<lindblad::TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("times", &lindblad::TrajectoryRecord::times)
      .def_readonly("states", &lindblad::TrajectoryRecord::states)
      .def_readonly("trace_errors", &lindblad::TrajectoryRecord::trace_errors)
      .def_readonly("min_eigenvalues", &lindblad::TrajectoryRecord::min_eigenvalues)
      .def_readonly("integrator_mismatch", &lindblad::TrajectoryRecord::integrator_mismatch)
      .def_readonly("completed", &lindblad::TrajectoryRecord::completed)
      .def_readonly("abort_time", &lindblad::TrajectoryRecord::abort_time);

  m.def("assemble", &lindblad::assemble, "channels"_a, "shifts"_a, "rates"_a);
  m.def("propagate", &lindblad::propagate, "generator"_a, "rho0"_a, "t_grid"_a);
  m.def("population_rate_matrix", &lindblad::population_rate_matrix, "rates"_a);
  m.def("coherence_phase_rate", &lindblad::coherence_phase_rate, "generator"_a, "alpha"_a,
        "beta"_a);

  py::class_<jumps::JumpOperatorSet>(m, "JumpOperatorSet")
      .def_readonly("channels", &jumps::JumpOperatorSet::channels)
      .def_readonly("operators", &jumps::JumpOperatorSet::operators)
      .def_readonly("shifted_energies", &jumps::JumpOperatorSet::shifted_energies)
      .def_readonly("loss", &jumps::JumpOperatorSet::loss)
      .def_readonly("h_eff", &jumps::JumpOperatorSet::h_eff)
      .def_readonly("reconstruction_residual", &jumps::JumpOperatorSet::reconstruction_residual);

  py::class_<jumps::PureTrajectory>(m, "PureTrajectory")
      .def_readonly("times", &jumps::PureTrajectory::times)
      .def_readonly("states", &jumps::PureTrajectory::states)
      .def_readonly("n_jumps", &jumps::PureTrajectory::n_jumps);

  py::class_<jumps::EnsembleConfig>(m, "EnsembleConfig")
      .def(py::init<>())
      .def_readwrite("n_traj", &jumps::EnsembleConfig::n_traj)
      .def_readwrite("master_seed", &jumps::EnsembleConfig::master_seed)
      .def_readwrite("n_threads", &jumps::EnsembleConfig::n_threads);

  py::class_<jumps::EnsembleRecord>(m, "EnsembleRecord")
      .def_readonly("times", &jumps::EnsembleRecord::times)
      .def_readonly("mean", &jumps::EnsembleRecord::mean)
      .def_readonly("stderr_re", &jumps::EnsembleRecord::stderr_re)
      .def_readonly("stderr_im", &jumps::EnsembleRecord::stderr_im);

  m.def("lindblad_operators",
        py::overload_cast<const thermal::RateTensor&, const thermal::EnergyShifts&>(
            &jumps::lindblad_operators),
        "rates"_a, "shifts"_a);
  m.def("lindblad_operators",
        py::overload_cast<const thermal::RateTensor&>(&jumps::lindblad_operators), "rates"_a);
  m.def("simulate_trajectory", &jumps::simulate_trajectory, "ops"_a, "psi0"_a, "t_grid"_a,
        "seed"_a, "stream"_a = 0);
  m.def("ensemble_average",
        py::overload_cast<const jumps::JumpOperatorSet&, const Matrix&,
                          const std::vector<double>&, const jumps::EnsembleConfig&>(
            &jumps::ensemble_average),
        "ops"_a, "rho0"_a, "t_grid"_a, "config"_a);

  py::class_<ops::CompositeSpace>(m, "CompositeSpace")
      .def(py::init<Eigen::Index, Eigen::Index>(), "dim_sys"_a, "dim_env"_a)
      .def_readonly("dim_sys", &ops::CompositeSpace::dim_sys)
      .def_readonly("dim_env", &ops::CompositeSpace::dim_env)
      .def("total", &ops::CompositeSpace::total);

  py::class_<monitoring::CollisionModel>(m, "CollisionModel")
      .def(py::init<const ops::CompositeSpace&, Matrix, Matrix, Matrix, double>(), "space"_a,
           "s"_a, "gamma"_a, "rho_env"_a, "tol"_a = 1e-10)
      .def_readonly("gamma_norm", &monitoring::CollisionModel::gamma_norm);

  py::class_<monitoring::GeneratorReport>(m, "GeneratorReport")
      .def_readonly("generator", &monitoring::GeneratorReport::generator)
      .def_readonly("t_unitarity_residual", &monitoring::GeneratorReport::t_unitarity_residual)
      .def_readonly("semigroup_cptp_residual",
                    &monitoring::GeneratorReport::semigroup_cptp_residual);

  m.def("collision_probability", &monitoring::collision_probability, "rho_sys"_a, "model"_a,
        "dt"_a);
  m.def("finite_dt_map", &monitoring::finite_dt_map, "rho_total"_a, "model"_a, "dt"_a);
  m.def("t_unitarity_residual", &monitoring::t_unitarity_residual, "s"_a);
  m.def("build_generator", &monitoring::build_generator, "model"_a);
  m.def("choi_negativity", &ops::choi_negativity, "superop"_a);
  m.def("trace_preservation_residual", &ops::trace_preservation_residual, "superop"_a);

  py::class_<verify::CheckResult>(m, "CheckResult")
      .def_readonly("name", &verify::CheckResult::name)
      .def_readonly("passed", &verify::CheckResult::passed)
      .def_readonly("residual", &verify::CheckResult::residual)
      .def_readonly("detail", &verify::CheckResult::detail);
}
