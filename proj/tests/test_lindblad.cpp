#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "colliq/errors.hpp"
#include "colliq/lindblad.hpp"
#include "colliq/ops.hpp"
#include "colliq/rng.hpp"
#include "colliq/verify.hpp"

using namespace colliq;
using namespace colliq::lindblad;
using scattering::ChannelSet;
using scattering::SWaveKMatrixModel;

namespace {

struct Fixture {
  thermal::GasParameters gas{0.05, 1.0, 1.2};
  ChannelSet channels{{"g", "e"}, (Eigen::VectorXd(2) << 0.0, 0.4).finished()};
  thermal::RateTensor rates;
  thermal::EnergyShifts shifts;

  Fixture() : rates(make_rates(gas, channels)), shifts(make_shifts(gas, channels)) {}

  static thermal::QuadratureConfig quadrature() {
    thermal::QuadratureConfig config;
    config.n_v = 64;
    config.n_cos = 16;
    return config;
  }

  static SWaveKMatrixModel model(const thermal::GasParameters& gas, const ChannelSet& channels) {
    Eigen::MatrixXd a(2, 2);
    a << 0.8, 0.3, 0.3, -0.5;
    return SWaveKMatrixModel(channels, a, gas.m);
  }

  static thermal::RateTensor make_rates(const thermal::GasParameters& gas,
                                        const ChannelSet& channels) {
    return thermal::rate_tensor(model(gas, channels), gas, quadrature());
  }

  static thermal::EnergyShifts make_shifts(const thermal::GasParameters& gas,
                                           const ChannelSet& channels) {
    return thermal::energy_shifts(model(gas, channels), gas, quadrature());
  }
};

}  // namespace

TEST_CASE("density matrix preconditions") {
  Matrix good(2, 2);
  good << Complex(0.6, 0.0), Complex(0.2, 0.1), Complex(0.2, -0.1), Complex(0.4, 0.0);
  CHECK_NOTHROW(require_density_matrix(good));

  Matrix not_hermitian = good;
  not_hermitian(0, 1) = Complex(0.9, 0.0);
  CHECK_THROWS_AS(require_density_matrix(not_hermitian), std::invalid_argument);

  Matrix wrong_trace = 2.0 * good;
  CHECK_THROWS_AS(require_density_matrix(wrong_trace), std::invalid_argument);

  Matrix indefinite(2, 2);
  indefinite << Complex(1.2, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(-0.2, 0.0);
  CHECK_THROWS_AS(require_density_matrix(indefinite), std::invalid_argument);
}

TEST_CASE("assembled generator structure") {
  Fixture fix;
  AssembledGenerator gen = assemble(fix.channels, fix.shifts, fix.rates);

  CHECK(gen.channels.count() == 2);
  CHECK(ops::max_abs(gen.hamiltonian -
                     Matrix(gen.shifted_energies.cast<Complex>().asDiagonal())) == 0.0);
  CHECK(gen.shifted_energies(0) ==
        doctest::Approx(fix.channels.energies(0) + fix.shifts.epsilon(0)));
  CHECK(ops::is_hermitian(gen.loss, 1e-12));
  CHECK(ops::is_positive_semidefinite(gen.loss, 1e-10));
  CHECK(gen.superop.rows() == 4);
  CHECK_FALSE(gen.near_degenerate_warning);

  rng::CounterRng r(31, 0);
  for (int k = 0; k < 10; ++k) {
    Matrix probe = verify::random_complex_matrix(r, 2, 2);
    Matrix hermitian_probe = probe + probe.adjoint();
    CHECK(std::abs(ops::apply_superop(gen.superop, hermitian_probe).trace()) <
          1e-12 * std::max(1.0, ops::max_abs(hermitian_probe)));
  }

  thermal::EnergyShifts short_shifts;
  short_shifts.epsilon = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(assemble(fix.channels, short_shifts, fix.rates), ConfigError);

  ChannelSet other({"a", "b"}, (Eigen::VectorXd(2) << 0.0, 0.9).finished());
  CHECK_THROWS_AS(assemble(other, fix.shifts, fix.rates), ConfigError);
}

TEST_CASE("propagation conserves trace and positivity") {
  Fixture fix;
  AssembledGenerator gen = assemble(fix.channels, fix.shifts, fix.rates);

  Matrix rho0(2, 2);
  rho0 << Complex(0.7, 0.0), Complex(0.25, 0.05), Complex(0.25, -0.05), Complex(0.3, 0.0);
  const double scale =
      1.0 / std::max(std::abs(gen.loss(0, 0).real()), std::abs(gen.loss(1, 1).real()));
  std::vector<double> grid;
  for (int i = 0; i <= 6; ++i) grid.push_back(2.0 * scale * i / 6.0);

  TrajectoryRecord record = propagate(gen, rho0, grid);
  REQUIRE(record.states.size() == grid.size());
  CHECK(record.completed);
  for (double err : record.trace_errors) CHECK(err < 1e-10);
  for (double eig : record.min_eigenvalues) CHECK(eig > -1e-10);
  CHECK(record.integrator_mismatch < 1e-8);
  CHECK(ops::max_abs(record.states.front() - rho0) < 1e-14);

  CHECK_THROWS_AS(propagate(gen, rho0, {}), std::invalid_argument);
  CHECK_THROWS_AS(propagate(gen, rho0, {0.5, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(propagate(gen, Matrix::Identity(3, 3) / 3.0, grid), std::invalid_argument);
}

TEST_CASE("diagonal states follow the classical rate equation") {
  Fixture fix;
  AssembledGenerator gen = assemble(fix.channels, fix.shifts, fix.rates);
  Eigen::MatrixXd rate_matrix = population_rate_matrix(fix.rates);

  CHECK(std::abs(rate_matrix.colwise().sum().maxCoeff()) < 1e-12);
  CHECK(std::abs(rate_matrix.colwise().sum().minCoeff()) < 1e-12);
  CHECK(rate_matrix(0, 1) >= 0.0);
  CHECK(rate_matrix(1, 0) >= 0.0);

  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(0, 0) = Complex(0.8, 0.0);
  rho0(1, 1) = Complex(0.2, 0.0);
  const double scale = 1.0 / std::abs(gen.loss(0, 0).real());
  std::vector<double> grid = {0.0, 0.5 * scale, scale, 2.0 * scale};
  TrajectoryRecord record = propagate(gen, rho0, grid);

  Eigen::Vector2d p0(0.8, 0.2);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Eigen::Vector2d expected = (grid[k] * rate_matrix).exp() * p0;
    CHECK(std::abs(record.states[k](0, 0).real() - expected(0)) < 1e-8);
    CHECK(std::abs(record.states[k](1, 1).real() - expected(1)) < 1e-8);
    CHECK(std::abs(record.states[k](0, 1)) < 1e-12);
  }
}

TEST_CASE("coherence rotates at the shifted Bohr frequency") {
  thermal::GasParameters gas(0.1, 1.0, 4000.0);
  ChannelSet channels({"g", "e"}, (Eigen::VectorXd(2) << 0.0, 0.5).finished());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 0.05;
  a(1, 1) = -0.03;
  SWaveKMatrixModel model(channels, a, gas.m);
  thermal::QuadratureConfig config = Fixture::quadrature();

  thermal::RateTensor rates = thermal::rate_tensor(model, gas, config);
  thermal::EnergyShifts shifts = thermal::energy_shifts(model, gas, config);
  AssembledGenerator gen = assemble(channels, shifts, rates);

  const double bohr = gen.shifted_energies(0) - gen.shifted_energies(1);
  CHECK(coherence_phase_rate(gen, 0, 1) == doctest::Approx(bohr).epsilon(1e-2));
  CHECK(coherence_phase_rate(gen, 1, 0) == doctest::Approx(-bohr).epsilon(1e-2));
  CHECK_THROWS_AS(coherence_phase_rate(gen, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(coherence_phase_rate(gen, 0, 5), std::invalid_argument);
}
