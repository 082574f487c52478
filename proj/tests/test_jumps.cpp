#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "colliq/errors.hpp"
#include "colliq/jumps.hpp"
#include "colliq/lindblad.hpp"
#include "colliq/ops.hpp"
#include "colliq/thermal.hpp"

using namespace colliq;
using namespace colliq::jumps;
using scattering::ChannelSet;
using scattering::SWaveKMatrixModel;

namespace {

thermal::QuadratureConfig quick_quadrature() {
  thermal::QuadratureConfig config;
  config.n_v = 64;
  config.n_cos = 16;
  return config;
}

struct Fixture {
  thermal::GasParameters gas{0.05, 1.0, 1.2};
  ChannelSet channels{{"g", "e"}, (Eigen::VectorXd(2) << 0.0, 0.4).finished()};
  thermal::RateTensor rates;
  thermal::EnergyShifts shifts;

  static SWaveKMatrixModel model(const thermal::GasParameters& gas, const ChannelSet& channels) {
    Eigen::MatrixXd a(2, 2);
    a << 0.8, 0.3, 0.3, -0.5;
    return SWaveKMatrixModel(channels, a, gas.m);
  }

  Fixture()
      : rates(thermal::rate_tensor(model(gas, channels), gas, quick_quadrature())),
        shifts(thermal::energy_shifts(model(gas, channels), gas, quick_quadrature())) {}
};

bool identical_records(const EnsembleRecord& a, const EnsembleRecord& b) {
  if (a.times != b.times || a.mean.size() != b.mean.size()) return false;
  for (std::size_t k = 0; k < a.mean.size(); ++k) {
    if ((a.mean[k].array() != b.mean[k].array()).any()) return false;
    if ((a.stderr_re[k].array() != b.stderr_re[k].array()).any()) return false;
    if ((a.stderr_im[k].array() != b.stderr_im[k].array()).any()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("jump operators rebuild the dissipator") {
  Fixture fix;
  JumpOperatorSet ops_set = lindblad_operators(fix.rates, fix.shifts);

  CHECK(ops_set.operators.size() <= 4);
  CHECK(!ops_set.operators.empty());
  CHECK(ops_set.reconstruction_residual < 1e-12);

  Matrix loss_direct = thermal::loss_operator(fix.rates);
  CHECK(ops::max_abs(ops_set.loss - loss_direct) < 1e-12);

  Matrix expected_h = Matrix(ops_set.shifted_energies.cast<Complex>().asDiagonal()) -
                      Complex(0.0, 0.5) * ops_set.loss;
  CHECK(ops::max_abs(ops_set.h_eff - expected_h) < 1e-14);

  JumpOperatorSet unshifted = lindblad_operators(fix.rates);
  CHECK(unshifted.shifted_energies(0) == fix.channels.energies(0));
  CHECK(unshifted.shifted_energies(1) == fix.channels.energies(1));

  thermal::EnergyShifts bad;
  bad.epsilon = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(lindblad_operators(fix.rates, bad), ConfigError);
}

TEST_CASE("a zero rate tensor gives pure phase evolution") {
  ChannelSet channels({"g", "e"}, (Eigen::VectorXd(2) << 0.0, 0.4).finished());
  thermal::RateTensor zero(channels, 1e-9);
  JumpOperatorSet ops_set = lindblad_operators(zero);
  CHECK(ops_set.operators.empty());

  Vector psi0(2);
  psi0 << Complex(M_SQRT1_2, 0.0), Complex(M_SQRT1_2, 0.0);
  std::vector<double> grid = {0.0, 1.0, 2.5};
  PureTrajectory traj = simulate_trajectory(ops_set, psi0, grid, 5);

  REQUIRE(traj.states.size() == 3);
  CHECK(traj.n_jumps == 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(traj.states[k].norm() == doctest::Approx(1.0).epsilon(1e-12));
    Vector expected(2);
    expected << psi0(0) * std::exp(Complex(0.0, -0.0 * grid[k])),
        psi0(1) * std::exp(Complex(0.0, -0.4 * grid[k]));
    CHECK((traj.states[k] - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("trajectories are reproducible and validated") {
  Fixture fix;
  JumpOperatorSet ops_set = lindblad_operators(fix.rates, fix.shifts);

  Vector psi0(2);
  psi0 << Complex(1.0, 0.0), Complex(0.0, 0.0);
  const double scale = 1.0 / std::abs(ops_set.loss(0, 0).real());
  std::vector<double> grid = {0.0, scale, 2.0 * scale, 4.0 * scale};

  PureTrajectory a = simulate_trajectory(ops_set, psi0, grid, 77, 3);
  PureTrajectory b = simulate_trajectory(ops_set, psi0, grid, 77, 3);
  CHECK(a.n_jumps == b.n_jumps);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK((a.states[k].array() == b.states[k].array()).all());
  for (const Vector& state : a.states)
    CHECK(state.norm() == doctest::Approx(1.0).epsilon(1e-10));

  Vector unnormalized(2);
  unnormalized << Complex(2.0, 0.0), Complex(0.0, 0.0);
  CHECK_THROWS_AS(simulate_trajectory(ops_set, unnormalized, grid, 1), std::invalid_argument);
  Vector wrong_size = Vector::Ones(3) / std::sqrt(3.0);
  CHECK_THROWS_AS(simulate_trajectory(ops_set, wrong_size, grid, 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate_trajectory(ops_set, psi0, {1.0, 0.5}, 1), std::invalid_argument);
}

TEST_CASE("ensemble mean tracks the master equation") {
  Fixture fix;
  JumpOperatorSet ops_set = lindblad_operators(fix.rates, fix.shifts);
  lindblad::AssembledGenerator gen = lindblad::assemble(fix.channels, fix.shifts, fix.rates);

  Matrix rho0(2, 2);
  rho0 << Complex(0.5, 0.0), Complex(0.5, 0.0), Complex(0.5, 0.0), Complex(0.5, 0.0);
  const double scale = 1.0 / std::abs(gen.loss(0, 0).real());
  std::vector<double> grid = {0.0, 0.7 * scale, 1.4 * scale};

  lindblad::TrajectoryRecord exact = lindblad::propagate(gen, rho0, grid);

  EnsembleConfig config;
  config.n_traj = 600;
  config.master_seed = 11;
  EnsembleRecord ensemble = ensemble_average(ops_set, rho0, grid, config);

  REQUIRE(ensemble.mean.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(std::abs(ensemble.mean[k].trace().real() - 1.0) < 1e-10);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) {
        const Complex gap = ensemble.mean[k](i, j) - exact.states[k](i, j);
        CHECK(std::abs(gap.real()) <= 5.0 * ensemble.stderr_re[k](i, j) + 1e-12);
        CHECK(std::abs(gap.imag()) <= 5.0 * ensemble.stderr_im[k](i, j) + 1e-12);
      }
  }
}

TEST_CASE("ensemble reduction is independent of the thread count") {
  Fixture fix;
  JumpOperatorSet ops_set = lindblad_operators(fix.rates, fix.shifts);

  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(0, 0) = Complex(0.7, 0.0);
  rho0(1, 1) = Complex(0.3, 0.0);
  const double scale = 1.0 / std::abs(ops_set.loss(0, 0).real());
  std::vector<double> grid = {0.0, scale, 2.0 * scale};

  EnsembleConfig serial;
  serial.n_traj = 230;
  serial.master_seed = 19;
  serial.n_threads = 1;
  EnsembleConfig parallel = serial;
  parallel.n_threads = 3;

  EnsembleRecord reference = ensemble_average(ops_set, rho0, grid, serial);
  EnsembleRecord threaded = ensemble_average(ops_set, rho0, grid, parallel);
  CHECK(identical_records(reference, threaded));

  Vector psi0(2);
  psi0 << Complex(1.0, 0.0), Complex(0.0, 0.0);
  Matrix projector = psi0 * psi0.adjoint();
  EnsembleRecord from_vector = ensemble_average(ops_set, psi0, grid, serial);
  EnsembleRecord from_projector = ensemble_average(ops_set, projector, grid, serial);
  CHECK(identical_records(from_vector, from_projector));

  EnsembleConfig single = serial;
  single.n_traj = 1;
  EnsembleRecord lone = ensemble_average(ops_set, rho0, grid, single);
  CHECK(lone.stderr_re[1].maxCoeff() == 0.0);
  CHECK(lone.stderr_im[1].maxCoeff() == 0.0);

  EnsembleConfig zero = serial;
  zero.n_traj = 0;
  CHECK_THROWS_AS(ensemble_average(ops_set, rho0, grid, zero), std::invalid_argument);
  EnsembleConfig no_threads = serial;
  no_threads.n_threads = 0;
  CHECK_THROWS_AS(ensemble_average(ops_set, rho0, grid, no_threads), std::invalid_argument);
}
