#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "colliq/errors.hpp"
#include "colliq/ops.hpp"
#include "colliq/scattering.hpp"
#include "colliq/thermal.hpp"

using namespace colliq;
using namespace colliq::thermal;
using scattering::ChannelSet;
using scattering::SWaveKMatrixModel;

namespace {

ChannelSet two_channels() {
  return ChannelSet({"g", "e"}, (Eigen::VectorXd(2) << 0.0, 0.4).finished());
}

SWaveKMatrixModel coupled_model(const GasParameters& gas) {
  Eigen::MatrixXd a(2, 2);
  a << 0.8, 0.3, 0.3, -0.5;
  return SWaveKMatrixModel(two_channels(), a, gas.m);
}

QuadratureConfig quick_quadrature() {
  QuadratureConfig config;
  config.n_v = 64;
  config.n_cos = 16;
  return config;
}

}  // namespace

TEST_CASE("gas parameter validation and derived scales") {
  CHECK_THROWS_AS(GasParameters(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GasParameters(0.1, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GasParameters(0.1, 1.0, 0.0), std::invalid_argument);

  GasParameters gas(0.05, 2.0, 0.5);
  CHECK(gas.thermal_wavelength() == doctest::Approx(std::sqrt(2.0 * M_PI * 0.5 / 2.0)));
  CHECK(gas.mean_speed() == doctest::Approx(std::sqrt(8.0 / (M_PI * 0.5 * 2.0))));
}

TEST_CASE("maxwell speed distribution is normalized with the right mean") {
  GasParameters gas(0.1, 1.5, 0.8);
  auto rule = thermal_speed_rule(two_channels(), gas, 200, 10.0);
  double norm = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double pdf = maxwell_speed_pdf(gas, rule.nodes[i]);
    norm += rule.weights[i] * pdf;
    mean += rule.weights[i] * pdf * rule.nodes[i];
  }
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mean == doctest::Approx(gas.mean_speed()).epsilon(1e-10));
  CHECK_THROWS_AS(maxwell_speed_pdf(gas, -0.1), std::invalid_argument);
}

TEST_CASE("energy-matching indicator for generic levels") {
  ChannelSet channels = two_channels();
  int active = 0;
  for (Eigen::Index a = 0; a < 2; ++a)
    for (Eigen::Index b = 0; b < 2; ++b)
      for (Eigen::Index a0 = 0; a0 < 2; ++a0)
        for (Eigen::Index b0 = 0; b0 < 2; ++b0) active += chi(channels, a, b, a0, b0);
  CHECK(active == 6);
  CHECK(chi(channels, 0, 1, 0, 1) == 1);
  CHECK(chi(channels, 0, 0, 1, 1) == 1);
  CHECK(chi(channels, 0, 1, 0, 0) == 0);
  CHECK(chi(channels, 1, 0, 0, 0) == 0);
}

TEST_CASE("channel opening speeds mark the inelastic thresholds") {
  GasParameters gas(0.05, 1.0, 1.2);
  auto speeds = channel_opening_speeds(two_channels(), gas);
  bool found = false;
  for (double v : speeds) found |= std::abs(v - std::sqrt(0.8)) < 1e-12;
  CHECK(found);
}

TEST_CASE("rate tensor satisfies the structural invariants") {
  GasParameters gas(0.05, 1.0, 1.2);
  SWaveKMatrixModel model = coupled_model(gas);
  RateTensor rates = rate_tensor(model, gas, quick_quadrature());

  RateDiagnostics diag = validate_rate_tensor(rates);
  CHECK(diag.chi_violation == 0.0);
  CHECK(diag.hermiticity_residual < 1e-12);
  CHECK(diag.psd_min_eig >= -1e-10 * std::max(1.0, diag.coefficient_norm));
  CHECK(diag.coefficient_norm > 0.0);
  CHECK(rates.quadrature_residual <= quick_quadrature().convergence_tolerance);
  CHECK_NOTHROW(require_valid_rate_tensor(rates));

  Matrix coeff = coefficient_matrix(rates);
  CHECK(ops::is_hermitian(coeff, 1e-12));
  CHECK(ops::is_positive_semidefinite(coeff, 1e-10 * std::max(1.0, diag.coefficient_norm)));
  const Eigen::Index n = 2;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index a0 = 0; a0 < n; ++a0)
        for (Eigen::Index b0 = 0; b0 < n; ++b0) {
          CHECK(coeff(a * n + a0, b * n + b0) == rates(a, b, a0, b0));
          if (!rates.chi_at(a, b, a0, b0)) CHECK(rates(a, b, a0, b0) == Complex(0.0, 0.0));
        }

  Matrix loss = loss_operator(rates);
  CHECK(ops::is_hermitian(loss, 1e-12));
  CHECK(ops::is_positive_semidefinite(loss, 1e-10));
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index a0 = 0; a0 < n; ++a0) {
      Complex expected(0.0, 0.0);
      for (Eigen::Index g = 0; g < n; ++g) expected += rates(g, g, a0, a);
      CHECK(std::abs(loss(a, a0) - expected) < 1e-14);
    }
}

TEST_CASE("tensor entries match the single-coefficient route") {
  GasParameters gas(0.05, 1.0, 1.2);
  SWaveKMatrixModel model = coupled_model(gas);
  QuadratureConfig config = quick_quadrature();
  RateTensor rates = rate_tensor(model, gas, config);
  for (auto [a, b, a0, b0] : {std::array<Eigen::Index, 4>{0, 0, 0, 0},
                              std::array<Eigen::Index, 4>{1, 1, 0, 0},
                              std::array<Eigen::Index, 4>{0, 1, 0, 1}}) {
    Complex single = rate_coefficient(model, gas, a, b, a0, b0, config);
    CHECK(std::abs(single - rates(a, b, a0, b0)) < 1e-10 * std::max(1.0, std::abs(single)));
  }
}

TEST_CASE("an unconverged quadrature is rejected") {
  GasParameters gas(0.05, 1.0, 1.2);
  SWaveKMatrixModel model = coupled_model(gas);
  QuadratureConfig config;
  config.n_v = 3;
  config.n_cos = 4;
  config.convergence_tolerance = 1e-16;
  CHECK_THROWS_AS(rate_tensor(model, gas, config), NumericalError);
}

TEST_CASE("negative-rate injection is rejected by validation") {
  GasParameters gas(0.05, 1.0, 1.2);
  SWaveKMatrixModel model = coupled_model(gas);
  RateTensor rates = rate_tensor(model, gas, quick_quadrature());
  rates.entries(rates.flat(0, 0, 0, 0)) = Complex(-1.0, 0.0);
  CHECK_THROWS_AS(require_valid_rate_tensor(rates), ConfigError);
}

TEST_CASE("cold-gas closed forms") {
  GasParameters gas(0.1, 1.0, 4000.0);
  const double a1 = 0.05, a2 = -0.03;
  ChannelSet channels({"g", "e"}, (Eigen::VectorXd(2) << 0.0, 0.5).finished());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = a1;
  a(1, 1) = a2;
  SWaveKMatrixModel model(channels, a, gas.m);
  QuadratureConfig config = quick_quadrature();

  RateTensor rates = rate_tensor(model, gas, config);
  const double elastic_rate = rates(0, 0, 0, 0).real();
  const double sigma0 = 4.0 * M_PI * a1 * a1;
  CHECK(elastic_rate ==
        doctest::Approx(gas.n_gas * sigma0 * gas.mean_speed()).epsilon(1e-3));

  const double gamma = elastic_dephasing_rate(model, gas, 0, 1, config);
  const double gamma_closed = 2.0 * M_PI * gas.n_gas * gas.mean_speed() * (a1 - a2) * (a1 - a2);
  CHECK(gamma == doctest::Approx(gamma_closed).epsilon(1e-3));

  const double mixed = 0.5 * (rates(0, 0, 0, 0).real() + rates(1, 1, 1, 1).real()) -
                       rates(0, 1, 0, 1).real();
  CHECK(gamma == doctest::Approx(mixed).epsilon(1e-8));

  const double shift = energy_shift(model, gas, 0, config);
  CHECK(shift == doctest::Approx(2.0 * M_PI * gas.n_gas * a1 / gas.m).epsilon(1e-3));

  EnergyShifts shifts = energy_shifts(model, gas, config);
  REQUIRE(shifts.epsilon.size() == 2);
  CHECK(shifts.epsilon[0] == doctest::Approx(shift).epsilon(1e-13));
  CHECK(shifts.epsilon[1] ==
        doctest::Approx(2.0 * M_PI * gas.n_gas * a2 / gas.m).epsilon(1e-3));
  CHECK_THROWS_AS(elastic_dephasing_rate(model, gas, 1, 1, config), std::invalid_argument);
}

TEST_CASE("monte carlo oracle agrees with the quadrature") {
  GasParameters gas(0.02, 1.0, 1.2);
  Eigen::MatrixXd a(2, 2);
  a << 0.9, 0.35, 0.35, -0.6;
  SWaveKMatrixModel model(ChannelSet({"g", "e"}, (Eigen::VectorXd(2) << 0.0, 0.4).finished()), a,
                          gas.m);
  RateTensor rates = rate_tensor(model, gas, quick_quadrature());

  McConfig mc;
  mc.n_samples = 40000;
  mc.seed = 911;
  auto estimates = rate_tensor_mc_oracle(model, gas, mc);
  REQUIRE(estimates.size() == 16);

  const Eigen::Index n = 2;
  for (Eigen::Index a_i = 0; a_i < n; ++a_i)
    for (Eigen::Index b_i = 0; b_i < n; ++b_i)
      for (Eigen::Index a0 = 0; a0 < n; ++a0)
        for (Eigen::Index b0 = 0; b0 < n; ++b0) {
          const auto& est = estimates[static_cast<std::size_t>(rates.flat(a_i, b_i, a0, b0))];
          const Complex exact = rates(a_i, b_i, a0, b0);
          if (!rates.chi_at(a_i, b_i, a0, b0)) {
            CHECK(std::abs(est.value) == 0.0);
            continue;
          }
          CHECK(std::abs(est.value.real() - exact.real()) <= 5.0 * est.stderr_re + 1e-12);
          CHECK(std::abs(est.value.imag() - exact.imag()) <= 5.0 * est.stderr_im + 1e-12);
        }

  McConfig rotated = mc;
  rotated.frame = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1.0, 2.0, 2.0).normalized())
                      .toRotationMatrix();
  McEstimate plain = rate_coefficient_mc_oracle(model, gas, 0, 0, 0, 0, mc);
  McEstimate turned = rate_coefficient_mc_oracle(model, gas, 0, 0, 0, 0, rotated);
  const double spread = std::hypot(plain.stderr_re, turned.stderr_re);
  CHECK(std::abs(plain.value.real() - turned.value.real()) <= 5.0 * spread + 1e-12);
}
